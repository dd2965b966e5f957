#include "lsx/raretail.hpp"

#include "lsx/asympt.hpp"
#include "lsx/csv.hpp"
#include "lsx/error.hpp"
#include "lsx/specfun.hpp"

#include <boost/math/distributions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace lsx {

namespace {

constexpr std::size_t kChunk = 64;

struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        const double tot = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / tot;
        m2 += o.m2 + d * d * n * o.n / tot;
        n = tot;
    }
    double std_error() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
};

struct ImportancePartial {
    Moments w;
    Moments lr;
    double sw = 0.0;
    double sw2 = 0.0;
    std::size_t hits = 0;
};

double uniform01(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

double path_max(const double* x, std::size_t n) { return *std::max_element(x, x + n); }

}  // namespace

const char* to_string(TailMethod m) noexcept {
    return m == TailMethod::crude ? "crude" : "importance";
}

const char* to_string(TiltPolicy t) noexcept {
    return t == TiltPolicy::single_point ? "single_point" : "mixture";
}

ExceedanceStats crude_exceedance(const GaussianSampler& sampler, double u, std::size_t n,
                                 std::uint64_t seed, std::uint64_t stream, Exec exec) {
    if (n == 0) fail(ErrorKind::invalid_argument, "crude_exceedance: need samples");
    if (std::isnan(u)) fail(ErrorKind::invalid_argument, "crude_exceedance: NaN threshold");
    const std::size_t d = sampler.dim();
    const BatchPlan plan{n, kDefaultBatch};
    auto parts = map_batches<std::size_t>(plan, exec, [&](std::size_t b, std::size_t, std::size_t size) {
        auto rng = make_rng({seed, stream, b});
        std::vector<double> buf(kChunk * d);
        std::size_t hits = 0;
        for (std::size_t p = 0; p < size; p += kChunk) {
            const std::size_t k = std::min(kChunk, size - p);
            sampler.sample(rng, k, buf);
            for (std::size_t q = 0; q < k; ++q)
                if (path_max(buf.data() + q * d, d) > u) ++hits;
        }
        return hits;
    });
    ExceedanceStats s;
    s.n = n;
    for (auto h : parts) s.hits += h;
    s.p_hat = double(s.hits) / double(n);
    s.std_error = std::sqrt(s.p_hat * (1.0 - s.p_hat) / double(n));
    s.ess = double(n);
    return s;
}

ExceedanceStats importance_exceedance(const GaussianSampler& sampler, double u, std::size_t n,
                                      std::uint64_t seed, std::uint64_t stream, TiltPolicy tilt,
                                      Exec exec) {
    if (n == 0) fail(ErrorKind::invalid_argument, "importance_exceedance: need samples");
    if (!(u > 0.0) || !std::isfinite(u))
        fail(ErrorKind::invalid_argument, "importance_exceedance: u must be positive");
    const std::size_t d = sampler.dim();

    // Mixture weights over tilt points, in log space.
    std::vector<double> var(d), logp(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < d; ++i) var[i] = sampler.covariance(i, i);
    if (tilt == TiltPolicy::single_point) {
        const auto star = static_cast<std::size_t>(std::max_element(var.begin(), var.end()) - var.begin());
        if (!(var[star] > 0.0)) fail(ErrorKind::model, "importance_exceedance: zero variance everywhere");
        logp[star] = 0.0;
    } else {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < d; ++i)
            if (var[i] > 0.0) {
                logp[i] = specfun::log_survival(u / std::sqrt(var[i]));
                top = std::max(top, logp[i]);
            }
        if (!std::isfinite(top)) fail(ErrorKind::model, "importance_exceedance: zero variance everywhere");
        double s = 0.0;
        for (double lp : logp) s += std::exp(lp - top);
        const double norm = top + std::log(s);
        for (double& lp : logp) lp -= norm;
    }
    std::vector<std::size_t> support;
    std::vector<double> cdf;
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        if (std::isfinite(logp[i])) {
            support.push_back(i);
            acc += std::exp(logp[i]);
            cdf.push_back(acc);
        }
    for (double& c : cdf) c /= acc;
    // log dQ_k/dP(y) = (u / v_k) y_k - u^2 / (2 v_k)
    std::vector<double> slope(support.size()), offset(support.size());
    for (std::size_t k = 0; k < support.size(); ++k) {
        const std::size_t i = support[k];
        slope[k] = u / var[i];
        offset[k] = logp[i] - u * u / (2.0 * var[i]);
    }

    const BatchPlan plan{n, kDefaultBatch};
    auto parts = map_batches<ImportancePartial>(plan, exec, [&](std::size_t b, std::size_t, std::size_t size) {
        auto rng = make_rng({seed, stream, b});
        std::vector<double> buf(kChunk * d), terms(support.size());
        ImportancePartial part;
        for (std::size_t p = 0; p < size; p += kChunk) {
            const std::size_t k = std::min(kChunk, size - p);
            sampler.sample(rng, k, buf);
            for (std::size_t q = 0; q < k; ++q) {
                const std::size_t pick = static_cast<std::size_t>(
                    std::lower_bound(cdf.begin(), cdf.end(), uniform01(rng)) - cdf.begin());
                const std::size_t j = support[std::min(pick, support.size() - 1)];
                double* y = buf.data() + q * d;
                const double shift = u / var[j];
                for (std::size_t i = 0; i < d; ++i) y[i] += shift * sampler.covariance(i, j);

                double top = -std::numeric_limits<double>::infinity();
                for (std::size_t m = 0; m < support.size(); ++m) {
                    terms[m] = slope[m] * y[support[m]] + offset[m];
                    top = std::max(top, terms[m]);
                }
                double s = 0.0;
                for (double t : terms) s += std::exp(t - top);
                const double lr = std::exp(-(top + std::log(s)));
                const bool hit = path_max(y, d) > u;
                const double w = hit ? lr : 0.0;
                part.hits += hit;
                part.w.add(w);
                part.lr.add(lr);
                part.sw += w;
                part.sw2 += w * w;
            }
        }
        return part;
    });

    ImportancePartial total;
    for (const auto& p : parts) {
        total.w.merge(p.w);
        total.lr.merge(p.lr);
        total.sw += p.sw;
        total.sw2 += p.sw2;
        total.hits += p.hits;
    }
    ExceedanceStats s;
    s.n = n;
    s.hits = total.hits;
    s.p_hat = std::clamp(total.w.mean, 0.0, 1.0);
    s.std_error = total.w.std_error();
    s.ess = total.sw2 > 0.0 ? total.sw * total.sw / total.sw2 : 0.0;
    s.mean_weight = total.lr.mean;
    s.mean_weight_se = total.lr.std_error();
    return s;
}

namespace {

void require_on_horizon(const ProcessSpec& spec, const Grid& grid) {
    if (!spec.horizon().contains(grid.start()) || !spec.horizon().contains(grid.end()))
        fail(ErrorKind::invalid_argument, "tail: grid must lie within the horizon");
}

std::string mesh_warning(const ProcessSpec& spec, const Grid& grid, double u) {
    if (grid.size() < 2 || !(u > 0.0)) return {};
    const double guide = recommended_mesh(u, spec.index().alpha0);
    if (grid.mesh() <= guide) return {};
    std::ostringstream os;
    os << "mesh " << grid.mesh() << " exceeds 0.1 u^{-2/alpha} = " << guide;
    return os.str();
}

}  // namespace

TailEstimate crude_tail(const ProcessSpec& spec, const Grid& grid, double u, std::size_t n,
                        std::uint64_t seed, Exec exec) {
    if (n < 1000) fail(ErrorKind::invalid_argument, "crude_tail: need at least 1000 samples");
    require_on_horizon(spec, grid);
    const auto sampler = make_sampler(spec, grid);
    const auto s = crude_exceedance(*sampler, u, n, seed, 0, exec);
    TailEstimate t{u, s.p_hat, s.std_error, n, TailMethod::crude, grid, s.ess, 1.0, 0.0, {}};
    t.warning = mesh_warning(spec, grid, u);
    return t;
}

TailEstimate importance_tail(const ProcessSpec& spec, const Grid& grid, double u, std::size_t n,
                             std::uint64_t seed, TiltPolicy tilt, Exec exec) {
    if (!(u >= 2.0)) fail(ErrorKind::invalid_argument, "importance_tail: requires u >= 2");
    if (n == 0) fail(ErrorKind::invalid_argument, "importance_tail: need samples");
    require_on_horizon(spec, grid);
    const auto sampler = make_sampler(spec, grid);
    const auto s = importance_exceedance(*sampler, u, n, seed, 0, tilt, exec);
    TailEstimate t{u, s.p_hat, s.std_error, n, TailMethod::importance, grid,
                   s.ess, s.mean_weight, s.mean_weight_se, {}};
    std::string w = mesh_warning(spec, grid, u);
    if (s.ess < 0.01 * double(n)) w = w.empty() ? "ill-tilted: ess < 0.01 n" : "ill-tilted: ess < 0.01 n; " + w;
    t.warning = w;
    return t;
}

// --- comparison with theory -----------------------------------------------------------

ComparisonTable compare_to_theory(const ProcessSpec& spec, std::span<const double> u_ladder,
                                  double H_alpha, const CompareConfig& cfg) {
    if (u_ladder.empty()) fail(ErrorKind::invalid_argument, "compare_to_theory: empty u ladder");
    for (std::size_t i = 0; i < u_ladder.size(); ++i) {
        if (!(std::log(std::log(u_ladder[i])) > 0.0))
            fail(ErrorKind::asymptotic_domain, "compare_to_theory: every u must exceed e");
        if (i > 0 && !(u_ladder[i] > u_ladder[i - 1]))
            fail(ErrorKind::invalid_argument, "compare_to_theory: u ladder must increase");
    }
    bool stationary = cfg.theory == TheoryKind::stationary ||
                      (cfg.theory == TheoryKind::automatic && spec.variance().c == 0.0);
    ComparisonTable table;
    table.theory = stationary ? "stationary" : "theorem1";
    std::optional<RegimeParams> rp;
    if (!stationary) rp = spec.regime_params();

    const auto& iv = spec.horizon();
    for (std::size_t i = 0; i < u_ladder.size(); ++i) {
        const double u = u_ladder[i];
        const double target = cfg.mesh_factor * std::pow(u, -2.0 / spec.index().alpha0);
        auto pts = static_cast<std::size_t>(std::ceil(iv.length() / target)) + 1;
        pts = std::clamp(pts, std::max<std::size_t>(cfg.min_points, 2), std::max<std::size_t>(cfg.max_points, 2));
        const Grid grid(iv.start, iv.end, pts);
        const auto sampler = make_sampler(spec, grid);
        const auto s = importance_exceedance(*sampler, u, cfg.n, cfg.seed, i, cfg.tilt, cfg.exec);

        const TailApprox th = stationary
            ? stationary_tail(iv.length(), spec.scale().a0, spec.index().alpha0, H_alpha, u)
            : theorem1_tail(*rp, H_alpha, u);
        ComparisonRow row;
        row.u = u;
        row.p_emp = s.p_hat;
        row.se = s.std_error;
        row.p_theory = th.value;
        row.ratio = s.p_hat / th.value;
        row.ratio_lo = (s.p_hat - 1.96 * s.std_error) / th.value;
        row.ratio_hi = (s.p_hat + 1.96 * s.std_error) / th.value;
        row.mesh = grid.mesh();
        row.n = cfg.n;
        row.method = "importance";
        row.ess = s.ess;
        if (grid.mesh() > target / cfg.mesh_factor * 0.1) row.warning = "mesh coarser than 0.1 u^{-2/alpha}";
        if (s.ess < 0.01 * double(cfg.n)) row.warning += row.warning.empty() ? "ill-tilted" : "; ill-tilted";
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_comparison_csv(std::ostream& os, const ComparisonTable& table) {
    csv::write_row(os, {"u", "p_emp", "se", "p_theory", "ratio", "ratio_lo", "ratio_hi", "mesh", "n", "method"});
    for (const auto& r : table.rows)
        csv::write_row(os, {csv::fmt(r.u), csv::fmt(r.p_emp), csv::fmt(r.se), csv::fmt(r.p_theory),
                            csv::fmt(r.ratio), csv::fmt(r.ratio_lo), csv::fmt(r.ratio_hi),
                            csv::fmt(r.mesh), std::to_string(r.n), r.method});
}

void emit_plotdata(const ComparisonTable& table, std::ostream& os) {
    if (table.rows.empty()) fail(ErrorKind::invalid_argument, "emit_plotdata: empty table");
    csv::write_row(os, {"u", "ratio", "ratio_lo", "ratio_hi"});
    for (const auto& r : table.rows)
        csv::write_row(os, {csv::fmt(r.u), csv::fmt(r.ratio), csv::fmt(r.ratio_lo), csv::fmt(r.ratio_hi)});
}

// --- localization -----------------------------------------------------------------------

double clopper_pearson_upper(std::size_t k, std::size_t n, double confidence) {
    if (n == 0 || k > n || !(confidence > 0.0 && confidence < 1.0))
        fail(ErrorKind::invalid_argument, "clopper_pearson_upper: bad arguments");
    if (k == n) return 1.0;
    boost::math::beta_distribution<double> dist(double(k) + 1.0, double(n - k));
    return boost::math::quantile(dist, confidence);
}

LocalizationReport localization_check(const ProcessSpec& spec, double u, double q, std::size_t n,
                                      std::uint64_t seed, const LocalizationConfig& cfg) {
    if (!(u > 0.0) || !(std::log(std::log(u)) > 0.0))
        fail(ErrorKind::asymptotic_domain, "localization_check: requires u > e");
    const RegimeParams p = spec.regime_params();
    LocalizationReport rep;
    rep.u = u;
    rep.q = q;
    rep.regime = p.regime();
    const bool use_d1 = p.b == 0.0 || p.gamma <= p.beta;
    rep.window = use_d1 ? "delta1" : "delta2";
    rep.delta = use_d1 ? delta1(u, p.gamma, q) : delta2(u, p.alpha0, p.beta);

    const auto& iv = spec.horizon();
    const double t0 = spec.t0();
    rep.inner_start = std::max(iv.start, t0 - rep.delta);
    rep.inner_end = std::min(iv.end, t0 + rep.delta);
    rep.mesh = cfg.mesh > 0.0 ? cfg.mesh : recommended_mesh(u, p.alpha0);

    auto points_on = [&](double a, double b) {
        const auto k = static_cast<std::size_t>(std::ceil((b - a) / rep.mesh));
        return std::max<std::size_t>(k, 1) + 1;
    };
    const Grid inner(rep.inner_start, rep.inner_end, points_on(rep.inner_start, rep.inner_end));
    const auto inner_sampler = make_sampler(spec, inner);
    rep.inner = importance_exceedance(*inner_sampler, u, n, seed, 0, cfg.tilt, cfg.exec);

    std::vector<double> outer;
    auto append = [&](double a, double b, bool include_b) {
        if (!(b > a)) return;
        const std::size_t k = points_on(a, b);
        for (std::size_t i = 0; i + (include_b ? 0 : 1) < k; ++i)
            outer.push_back(i + 1 == k ? b : a + (b - a) * double(i) / double(k - 1));
    };
    append(iv.start, rep.inner_start, false);
    if (rep.inner_end < iv.end) {
        const std::size_t before = outer.size();
        append(rep.inner_end, iv.end, true);
        // the first point coincides with the inner window's edge
        outer.erase(outer.begin() + static_cast<std::ptrdiff_t>(before));
    }

    rep.single_point = specfun::survival(u);
    rep.bound_shape = cfg.bound_constant * p.T * std::pow(u, 2.0 / p.alpha0) *
                      std::pow(std::log(u), -4.0 / (3.0 * p.beta)) * rep.single_point;
    if (outer.empty()) {
        rep.outer_empty = true;
        rep.outer_value = 0.0;
        rep.ratio = 0.0;
        return rep;
    }
    const auto outer_sampler = make_sampler(spec, outer);
    rep.outer = importance_exceedance(*outer_sampler, u, n, seed, 1, cfg.tilt, cfg.exec);
    if (rep.outer.p_hat > 0.0 && rep.outer.ess >= 0.01 * double(n)) {
        rep.outer_value = rep.outer.p_hat;
    } else {
        const auto crude = crude_exceedance(*outer_sampler, u, n, seed, 2, cfg.exec);
        rep.outer_is_bound = true;
        rep.outer_value = clopper_pearson_upper(crude.hits, crude.n);
    }
    rep.ratio = rep.outer_value / rep.inner.p_hat;
    return rep;
}

// --- Slepian sandwich ---------------------------------------------------------------------

SandwichReport slepian_sandwich(const ProcessSpec& spec, const SandwichConfig& cfg, std::uint64_t seed) {
    if (cfg.points < 2) fail(ErrorKind::invalid_argument, "sandwich: need at least two grid points");
    const RegimeParams p = spec.regime_params();
    SandwichReport rep;
    rep.u = cfg.u;
    rep.nu = cfg.nu;
    rep.S = cfg.S;
    rep.window = localization_window(p, cfg.u, cfg.q);
    rep.lower_exponent = p.alpha0 + 2.0 * p.b * std::pow(rep.window, p.beta);
    rep.time_scale = std::pow(cfg.u, -2.0 / p.alpha0);

    const Grid grid(0.0, cfg.S, cfg.points);
    const auto s = grid.points();
    const auto& iv = spec.horizon();
    const double t0 = spec.t0();
    const double span = cfg.S * rep.time_scale;
    double dir = 1.0;
    if (t0 + span > iv.end) {
        if (t0 - span < iv.start) fail(ErrorKind::invalid_argument, "sandwich: S u^{-2/alpha} does not fit in the horizon");
        dir = -1.0;
    }
    const auto n = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd target(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        target(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = spec.correlation(t0 + dir * s[i] * rep.time_scale, t0 + dir * s[j] * rep.time_scale);
            target(i, j) = v;
            target(j, i) = v;
        }
    }
    auto lower = comparison_process_cov(ComparisonKind::lower, cfg.nu, cfg.u, p, cfg.S, rep.window, grid);
    auto upper = comparison_process_cov(ComparisonKind::upper, cfg.nu, cfg.u, p, cfg.S, rep.window, grid);
    rep.lower_cov_gap = (target - lower.matrix()).maxCoeff();
    rep.upper_cov_gap = (upper.matrix() - target).maxCoeff();
    auto tcov = CovarianceMatrix::factorize(s, std::move(target), grid);

    const DenseSampler ls(std::move(lower)), ts(std::move(tcov)), us(std::move(upper));
    rep.lower = crude_exceedance(ls, cfg.u, cfg.n, seed, 0, cfg.exec);
    rep.target = crude_exceedance(ts, cfg.u, cfg.n, seed, 1, cfg.exec);
    rep.upper = crude_exceedance(us, cfg.u, cfg.n, seed, 2, cfg.exec);
    auto pooled = [](const ExceedanceStats& a, const ExceedanceStats& b) {
        return 3.0 * std::hypot(a.std_error, b.std_error);
    };
    rep.ordered = rep.lower.p_hat <= rep.target.p_hat + pooled(rep.lower, rep.target) &&
                  rep.target.p_hat <= rep.upper.p_hat + pooled(rep.target, rep.upper);
    return rep;
}

}  // namespace lsx
