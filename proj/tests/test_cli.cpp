#include "lsx/cli.hpp"
#include "lsx/error.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace lsx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "lsx-test-cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int invoke(std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

fs::path write_json(const fs::path& dir, const json& j) {
    const auto p = dir / "config.json";
    std::ofstream(p) << j.dump();
    return p;
}

json ou_process() {
    return json::parse(R"({"family": "powexp", "horizon": [0, 1], "t0": 0.5,
                           "variance": {"kind": "constant"}, "index": {"alpha0": 1}})");
}

json small_compare() {
    return {{"command", "compare"},
            {"seed", 5},
            {"process", ou_process()},
            {"compare", {{"u", {3.0, 4.0}}, {"n", 2000}, {"max_points", 128}}}};
}

}  // namespace

TEST_CASE("unknown keys are rejected with their path") {
    auto doc = small_compare();
    doc["compare"]["tilt_policy"] = "mixture";
    try {
        cli::parse_config(doc);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(e.path() == "compare.tilt_policy");
    }
    doc = small_compare();
    doc["process"]["variance"]["gama"] = 1;
    CHECK_THROWS_WITH_AS(cli::parse_config(doc), doctest::Contains("process.variance.gama"), ConfigError);
}

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(cli::parse_config(json{{"command", "bogus"}}), ConfigError);
    auto doc = small_compare();
    doc["compare"]["n"] = -3;
    CHECK_THROWS_AS(cli::parse_config(doc), ConfigError);
    doc = small_compare();
    doc.erase("process");
    CHECK_THROWS_AS(cli::parse_config(doc), ConfigError);
    doc = json{{"command", "pickands"}, {"process", ou_process()}};
    CHECK_THROWS_AS(cli::parse_config(doc), ConfigError);
}

TEST_CASE("defaults are filled and the echo parses back to itself") {
    const auto cfg = cli::parse_config(json{{"command", "pickands"}, {"pickands", {{"alpha", 1.0}}}});
    CHECK(cfg.seed == 1);
    CHECK(cfg.out == "lsx-out");
    const auto& p = cfg.doc.at("pickands");
    CHECK(p.at("method") == "mixture");
    CHECK(p.at("mesh").get<double>() == doctest::Approx(1.0 / 64));
    CHECK(p.at("S").size() == 5);

    const auto again = cli::parse_config(cfg.doc);
    CHECK(again.doc == cfg.doc);
    const auto full = cli::parse_config(small_compare());
    CHECK(cli::parse_config(full.doc).doc == full.doc);
}

TEST_CASE("asympt run reports the tail formula") {
    const auto dir = scratch("asympt");
    const auto cfg = cli::load_config(fs::path(LSX_CONFIG_DIR) / "asympt_theorem1.json");
    const auto res = cli::run(cfg, dir);
    const auto& r = res.report;
    CHECK(r.at("command") == "asympt");
    CHECK(r.contains("versions"));
    CHECK(r.contains("seed_lineage"));
    CHECK(r.at("config") == cfg.doc);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "timing.json"));
    CHECK(fs::exists(dir / "asympt.csv"));
    CHECK(json::parse(slurp(dir / "report.json")) == r);
}

TEST_CASE("compare run writes the comparison columns") {
    const auto dir = scratch("compare");
    cli::run(cli::parse_config(small_compare()), dir);
    std::istringstream in(slurp(dir / "comparison.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "u,p_emp,se,p_theory,ratio,ratio_lo,ratio_hi,mesh,n,method");
    std::istringstream plot(slurp(dir / "plotdata.csv"));
    std::getline(plot, header);
    CHECK(header == "u,ratio,ratio_lo,ratio_hi");
}

TEST_CASE("reruns are byte-identical across thread counts") {
    const auto cfg = cli::parse_config(small_compare());
    const auto a = scratch("rerun-a"), b = scratch("rerun-b");
    cli::run(cfg, a, Exec::serial);
    cli::run(cfg, b, Exec::parallel);
    for (const char* f : {"report.json", "comparison.csv", "plotdata.csv"})
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
}

TEST_CASE("tail run can export paths") {
    const auto dir = scratch("tail");
    json doc{{"command", "tail"},
             {"process", ou_process()},
             {"tail", {{"u", 3.0}, {"n", 2000}, {"points", 64}, {"export_paths", 3}}}};
    cli::run(cli::parse_config(doc), dir);
    std::istringstream in(slurp(dir / "paths.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,value,path_id");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 3 * 64);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    const auto out = (dir / "out").string();

    const auto good = write_json(dir, small_compare()).string();
    CHECK(invoke({"lsx", "compare", "--config", good, "--out", out, "--threads", "1"}) == 0);
    CHECK(fs::exists(fs::path(out) / "report.json"));

    auto bad = small_compare();
    bad["compare"]["bogus"] = 1;
    const auto bad_path = write_json(dir, bad).string();
    CHECK(invoke({"lsx", "compare", "--config", bad_path, "--out", out}) == 1);

    CHECK(invoke({"lsx", "compare", "--config", (dir / "missing.json").string()}) == 1);
    CHECK(invoke({"lsx", "nonsense"}) == 1);
    CHECK(invoke({"lsx", "tail", "--config", good, "--out", out}) == 1);  // command mismatch

    // below the asymptotic domain: numeric, not config
    auto low = small_compare();
    low["compare"]["u"] = {2.0, 2.5};
    const auto low_path = write_json(dir, low).string();
    CHECK(invoke({"lsx", "compare", "--config", low_path, "--out", out}) == 2);

    auto formula = json::parse(slurp(fs::path(LSX_CONFIG_DIR) / "asympt_theorem1.json"));
    formula["asympt"]["u"] = {2.0};
    CHECK(invoke({"lsx", "asympt", "--config", write_json(dir, formula).string(), "--out", out}) == 2);

    // theorem1 without a variance maximum is a schema contradiction
    json flat{{"command", "asympt"},
              {"process", {{"family", "powexp"}, {"horizon", {0, 1}}, {"t0", 0.5},
                           {"variance", {{"kind", "constant"}}}, {"index", {{"alpha0", 1}}}}},
              {"asympt", {{"formula", "theorem1"}}}};
    CHECK(invoke({"lsx", "asympt", "--config", write_json(dir, flat).string(), "--out", out}) == 1);
}

TEST_CASE("shipped configs parse") {
    for (const auto& e : fs::directory_iterator(LSX_CONFIG_DIR)) {
        CAPTURE(e.path().string());
        CHECK_NOTHROW(cli::load_config(e.path()));
    }
}
