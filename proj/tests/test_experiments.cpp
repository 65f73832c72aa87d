#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "degenera/experiments.hpp"

using namespace degenera;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmpdir(const std::string& leaf) {
    auto p = std::filesystem::temp_directory_path() / "degenera_tests" / leaf;
    std::filesystem::remove_all(p);
    return p.string();
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("config parser: values, lists, diagnostics") {
    Config cfg = Config::parse_string("# comment\n"
                                      "command = verify\n"
                                      "seed = 7\n"
                                      "mesh.cells = 48\n"
                                      "n_list = 4, 8, 16\n"
                                      "name = inverse square\n");
    CHECK(cfg.get_string("command") == "verify");
    CHECK(cfg.get_int("seed") == 7);
    CHECK(cfg.get_number("mesh.cells") == 48.0);
    CHECK(cfg.get_int_list_or("n_list", {}) == std::vector<int>{4, 8, 16});
    CHECK(cfg.get_string("name") == "inverse square");
    CHECK(cfg.get_number_or("absent", 1.5) == 1.5);

    CHECK_THROWS_AS(Config::parse_string("novalue\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("a = 1\na = 2\n"), ConfigError);
    try {
        Config::parse_string("ok = 1\nbroken line\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
    }
    Config bad = Config::parse_string("x = notanumber\n");
    CHECK_THROWS_AS(bad.get_number("x"), ConfigError);
}

TEST_CASE("run config: unknown command is rejected, overrides apply") {
    Config cfg = Config::parse_string("command = warp\n");
    CHECK_THROWS_AS(RunConfig::from_config(cfg), ConfigError);

    Config ok = Config::parse_string("command = verify\nseed = 3\noutput_dir = a\n");
    RunConfig rc = RunConfig::from_config(ok, "b", "9");
    CHECK(rc.seed == 9);
    CHECK(rc.output_dir == "b");
}

TEST_CASE("csv emitter: fixed schema, 17 digits, LF endings") {
    CsvTable t;
    t.header = {"a", "b"};
    t.rows.push_back({format_g17(1.0 / 3.0), "x"});
    std::string s = t.to_text();
    CHECK(s == "a,b\n0.33333333333333331,x\n");
    CHECK(s.find('\r') == std::string::npos);

    CsvTable empty;
    empty.header = {"level", "mass"};
    CHECK(empty.to_text() == "level,mass\n"); // header-only for an empty table
}

TEST_CASE("verify pipeline: section-3 example passes, wrong sign exits 2") {
    std::string out = tmpdir("verify");
    Config cfg = Config::parse_file("configs/verify.cfg");
    cfg.set("output_dir", out);
    RunReport rep = run(RunConfig::from_config(cfg));
    CHECK(rep.exit_code == 0);
    std::string csv = slurp(out + "/residuals.csv");
    CHECK(csv.rfind("kind,alpha,residual,scale,relative,holds\n", 0) == 0);
    CHECK(csv.find("weak_derivative") != std::string::npos);
    CHECK(csv.find("leibniz") != std::string::npos);
    CHECK(csv.find("ibp") != std::string::npos);
    CHECK(slurp(out + "/report.txt").find("verdict: pass") != std::string::npos);

    std::string out2 = tmpdir("verify_bad");
    Config bad = Config::parse_file("configs/verify_wrong_sign.cfg");
    bad.set("output_dir", out2);
    RunReport rep2 = run(RunConfig::from_config(bad));
    CHECK(rep2.exit_code == 2);
    CHECK(rep2.verdict.find("wrong-sign") != std::string::npos);
}

TEST_CASE("inequality pipeline: (7.2) violation exits 2 and names the condition") {
    std::string out = tmpdir("ineq_violating");
    Config cfg = Config::parse_file("configs/inequality_violating.cfg");
    cfg.set("output_dir", out);
    RunReport rep = run(RunConfig::from_config(cfg));
    CHECK(rep.exit_code == 2);
    CHECK(rep.verdict.find("(7.2)") != std::string::npos);
    CHECK(slurp(out + "/report.txt").find("(7.2)") != std::string::npos);
}

TEST_CASE("poincare pipeline: reference check against 1/pi") {
    std::string out = tmpdir("poincare");
    Config cfg = Config::parse_file("configs/poincare.cfg");
    cfg.set("output_dir", out);
    cfg.set("cells_list", "16, 32, 64");
    RunReport rep = run(RunConfig::from_config(cfg));
    CHECK(rep.exit_code == 0);
    std::string csv = slurp(out + "/poincare.csv");
    CHECK(csv.rfind("cells,dofs,estimate\n", 0) == 0);
}

TEST_CASE("determinism: identical config and seed produce identical bytes") {
    Config cfg = Config::parse_file("configs/inequality_oned.cfg");
    cfg.set("samples", "20");
    std::string out1 = tmpdir("det1"), out2 = tmpdir("det2");
    Config c1 = cfg, c2 = cfg;
    c1.set("output_dir", out1);
    c2.set("output_dir", out2);
    RunReport r1 = run(RunConfig::from_config(c1));
    RunReport r2 = run(RunConfig::from_config(c2));
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    CHECK(slurp(out1 + "/margins.csv") == slurp(out2 + "/margins.csv"));

    // a different seed changes the draws
    Config c3 = cfg;
    std::string out3 = tmpdir("det3");
    c3.set("output_dir", out3);
    RunReport r3 = run(RunConfig::from_config(c3, "", "777"));
    CHECK(r3.exit_code == 0);
    CHECK(slurp(out1 + "/margins.csv") != slurp(out3 + "/margins.csv"));
}

TEST_CASE("identical config bytes give identical report bytes") {
    Config cfg = Config::parse_file("configs/poincare.cfg");
    cfg.set("cells_list", "16, 32");
    std::string out = tmpdir("repbytes");
    cfg.set("output_dir", out);
    Config copy = cfg;
    RunReport r1 = run(RunConfig::from_config(cfg));
    std::string first = slurp(out + "/report.txt");
    RunReport r2 = run(RunConfig::from_config(copy));
    CHECK(r1.exit_code == r2.exit_code);
    CHECK(first == slurp(out + "/report.txt"));
}

TEST_CASE("density pipeline: decreasing norms and growth exponents") {
    std::string out = tmpdir("density");
    Config cfg = Config::parse_file("configs/density.cfg");
    cfg.set("output_dir", out);
    cfg.set("n_list", "4, 8, 16, 32");
    cfg.set("mesh.cells", "96");
    RunReport rep = run(RunConfig::from_config(cfg));
    CHECK(rep.exit_code == 0);
    CHECK(slurp(out + "/density_norms.csv").rfind("n,w_norm,ratio_prev\n", 0) == 0);
    CHECK(slurp(out + "/growth_fit.csv").rfind("sigma_order,fitted_exponent,C\n", 0) == 0);
}

TEST_CASE("example8 pipeline: beta = -1/2 fails hypothesis (4) with exit 2") {
    std::string out = tmpdir("ex8neg");
    Config cfg = Config::parse_file("configs/example8_beta_neg.cfg");
    cfg.set("output_dir", out);
    RunReport rep = run(RunConfig::from_config(cfg));
    CHECK(rep.exit_code == 2);
    CHECK(rep.verdict.find("hypothesis (4)") != std::string::npos);
    CHECK(slurp(out + "/report.txt").find("hyp (4) k v^-2 not in L1_loc: false") !=
          std::string::npos);
}

} // TEST_SUITE
