#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pseudosym/commands.hpp"

using namespace pseudosym;

namespace {

std::filesystem::path scratch_dir()
{
    const auto dir = std::filesystem::temp_directory_path() / "pseudosym_test_io";
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<std::vector<double>> parse_csv_body(const std::string& csv)
{
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST_CASE("config text parsing")
{
    const RunConfig cfg = parse_config_text(R"(
# defect sweep of the quadratic model
hamiltonian = quadratic
scheme = p-implicit   # trailing comment
N = 4
M_list = 1, 2
h_min = 0.01
h_max = 0.1
h_count = 8
steps = 3e5
)");
    CHECK(cfg.model == ModelKind::Quadratic);
    CHECK(cfg.scheme.variant == Scheme::PImplicitSE);
    CHECK(cfg.n == 4);
    CHECK(cfg.m_list == std::vector<int>{1, 2});
    CHECK(cfg.h_min == 0.01);
    CHECK(cfg.h_count == 8);
    CHECK(cfg.steps == std::size_t{300000});
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config errors name the field")
{
    CHECK_THROWS_WITH_AS(parse_config_text("hamiltonian = kepler"), doctest::Contains("hamiltonian"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("h = abc"), doctest::Contains("h:"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("\n\nbogus = 1"), doctest::Contains("line 3"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("no equals sign"), ConfigError);

    RunConfig cfg;
    cfg.h = 0.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("h"), ConfigError);
    cfg = RunConfig{};
    cfg.model = ModelKind::Quadratic;
    cfg.n = 1;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("N"), ConfigError);
    cfg = RunConfig{};
    cfg.scheme.variant = Scheme::ExactSEQuadratic;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("scheme"), ConfigError);
    cfg = RunConfig{};
    cfg.q0 = Vec<double>{1, 2};
    cfg.p0 = Vec<double>{1, 2};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("q0"), ConfigError);
    cfg = RunConfig{};
    cfg.params.b0 = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("17 significant digits")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("defect CSV header")
{
    std::ostringstream os;
    write_defect_csv(os, {});
    CHECK(os.str() == "scheme,M,M1,M2,h,delta,alpha,skew_residual,det_flow,det_antidiag\n");
    std::ostringstream ds;
    write_drift_csv(ds, {});
    CHECK(ds.str() == "scheme,M,step,t,abs_energy_error\n");
}

TEST_CASE("trajectory command: rows and header")
{
    RunConfig cfg;
    cfg.steps = 100;
    cfg.stride = 10;
    const CommandResult r = cmd_trajectory(cfg);
    CHECK(r.csv.rfind("step,t,q1,q2,q3,p1,p2,p3,H\n", 0) == 0);
    CHECK(parse_csv_body(r.csv).size() == 11);
}

TEST_CASE("trajectories stay inside the vessel")
{
    // Over a window of 2e4 steps at h = 0.1: |z| <= R and |rho - R| <= R.
    for (Scheme s : {Scheme::QImplicitSE, Scheme::LinearImplicitEM}) {
        RunConfig cfg;
        cfg.scheme.variant = s;
        cfg.steps = 20'000;
        cfg.stride = 100;
        const auto rows = parse_csv_body(cmd_trajectory(cfg).csv);
        const TokamakModel tok;
        const double l0 = tok.scales().length;
        const double big_r = tok.params().major_radius;
        for (const auto& row : rows) {
            const double x = row[2] * l0;
            const double y = row[3] * l0;
            const double z = row[4] * l0;
            CHECK(std::abs(z) <= big_r);
            CHECK(std::abs(std::hypot(x, y) - big_r) <= big_r);
        }
    }
}

TEST_CASE("jtilde command default")
{
    const CommandResult r = cmd_jtilde(RunConfig{});
    const auto rows = parse_csv_body("header\n" + r.csv);
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(std::abs(rows[i][j]) <= 1e-14);
            CHECK(std::abs(rows[i][j + 3] - (i == j ? 1.0 : 0.0)) <= 1e-9);
        }
    }
}

TEST_CASE("optimality command default grid")
{
    RunConfig cfg;
    cfg.model = ModelKind::Quadratic;
    const CommandResult r = cmd_optimality(cfg);
    CHECK(r.ok);
    CHECK(parse_csv_body(r.csv).size() == 3 * 3 * 2);
}

TEST_CASE("selftest passes")
{
    const CommandResult r = cmd_selftest(RunConfig{});
    INFO(r.summary);
    CHECK(r.ok);
}

TEST_CASE("identical configs give identical output")
{
    RunConfig cfg;
    cfg.model = ModelKind::Tokamak;
    cfg.jobs = 0;
    const std::string a = cmd_defect_sweep(cfg).csv;
    cfg.jobs = 1;
    const std::string b = cmd_defect_sweep(cfg).csv;
    CHECK(a == b);
    CHECK(std::count(a.begin(), a.end(), '\n') == 31);
}

TEST_CASE("run_command exit codes and files")
{
    const auto dir = scratch_dir();
    const auto out = dir / "defect.csv";
    std::filesystem::remove(out);
    std::ostringstream so;
    std::ostringstream se;

    RunConfig bad;
    bad.h = -1.0;
    bad.out = out.string();
    CHECK(run_command("jtilde", bad, so, se) == 2);
    CHECK_FALSE(std::filesystem::exists(out));
    CHECK(se.str().find("h") != std::string::npos);

    CHECK(run_command("no-such-command", RunConfig{}, so, se) == 2);

    RunConfig far;
    far.q0 = Vec<double>{1e-12, 0.0, 0.0};  // on the symmetry axis
    far.p0 = Vec<double>{0.0, 0.0, 0.0};
    far.out = out.string();
    CHECK(run_command("jtilde", far, so, se) == 1);
    CHECK_FALSE(std::filesystem::exists(out));

    RunConfig good;
    good.out = out.string();
    CHECK(run_command("defect-sweep", good, so, se) == 0);
    REQUIRE(std::filesystem::exists(out));
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "scheme,M,M1,M2,h,delta,alpha,skew_residual,det_flow,det_antidiag");
}

TEST_CASE("config file plus overrides")
{
    const auto path = scratch_dir() / "run.cfg";
    {
        std::ofstream f(path);
        f << "hamiltonian = quadratic\nN = 5\nh = 0.05\n";
    }
    RunConfig cfg = load_config_file(path.string());
    apply_setting(cfg, "N", "2");
    CHECK(cfg.n == 2);
    CHECK(cfg.h == 0.05);
    CHECK_THROWS_AS(load_config_file((scratch_dir() / "missing.cfg").string()), ConfigError);
}
