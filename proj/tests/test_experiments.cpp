#include "doctest.h"

#include <cmath>

#include "pseudosym/experiments.hpp"

using namespace pseudosym;

namespace {

const PhaseState kQuadState{{0.5, 1.0 / 3.0, 0.25}, {1.0 / 3.0, -0.25, 0.2}};

std::vector<std::pair<double, double>> power_law(double c, double p)
{
    std::vector<std::pair<double, double>> pts;
    for (double h : default_h_grid()) pts.emplace_back(h, c * std::pow(h, p));
    return pts;
}

} // namespace

TEST_CASE("fit of an exact power law")
{
    const FitResult f = loglog_fit(power_law(3.0, 2.0));
    CHECK(std::abs(f.slope - 2.0) <= 1e-10);
    CHECK(std::abs(f.intercept - 3.0) <= 1e-10);
    CHECK(f.rms_residual <= 1e-12);
    CHECK(f.points_used == 10);
}

TEST_CASE("fit of constant values has slope 0")
{
    CHECK(std::abs(loglog_fit(power_law(0.7, 0.0)).slope) <= 1e-12);
}

TEST_CASE("fit errors")
{
    CHECK_THROWS_AS(loglog_fit({{0.1, 1.0}, {0.2, 2.0}}), FitError);
    CHECK_THROWS_AS(loglog_fit({{0.1, 1.0}, {0.2, 0.0}, {0.3, 1.0}}), FitError);
    CHECK_THROWS_AS(loglog_fit({{0.1, 1.0}, {0.1, 2.0}, {0.1, 3.0}}), FitError);
}

TEST_CASE("rounding floor filter")
{
    auto pts = power_law(1e-12, 2.0);  // every value below the floor
    CHECK_THROWS_AS(loglog_fit_above_floor(pts), FitError);
    pts = power_law(1.0, 2.0);
    pts.front().second = 1e-15;
    const FitResult f = loglog_fit_above_floor(pts);
    CHECK(f.points_used == 9);
    CHECK(std::abs(f.slope - 2.0) <= 1e-10);
}

TEST_CASE("log grid")
{
    const auto g = log_grid(0.02, 0.2, 10);
    CHECK(g.size() == 10);
    CHECK(g.front() == 0.02);
    CHECK(g.back() == 0.2);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(10.0, 1.0 / 9.0)));
    CHECK_THROWS_AS(log_grid(0.2, 0.02, 10), std::invalid_argument);
}

TEST_CASE("quadratic sweep recovers slope M + 1")
{
    const QuadraticModel m(3);
    SchemeConfig base;
    base.variant = Scheme::PImplicitSE;
    const DefectSweep s = defect_sweep(m, base, {1, 2, 3}, default_h_grid(), kQuadState);
    REQUIRE(s.fits.size() == 3);
    for (const auto& f : s.fits) {
        REQUIRE(f.delta.has_value());
        REQUIRE(f.alpha.has_value());
        CHECK(std::abs(f.delta->slope - (f.cfg.M + 1)) <= 1e-6);
        CHECK(std::abs(f.alpha->slope - (f.cfg.M + 1)) <= 1e-6);
    }
}

TEST_CASE("exactly symplectic scheme: fits are refused")
{
    const QuadraticModel m(3);
    SchemeConfig base;
    base.variant = Scheme::ExactSEQuadratic;
    const DefectSweep s = defect_sweep(m, base, {1}, default_h_grid(), kQuadState);
    REQUIRE(s.fits.size() == 1);
    CHECK_FALSE(s.fits[0].delta.has_value());
    CHECK_FALSE(s.fits[0].alpha.has_value());
}

TEST_CASE("parallel sweep equals the serial sweep bitwise")
{
    const TokamakModel tok;
    SchemeConfig base;
    const auto points = sweep_points(base, {1, 2, 3}, default_h_grid());
    CHECK(points.size() == 30);
    const auto serial = run_sweep_serial(tok, points, tok.reference_state());
    for (int jobs : {0, 2, 4}) {
        const auto parallel = run_sweep_parallel(tok, points, tok.reference_state(), jobs);
        REQUIRE(parallel.size() == serial.size());
        for (std::size_t i = 0; i < serial.size(); ++i) {
            CHECK(parallel[i].cfg.M == serial[i].cfg.M);
            CHECK(parallel[i].cfg.h == serial[i].cfg.h);
            CHECK(parallel[i].delta == serial[i].delta);
            CHECK(parallel[i].alpha == serial[i].alpha);
            CHECK(parallel[i].det_flow == serial[i].det_flow);
        }
    }
    for (std::size_t i = 1; i < serial.size(); ++i) {
        const bool ordered = serial[i - 1].cfg.M < serial[i].cfg.M ||
                             (serial[i - 1].cfg.M == serial[i].cfg.M && serial[i - 1].cfg.h < serial[i].cfg.h);
        CHECK(ordered);
    }
}

TEST_CASE("tokamak q-implicit M = 2 slope is near 3.15")
{
    const TokamakModel tok;
    SchemeConfig base;
    const DefectSweep s = defect_sweep(tok, base, {2}, default_h_grid(), tok.reference_state());
    REQUIRE(s.fits[0].delta.has_value());
    CHECK(std::abs(s.fits[0].delta->slope - 3.15148) <= 0.1);
}

TEST_CASE("SV block orders on the quadratic model")
{
    const QuadraticModel m(3);
    const auto orders = sv_block_orders(m, 1, 3, default_h_grid(), kQuadState);
    REQUIRE(orders.size() == 2);
    for (const auto& o : orders) {
        for (const auto& b : o.blocks) REQUIRE(b.has_value());
    }
    // Upsilon: P22 carries the M2 + 1 order; Lambda: P11 does.
    CHECK(std::abs(orders[0].blocks[3]->slope - 4.0) <= 0.4);
    CHECK(std::abs(orders[0].blocks[0]->slope - 2.0) <= 0.4);
    CHECK(std::abs(orders[1].blocks[0]->slope - 4.0) <= 0.4);
    CHECK(std::abs(orders[1].blocks[3]->slope - 2.0) <= 0.4);
    // Equal counts: every block decays at least like h^{M+1}. For M = 1 and
    // M = 3 all four slopes sit at M + 1; for M = 2 the off-diagonal blocks
    // of this model decay one order faster.
    for (int k = 1; k <= 3; ++k) {
        const auto eq = sv_block_orders(m, k, k, default_h_grid(), kQuadState);
        for (const auto& o : eq) {
            for (std::size_t b = 0; b < 4; ++b) {
                const double slope = o.blocks[b]->slope;
                CHECK(slope >= k + 1 - 0.4);
                if (k != 2 || b == 0 || b == 3) CHECK(std::abs(slope - (k + 1)) <= 0.4);
            }
        }
    }
}

TEST_CASE("drift classification")
{
    std::vector<double> flat(1000, 1.0);
    CHECK(classify_drift(flat, 0.01, false) == DriftClass::Bounded);
    std::vector<double> growing(1000);
    for (std::size_t i = 0; i < growing.size(); ++i) growing[i] = 1e-3 * static_cast<double>(i + 1);
    CHECK(classify_drift(growing, 0.01, false) == DriftClass::Drifting);
    CHECK(classify_drift(flat, 0.01, true) == DriftClass::Drifting);
    std::vector<double> mild(1000);
    for (std::size_t i = 0; i < mild.size(); ++i) {
        const double x = static_cast<double>(i) / 1000.0;
        mild[i] = 1.0 + 8.0 * x * x;
    }
    CHECK(classify_drift(mild, 0.01, false) == DriftClass::Unclassified);
    CHECK(drift_class_name(DriftClass::Bounded) == "bounded");
}

TEST_CASE("small-step leapfrog on the oscillator is bounded")
{
    const HarmonicOscillator osc(1);
    DriftOptions opts;
    opts.h = 0.01;
    opts.steps = 20'000;
    opts.stride = 10;
    SchemeConfig sv;
    sv.variant = Scheme::SvPQ;
    const auto series = energy_drift_run(osc, {sv}, PhaseState{{1.0}, {0.0}}, opts);
    CHECK(series[0].classification == DriftClass::Bounded);
    CHECK_THROWS_AS(energy_drift_run(osc, {sv}, PhaseState{{1.0}, {0.0}}, DriftOptions{0.01, 100, 1, 0, 0.01}),
                    std::invalid_argument);
}

TEST_CASE("q-implicit drift grows with the integration window")
{
    // Doubling the window at fixed h about doubles the late-time error.
    const TokamakModel tok;
    SchemeConfig q2;
    q2.M = 2;
    DriftOptions opts;
    opts.steps = 1'500'000;
    opts.stride = 500;
    const auto s = energy_drift_run(tok, {q2}, tok.reference_state(), opts)[0];
    const std::size_t n = s.abs_energy_error.size();
    std::vector<double> half(s.abs_energy_error.begin(), s.abs_energy_error.begin() + static_cast<long>(n / 2));
    const double ratio = final_decile_mean(s.abs_energy_error, 0.01) / final_decile_mean(half, 0.01);
    MESSAGE("late-time drift ratio ", ratio);
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 3.0);
}
