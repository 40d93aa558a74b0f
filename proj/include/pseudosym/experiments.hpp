#pragma once

// Step-size sweeps of the symplectic defect, power-law fits in log-log space
// and long-run energy-drift measurement.
//
// Sweep points are independent; `run_sweep_serial` is the reference
// implementation and `run_sweep_parallel` distributes points over OpenMP
// threads. Both return rows sorted by (M, M1, M2, h) and must agree bitwise.

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <string>
#include <utility>
#include <vector>

#include "pseudosym/defect.hpp"

namespace pseudosym {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;      // C in value ~ C h^slope
    double rms_residual = 0.0;   // in log space
    std::size_t points_used = 0;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordinary least squares of log(value) against log(h). Needs >= 3 pairs,
/// positive values and at least two distinct h.
FitResult loglog_fit(const std::vector<std::pair<double, double>>& pairs);

/// Measured norms below this are at the rounding floor and excluded from fits.
inline constexpr double kRoundingFloor = 1e-13;

/// loglog_fit over the pairs whose value is >= floor; throws FitError when
/// fewer than three survive.
FitResult loglog_fit_above_floor(const std::vector<std::pair<double, double>>& pairs,
                                 double floor = kRoundingFloor);

/// `count` log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Default defect-sweep grid: 10 points in [0.02, 0.2].
std::vector<double> default_h_grid();

struct DefectRow {
    SchemeConfig cfg;
    double delta = 0.0;
    double alpha = 0.0;
    double skew_residual = 0.0;
    double jtilde_norm = 0.0;
    double det_flow = 0.0;
    double det_antidiag = 0.0;
    double tl_norm = 0.0;
    double br_norm = 0.0;
    /// Frobenius norms of the blocks of J~ - J: P11, P12, P21, P22.
    std::array<double, 4> perturbation_norms{};
};

DefectRow evaluate_point(const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& at);

std::vector<DefectRow> run_sweep_serial(const Hamiltonian& ham, const std::vector<SchemeConfig>& points,
                                        const PhaseState& at);
/// jobs <= 0 uses the OpenMP default thread count.
std::vector<DefectRow> run_sweep_parallel(const Hamiltonian& ham, const std::vector<SchemeConfig>& points,
                                          const PhaseState& at, int jobs);

/// One configuration per (M, h) for SE-type schemes, or per h for SV schemes
/// (which use base.M1/base.M2).
std::vector<SchemeConfig> sweep_points(const SchemeConfig& base, const std::vector<int>& m_list,
                                       const std::vector<double>& h_grid);

struct SweepFit {
    SchemeConfig cfg;  // h unused
    std::optional<FitResult> delta;  // nullopt when refused (below rounding floor)
    std::optional<FitResult> alpha;
    std::optional<FitResult> volume;  // |det D Theta - 1|
};

struct DefectSweep {
    std::vector<DefectRow> rows;
    std::vector<SweepFit> fits;  // one per iteration setting, in row order
};

DefectSweep defect_sweep(const Hamiltonian& ham, const SchemeConfig& base, const std::vector<int>& m_list,
                         const std::vector<double>& h_grid, const PhaseState& at, int jobs = 1);

struct BlockOrders {
    Scheme variant;
    int m1;
    int m2;
    std::array<std::optional<FitResult>, 4> blocks;  // P11, P12, P21, P22
};

/// Fits the four blocks of J~ - J for both Stormer-Verlet variants.
std::vector<BlockOrders> sv_block_orders(const Hamiltonian& ham, int m1, int m2,
                                         const std::vector<double>& h_grid, const PhaseState& at,
                                         int jobs = 1);

enum class DriftClass { Bounded, Drifting, Unclassified };
std::string_view drift_class_name(DriftClass c) noexcept;

struct DriftSeries {
    SchemeConfig cfg;
    std::vector<std::size_t> steps;
    std::vector<double> times;
    std::vector<double> abs_energy_error;
    std::optional<std::size_t> blowup_step;
    DriftClass classification = DriftClass::Unclassified;
};

struct DriftOptions {
    double h = 0.25;
    std::size_t steps = 300'000;
    std::size_t stride = 100;
    double blowup_factor = 1e3;
    double burn_in_fraction = 0.01;
};

/// Drifting if the final-decile mean is >= 10x the first-decile mean;
/// bounded if the max over the last half is <= 2x the max over the first
/// half. Both measured after the burn-in. A blown-up run is drifting.
DriftClass classify_drift(const std::vector<double>& abs_error, double burn_in_fraction,
                          bool blew_up);

/// Mean of the last 10% of samples after burn-in.
double final_decile_mean(const std::vector<double>& abs_error, double burn_in_fraction);
double first_decile_mean(const std::vector<double>& abs_error, double burn_in_fraction);

/// One trajectory per scheme (h and step counts from opts, iteration counts
/// from each config); schemes run concurrently when jobs != 1.
std::vector<DriftSeries> energy_drift_run(const Hamiltonian& ham, const std::vector<SchemeConfig>& schemes,
                                          const PhaseState& initial, const DriftOptions& opts, int jobs = 1);

} // namespace pseudosym
