#include "pseudosym/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pseudosym {

FitResult loglog_fit(const std::vector<std::pair<double, double>>& pairs)
{
    if (pairs.size() < 3) {
        throw FitError("loglog_fit: need at least 3 points, got " + std::to_string(pairs.size()));
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& [h, v] : pairs) {
        if (!(h > 0.0) || !(v > 0.0) || !std::isfinite(h) || !std::isfinite(v)) {
            throw FitError("loglog_fit: step sizes and values must be positive and finite");
        }
        xs.push_back(std::log(h));
        ys.push_back(std::log(v));
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 1e-24 * n)) {
        throw FitError("loglog_fit: degenerate step-size grid");
    }
    FitResult fit;
    fit.slope = sxy / sxx;
    const double log_c = my - fit.slope * mx;
    fit.intercept = std::exp(log_c);
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (log_c + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    fit.points_used = xs.size();
    return fit;
}

FitResult loglog_fit_above_floor(const std::vector<std::pair<double, double>>& pairs, double floor)
{
    std::vector<std::pair<double, double>> kept;
    std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(kept),
                 [floor](const auto& pr) { return pr.second >= floor; });
    if (kept.size() < 3) {
        throw FitError("fit refused: only " + std::to_string(kept.size()) +
                       " points above the rounding floor");
    }
    return loglog_fit(kept);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count)
{
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
        throw std::invalid_argument("log_grid: need 0 < lo < hi and count >= 2");
    }
    std::vector<double> grid(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> default_h_grid() { return log_grid(0.02, 0.2, 10); }

DefectRow evaluate_point(const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& at)
{
    const DefectReport r = analyze_defect(ham, cfg, at);
    DefectRow row;
    row.cfg = cfg;
    row.delta = r.delta;
    row.alpha = r.alpha;
    row.skew_residual = r.skew_residual;
    row.jtilde_norm = frobenius_norm(r.jtilde);
    row.det_flow = r.det_flow;
    row.det_antidiag = r.det_antidiag;
    row.tl_norm = r.tl_norm;
    row.br_norm = r.br_norm;
    const Block2x2 pert = r.perturbation();
    row.perturbation_norms = {frobenius_norm(pert.tl), frobenius_norm(pert.tr), frobenius_norm(pert.bl),
                              frobenius_norm(pert.br)};
    return row;
}

namespace {

auto row_key(const SchemeConfig& c) { return std::make_tuple(static_cast<int>(c.variant), c.M, c.M1, c.M2, c.h); }

void sort_rows(std::vector<DefectRow>& rows)
{
    std::stable_sort(rows.begin(), rows.end(),
                     [](const DefectRow& a, const DefectRow& b) { return row_key(a.cfg) < row_key(b.cfg); });
}

} // namespace

std::vector<DefectRow> run_sweep_serial(const Hamiltonian& ham, const std::vector<SchemeConfig>& points,
                                        const PhaseState& at)
{
    std::vector<DefectRow> rows;
    rows.reserve(points.size());
    for (const auto& cfg : points) {
        rows.push_back(evaluate_point(ham, cfg, at));
    }
    sort_rows(rows);
    return rows;
}

std::vector<DefectRow> run_sweep_parallel(const Hamiltonian& ham, const std::vector<SchemeConfig>& points,
                                          const PhaseState& at, int jobs)
{
    std::vector<DefectRow> rows(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    const auto count = static_cast<long>(points.size());
#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#else
    (void)jobs;
#endif
    for (long i = 0; i < count; ++i) {
        try {
            rows[static_cast<std::size_t>(i)] = evaluate_point(ham, points[static_cast<std::size_t>(i)], at);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    sort_rows(rows);
    return rows;
}

std::vector<SchemeConfig> sweep_points(const SchemeConfig& base, const std::vector<int>& m_list,
                                       const std::vector<double>& h_grid)
{
    std::vector<SchemeConfig> out;
    const std::vector<int> ms = base.is_sv() || !base.uses_fpi() ? std::vector<int>{base.M} : m_list;
    for (int m : ms) {
        for (double h : h_grid) {
            SchemeConfig c = base;
            c.M = m;
            c.h = h;
            c.validate();
            out.push_back(c);
        }
    }
    return out;
}

namespace {

std::optional<FitResult> try_fit(const std::vector<std::pair<double, double>>& pairs)
{
    try {
        return loglog_fit_above_floor(pairs);
    } catch (const FitError&) {
        return std::nullopt;
    }
}

bool same_setting(const SchemeConfig& a, const SchemeConfig& b)
{
    return a.variant == b.variant && a.M == b.M && a.M1 == b.M1 && a.M2 == b.M2 && a.side == b.side;
}

} // namespace

DefectSweep defect_sweep(const Hamiltonian& ham, const SchemeConfig& base, const std::vector<int>& m_list,
                         const std::vector<double>& h_grid, const PhaseState& at, int jobs)
{
    if (h_grid.size() < 3) {
        throw std::invalid_argument("defect_sweep: h grid needs at least 3 points");
    }
    const std::vector<SchemeConfig> points = sweep_points(base, m_list, h_grid);
    DefectSweep sweep;
    sweep.rows = jobs == 1 ? run_sweep_serial(ham, points, at) : run_sweep_parallel(ham, points, at, jobs);

    for (std::size_t i = 0; i < sweep.rows.size();) {
        std::size_t j = i;
        std::vector<std::pair<double, double>> delta;
        std::vector<std::pair<double, double>> alpha;
        std::vector<std::pair<double, double>> volume;
        while (j < sweep.rows.size() && same_setting(sweep.rows[j].cfg, sweep.rows[i].cfg)) {
            const DefectRow& r = sweep.rows[j];
            delta.emplace_back(r.cfg.h, r.delta);
            alpha.emplace_back(r.cfg.h, r.alpha);
            volume.emplace_back(r.cfg.h, std::abs(r.det_flow - 1.0));
            ++j;
        }
        sweep.fits.push_back({sweep.rows[i].cfg, try_fit(delta), try_fit(alpha), try_fit(volume)});
        i = j;
    }
    return sweep;
}

std::vector<BlockOrders> sv_block_orders(const Hamiltonian& ham, int m1, int m2,
                                         const std::vector<double>& h_grid, const PhaseState& at, int jobs)
{
    std::vector<BlockOrders> out;
    for (Scheme variant : {Scheme::SvPQ, Scheme::SvQP}) {
        SchemeConfig base;
        base.variant = variant;
        base.M1 = m1;
        base.M2 = m2;
        const std::vector<SchemeConfig> points = sweep_points(base, {}, h_grid);
        const std::vector<DefectRow> rows =
            jobs == 1 ? run_sweep_serial(ham, points, at) : run_sweep_parallel(ham, points, at, jobs);
        BlockOrders orders{variant, m1, m2, {}};
        for (std::size_t b = 0; b < 4; ++b) {
            std::vector<std::pair<double, double>> pairs;
            for (const auto& r : rows) pairs.emplace_back(r.cfg.h, r.perturbation_norms[b]);
            orders.blocks[b] = try_fit(pairs);
        }
        out.push_back(orders);
    }
    return out;
}

std::string_view drift_class_name(DriftClass c) noexcept
{
    switch (c) {
    case DriftClass::Bounded:
        return "bounded";
    case DriftClass::Drifting:
        return "drifting";
    case DriftClass::Unclassified:
        break;
    }
    return "unclassified";
}

namespace {

std::size_t burn_in_count(std::size_t n, double fraction)
{
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
}

double mean_of(std::vector<double>::const_iterator first, std::vector<double>::const_iterator last)
{
    const auto n = std::distance(first, last);
    return n > 0 ? std::accumulate(first, last, 0.0) / static_cast<double>(n) : 0.0;
}

} // namespace

double first_decile_mean(const std::vector<double>& abs_error, double burn_in_fraction)
{
    const std::size_t start = std::min(burn_in_count(abs_error.size(), burn_in_fraction), abs_error.size());
    const std::size_t len = std::max<std::size_t>(1, (abs_error.size() - start) / 10);
    const auto first = abs_error.begin() + static_cast<std::ptrdiff_t>(start);
    return mean_of(first, first + static_cast<std::ptrdiff_t>(std::min(len, abs_error.size() - start)));
}

double final_decile_mean(const std::vector<double>& abs_error, double burn_in_fraction)
{
    const std::size_t start = std::min(burn_in_count(abs_error.size(), burn_in_fraction), abs_error.size());
    const std::size_t len = std::min(std::max<std::size_t>(1, (abs_error.size() - start) / 10),
                                     abs_error.size() - start);
    return mean_of(abs_error.end() - static_cast<std::ptrdiff_t>(len), abs_error.end());
}

DriftClass classify_drift(const std::vector<double>& abs_error, double burn_in_fraction, bool blew_up)
{
    if (blew_up) {
        return DriftClass::Drifting;
    }
    const std::size_t start = std::min(burn_in_count(abs_error.size(), burn_in_fraction), abs_error.size());
    if (abs_error.size() - start < 20) {
        return DriftClass::Unclassified;
    }
    const double early = first_decile_mean(abs_error, burn_in_fraction);
    const double late = final_decile_mean(abs_error, burn_in_fraction);
    if (late >= 10.0 * early) {
        return DriftClass::Drifting;
    }
    const auto begin = abs_error.begin() + static_cast<std::ptrdiff_t>(start);
    const auto mid = begin + static_cast<std::ptrdiff_t>((abs_error.size() - start) / 2);
    const double first_max = *std::max_element(begin, mid);
    const double last_max = *std::max_element(mid, abs_error.end());
    if (last_max <= 2.0 * first_max) {
        return DriftClass::Bounded;
    }
    return DriftClass::Unclassified;
}

namespace {

DriftSeries run_one_drift(const Hamiltonian& ham, SchemeConfig cfg, const PhaseState& initial,
                          const DriftOptions& opts)
{
    cfg.h = opts.h;
    DriftSeries series;
    series.cfg = cfg;
    double h0 = 0.0;
    IntegrateOptions io{opts.steps, opts.stride, opts.blowup_factor};
    series.blowup_step = integrate_streaming(
        ham, cfg, initial, io, [&](std::size_t n, double t, const PhaseState&, double energy) {
            if (n == 0) h0 = energy;
            series.steps.push_back(n);
            series.times.push_back(t);
            series.abs_energy_error.push_back(std::abs(energy - h0));
        });
    series.classification =
        classify_drift(series.abs_energy_error, opts.burn_in_fraction, series.blowup_step.has_value());
    return series;
}

} // namespace

std::vector<DriftSeries> energy_drift_run(const Hamiltonian& ham, const std::vector<SchemeConfig>& schemes,
                                          const PhaseState& initial, const DriftOptions& opts, int jobs)
{
    if (opts.steps < 10'000) {
        throw std::invalid_argument("energy_drift_run: needs at least 1e4 steps");
    }
    std::vector<DriftSeries> out(schemes.size());
    std::vector<std::exception_ptr> errors(schemes.size());
    const auto count = static_cast<long>(schemes.size());
#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (jobs != 1)
#else
    (void)jobs;
#endif
    for (long i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = run_one_drift(ham, schemes[k], initial, opts);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

} // namespace pseudosym
