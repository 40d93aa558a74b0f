#include "pseudosym/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "pseudosym/oracle.hpp"

namespace pseudosym {

namespace {

std::string fit_text(const std::optional<FitResult>& fit)
{
    if (!fit) return "refused (below rounding floor)";
    char buf[128];
    std::snprintf(buf, sizeof buf, "slope %.5f  C %.4g  (%zu points)", fit->slope, fit->intercept, fit->points_used);
    return buf;
}

std::vector<double> configured_grid(const RunConfig& cfg) { return log_grid(cfg.h_min, cfg.h_max, cfg.h_count); }

SchemeConfig configured_scheme(const RunConfig& cfg, double default_h)
{
    SchemeConfig s = cfg.scheme;
    s.h = cfg.h.value_or(default_h);
    return s;
}

} // namespace

CommandResult cmd_trajectory(const RunConfig& cfg)
{
    const auto ham = make_hamiltonian(cfg);
    const SchemeConfig scheme = configured_scheme(cfg, 0.1);
    scheme.validate();
    const PhaseState z0 = initial_state(cfg, *ham);
    const Trajectory traj = integrate(*ham, scheme, z0, {cfg.steps.value_or(10'000), cfg.stride, 0.0});

    CommandResult r;
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    r.csv = csv.str();
    std::ostringstream sum;
    sum << "trajectory: " << model_name(cfg.model) << ", " << scheme_name(scheme.variant) << ", h = " << scheme.h
        << ", " << traj.steps.back() << " steps, " << traj.states.size() << " samples\n";
    sum << "energy error at end: " << std::abs(traj.energies.back() - traj.energies.front()) << '\n';
    if (const auto* tok = dynamic_cast<const TokamakModel*>(ham.get())) {
        sum << "positions in units of L0 = " << tok->scales().length << " m, time in units of T0 = "
            << tok->scales().time << " s\n";
    }
    r.summary = sum.str();
    return r;
}

CommandResult cmd_defect_sweep(const RunConfig& cfg)
{
    const auto ham = make_hamiltonian(cfg);
    const PhaseState at = initial_state(cfg, *ham);
    const DefectSweep sweep = defect_sweep(*ham, cfg.scheme, cfg.m_list, configured_grid(cfg), at, cfg.jobs);

    CommandResult r;
    std::ostringstream csv;
    write_defect_csv(csv, sweep.rows);
    r.csv = csv.str();
    std::ostringstream sum;
    sum << "defect sweep: " << model_name(cfg.model) << ", " << scheme_name(cfg.scheme.variant) << '\n';
    for (const auto& f : sweep.fits) {
        sum << "  M=" << f.cfg.M << " M1=" << f.cfg.M1 << " M2=" << f.cfg.M2 << '\n'
            << "    delta: " << fit_text(f.delta) << '\n'
            << "    alpha: " << fit_text(f.alpha) << '\n';
    }
    r.summary = sum.str();
    return r;
}

CommandResult cmd_jtilde(const RunConfig& cfg)
{
    const auto ham = make_hamiltonian(cfg);
    const SchemeConfig scheme = configured_scheme(cfg, 0.1);
    scheme.validate();
    const DefectReport rep = analyze_defect(*ham, scheme, initial_state(cfg, *ham));

    CommandResult r;
    std::ostringstream csv;
    write_matrix_csv(csv, rep.jtilde);
    r.csv = csv.str();
    std::ostringstream sum;
    sum << "J~ for " << scheme_name(scheme.variant) << " on " << model_name(cfg.model) << ", h = " << scheme.h
        << '\n'
        << "  delta = " << format_double(rep.delta) << "\n  alpha = " << format_double(rep.alpha)
        << "\n  max |top-left| = " << format_double(max_abs(rep.blocks.tl))
        << "\n  max |bottom-right| = " << format_double(max_abs(rep.blocks.br))
        << "\n  skew residual = " << format_double(rep.skew_residual) << '\n';
    r.summary = sum.str();
    return r;
}

CommandResult cmd_energy_drift(const RunConfig& cfg)
{
    const auto ham = make_hamiltonian(cfg);
    DriftOptions opts;
    opts.h = cfg.h.value_or(kDriftStep);
    opts.steps = cfg.steps.value_or(cfg.full_scale ? kDriftStepsFull : kDriftStepsCi);
    opts.stride = cfg.stride > 1 ? cfg.stride : std::max<std::size_t>(1, opts.steps / 3000);

    std::vector<SchemeConfig> schemes;
    if (cfg.model == ModelKind::Tokamak) {
        SchemeConfig lin;
        lin.variant = Scheme::LinearImplicitEM;
        schemes.push_back(lin);
        for (int m : {2, 3}) {
            SchemeConfig q;
            q.variant = Scheme::QImplicitSE;
            q.M = m;
            schemes.push_back(q);
        }
    } else {
        for (int m : cfg.m_list) {
            SchemeConfig s = cfg.scheme;
            s.M = m;
            schemes.push_back(s);
        }
    }
    const auto series = energy_drift_run(*ham, schemes, initial_state(cfg, *ham), opts, cfg.jobs);

    CommandResult r;
    std::ostringstream csv;
    write_drift_csv(csv, series);
    r.csv = csv.str();
    std::ostringstream sum;
    sum << "energy drift: h = " << opts.h << ", " << opts.steps << " steps\n";
    for (const auto& s : series) {
        sum << "  " << scheme_name(s.cfg.variant);
        if (s.cfg.uses_fpi()) sum << " M=" << s.cfg.M;
        sum << ": " << drift_class_name(s.classification)
            << "  (first-decile mean " << first_decile_mean(s.abs_energy_error, opts.burn_in_fraction)
            << ", final-decile mean " << final_decile_mean(s.abs_energy_error, opts.burn_in_fraction) << ")";
        if (s.blowup_step) sum << "  blow-up at step " << *s.blowup_step;
        sum << '\n';
    }
    r.summary = sum.str();
    return r;
}

CommandResult cmd_optimality(const RunConfig& cfg)
{
    const std::vector<double> hs = cfg.h ? std::vector<double>{*cfg.h} : std::vector<double>{0.1, 0.01};
    CommandResult r;
    std::ostringstream csv;
    csv << "N,M,h,max_rel_error,max_abs_zero\n";
    double worst_rel = 0.0;
    double worst_abs = 0.0;
    for (std::size_t n : {2u, 3u, 5u}) {
        const QuadraticModel model(n);
        RunConfig local = cfg;
        local.n = n;
        local.q0.reset();
        local.p0.reset();
        const PhaseState at = initial_state(local, model);
        for (int m : cfg.m_list) {
            for (double h : hs) {
                SchemeConfig s;
                s.variant = Scheme::PImplicitSE;
                s.M = m;
                s.h = h;
                const DefectReport rep = analyze_defect(model, s, at);
                const OptimalDefectBlocks exact = optimal_defect_blocks(n, static_cast<unsigned>(m), h);
                const OracleComparison d = compare_entries(rep.blocks.tl, exact.diag_block, exact.diag_zero);
                const OracleComparison a =
                    compare_entries(rep.blocks.tr, exact.antidiag_block, exact.antidiag_zero);
                const double rel = std::max(d.max_rel_error, a.max_rel_error);
                const double abs0 = std::max(d.max_abs_zero, a.max_abs_zero);
                worst_rel = std::max(worst_rel, rel);
                worst_abs = std::max(worst_abs, abs0);
                csv << n << ',' << m << ',' << format_double(h) << ',' << format_double(rel) << ','
                    << format_double(abs0) << '\n';
            }
        }
    }
    r.csv = csv.str();
    r.ok = worst_rel <= 1e-9 && worst_abs <= 1e-13;
    std::ostringstream sum;
    sum << "optimality: max relative error " << format_double(worst_rel) << ", max |error| on zero entries "
        << format_double(worst_abs) << (r.ok ? "  [ok]" : "  [exceeds 1e-9 / 1e-13]") << '\n';
    r.summary = sum.str();
    return r;
}

CommandResult cmd_sv_orders(const RunConfig& cfg)
{
    const auto ham = make_hamiltonian(cfg);
    const auto orders = sv_block_orders(*ham, cfg.scheme.M1, cfg.scheme.M2, configured_grid(cfg),
                                        initial_state(cfg, *ham), cfg.jobs);
    CommandResult r;
    std::ostringstream csv;
    std::ostringstream sum;
    csv << "scheme,M1,M2,block,slope,intercept,rms_residual,points_used\n";
    sum << "SV block orders on " << model_name(cfg.model) << '\n';
    static constexpr const char* kBlocks[] = {"P11", "P12", "P21", "P22"};
    for (const auto& o : orders) {
        for (std::size_t b = 0; b < 4; ++b) {
            const auto& f = o.blocks[b];
            csv << scheme_name(o.variant) << ',' << o.m1 << ',' << o.m2 << ',' << kBlocks[b] << ',';
            if (f) {
                csv << format_double(f->slope) << ',' << format_double(f->intercept) << ','
                    << format_double(f->rms_residual) << ',' << f->points_used << '\n';
            } else {
                csv << ",,,0\n";
            }
            sum << "  " << scheme_name(o.variant) << " M1=" << o.m1 << " M2=" << o.m2 << ' ' << kBlocks[b] << ": "
                << fit_text(f) << '\n';
        }
    }
    r.csv = csv.str();
    r.summary = sum.str();
    return r;
}

CommandResult cmd_volume(const RunConfig& cfg)
{
    const auto ham = make_hamiltonian(cfg);
    const PhaseState at = initial_state(cfg, *ham);
    const DefectSweep sweep = defect_sweep(*ham, cfg.scheme, cfg.m_list, configured_grid(cfg), at, cfg.jobs);

    CommandResult r;
    std::ostringstream csv;
    csv << "scheme,M,h,det_flow,det_antidiag,discrepancy\n";
    double worst = 0.0;
    for (const auto& row : sweep.rows) {
        const double disc = std::abs(std::abs(row.det_flow) - row.det_antidiag);
        worst = std::max(worst, disc / row.det_antidiag);
        csv << scheme_name(row.cfg.variant) << ',' << row.cfg.M << ',' << format_double(row.cfg.h) << ','
            << format_double(row.det_flow) << ',' << format_double(row.det_antidiag) << ','
            << format_double(disc) << '\n';
    }
    r.csv = csv.str();
    std::ostringstream sum;
    sum << "volume: max relative discrepancy " << format_double(worst) << '\n';
    for (const auto& f : sweep.fits) {
        sum << "  M=" << f.cfg.M << " |det - 1|: " << fit_text(f.volume) << '\n';
    }
    r.summary = sum.str();
    return r;
}

CommandResult cmd_selftest(const RunConfig&)
{
    std::vector<std::pair<std::string, std::function<bool()>>> checks;

    checks.emplace_back("symplectic J: det 1, J^2 = -I", [] {
        const Matrix j = symplectic_J(3);
        return std::abs(determinant(j) - 1.0) <= 1e-15 && j * j == -Matrix::identity(6);
    });
    checks.emplace_back("zero diagonal block and skew-symmetry, all models", [] {
        const QuadraticModel quad(3);
        const HarmonicOscillator harm(2);
        const TokamakModel tok;
        const std::vector<std::pair<const Hamiltonian*, PhaseState>> cases{
            {&quad, PhaseState{{0.5, 1.0 / 3.0, 0.25}, {1.0 / 3.0, -0.25, 0.2}}},
            {&harm, PhaseState{{0.5, 1.0 / 3.0}, {1.0 / 3.0, -0.25}}},
            {&tok, tok.reference_state()}};
        for (const auto& [ham, at] : cases) {
            for (Scheme s : {Scheme::PImplicitSE, Scheme::QImplicitSE}) {
                for (int m = 1; m <= 3; ++m) {
                    for (double h : {0.02, 0.2}) {
                        const DefectReport rep = analyze_defect(*ham, SchemeConfig{s, h, m, 1, 1, {}}, at);
                        const double zero = s == Scheme::PImplicitSE ? rep.br_norm : rep.tl_norm;
                        if (zero > 1e-12 || rep.skew_residual > 1e-12 * frobenius_norm(rep.jtilde)) return false;
                    }
                }
            }
        }
        return true;
    });
    checks.emplace_back("AD and analytic Jacobians agree", [] {
        const QuadraticModel quad(3);
        const TokamakModel tok;
        const PhaseState zq{{0.5, 1.0 / 3.0, 0.25}, {1.0 / 3.0, -0.25, 0.2}};
        for (Scheme s : {Scheme::PImplicitSE, Scheme::QImplicitSE, Scheme::SvPQ, Scheme::SvQP}) {
            const SchemeConfig c{s, 0.1, 2, 1, 3, {}};
            for (const auto& [ham, at] : {std::pair<const Hamiltonian*, PhaseState>{&quad, zq},
                                          std::pair<const Hamiltonian*, PhaseState>{&tok, tok.reference_state()}}) {
                const Matrix ad = flow_jacobian_ad(*ham, c, at);
                const Matrix an = flow_jacobian_analytic(*ham, c, at);
                if (frobenius_norm(ad - an) > 1e-10 * frobenius_norm(ad)) return false;
            }
        }
        return true;
    });
    checks.emplace_back("closed-form defect blocks of the quadratic model", [] {
        RunConfig cfg;
        cfg.model = ModelKind::Quadratic;
        return cmd_optimality(cfg).ok;
    });
    checks.emplace_back("Toeplitz structure and wrap-around relation of Xi^M, N <= 8, M <= 6", [] {
        for (std::size_t n = 2; n <= 8; ++n) {
            for (unsigned m = 1; m <= 6; ++m) {
                const ToeplitzCheck c = check_toeplitz(xi_power(n, m).matrix);
                if (!c.toeplitz || !c.relation) return false;
            }
        }
        return true;
    });
    checks.emplace_back("coordinate swap commutes", [] {
        const TokamakModel tok;
        for (int m = 1; m <= 3; ++m) {
            if (coordinate_swap_check(tok, 0.05, m, tok.reference_state()) > 1e-13) return false;
        }
        return true;
    });
    checks.emplace_back("log-log fit recovers 3 h^2", [] {
        std::vector<std::pair<double, double>> pts;
        for (double h : default_h_grid()) pts.emplace_back(h, 3.0 * h * h);
        const FitResult f = loglog_fit(pts);
        return std::abs(f.slope - 2.0) <= 1e-10 && std::abs(f.intercept - 3.0) <= 1e-10;
    });

    CommandResult r;
    std::ostringstream sum;
    for (const auto& [name, fn] : checks) {
        bool pass = false;
        try {
            pass = fn();
        } catch (const std::exception& e) {
            sum << "  error: " << e.what() << '\n';
        }
        sum << (pass ? "PASS  " : "FAIL  ") << name << '\n';
        r.ok = r.ok && pass;
    }
    r.summary = sum.str();
    return r;
}

const std::vector<std::string_view>& command_names()
{
    static const std::vector<std::string_view> names{"trajectory", "defect-sweep", "jtilde", "energy-drift",
                                                     "optimality", "sv-orders",    "volume", "selftest"};
    return names;
}

int run_command(std::string_view name, const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    static const std::map<std::string_view, CommandResult (*)(const RunConfig&)> table{
        {"trajectory", cmd_trajectory}, {"defect-sweep", cmd_defect_sweep}, {"jtilde", cmd_jtilde},
        {"energy-drift", cmd_energy_drift}, {"optimality", cmd_optimality}, {"sv-orders", cmd_sv_orders},
        {"volume", cmd_volume},         {"selftest", cmd_selftest},
    };
    const auto it = table.find(name);
    if (it == table.end()) {
        err << "error: unknown command '" << name << "'\n";
        return 2;
    }
    CommandResult result;
    try {
        cfg.validate();
        result = it->second(cfg);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    try {
        if (!result.csv.empty()) {
            if (cfg.out.empty()) {
                out << result.csv;
            } else {
                write_file_atomic(cfg.out, result.csv);
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    err << result.summary;
    return result.ok ? 0 : 1;
}

} // namespace pseudosym
