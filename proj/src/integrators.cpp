#include "pseudosym/integrators.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace pseudosym {

namespace {

constexpr std::array<std::pair<Scheme, std::string_view>, 6> kSchemeNames{{
    {Scheme::PImplicitSE, "p-implicit"},
    {Scheme::QImplicitSE, "q-implicit"},
    {Scheme::SvPQ, "sv-pq"},
    {Scheme::SvQP, "sv-qp"},
    {Scheme::LinearImplicitEM, "linear-implicit"},
    {Scheme::ExactSEQuadratic, "exact-se"},
}};

} // namespace

std::string_view scheme_name(Scheme s) noexcept
{
    for (const auto& [scheme, name] : kSchemeNames) {
        if (scheme == s) return name;
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept
{
    for (const auto& [scheme, n] : kSchemeNames) {
        if (n == name) return scheme;
    }
    return std::nullopt;
}

void SchemeConfig::validate() const
{
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("h: step size must be positive and finite");
    }
    if ((variant == Scheme::PImplicitSE || variant == Scheme::QImplicitSE) && M < 1) {
        throw std::invalid_argument("M: iteration count must be >= 1");
    }
    if (is_sv() && (M1 < 1 || M2 < 1)) {
        throw std::invalid_argument("M1/M2: iteration counts must be >= 1");
    }
}

std::optional<std::size_t> integrate_streaming(
    const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& initial,
    const IntegrateOptions& opts,
    const std::function<void(std::size_t, double, const PhaseState&, double)>& sink)
{
    cfg.validate();
    if (opts.steps < 1 || opts.stride < 1) {
        throw std::invalid_argument("integrate: steps and stride must be >= 1");
    }
    require_consistent(initial);

    PhaseState z = initial;
    const double h0 = ham.value(z);
    sink(0, 0.0, z, h0);
    const double limit = opts.blowup_factor * std::abs(h0);

    for (std::size_t n = 1; n <= opts.steps; ++n) {
        try {
            z = step(ham, cfg, z);
        } catch (const std::exception& e) {
            throw StepError("step " + std::to_string(n) + ": " + e.what());
        }
        const bool sampled = n % opts.stride == 0 || n == opts.steps;
        const bool watch = opts.blowup_factor > 0.0;
        if (!sampled && !watch) {
            continue;
        }
        const double energy = ham.value(z);
        const bool blown = watch && !(std::abs(energy - h0) <= limit);
        if (sampled || blown) {
            sink(n, static_cast<double>(n) * cfg.h, z, energy);
        }
        if (blown) {
            return n;
        }
    }
    return std::nullopt;
}

Trajectory integrate(const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& initial,
                     const IntegrateOptions& opts)
{
    Trajectory traj;
    const std::size_t expected = opts.stride ? opts.steps / opts.stride + 2 : 0;
    traj.steps.reserve(expected);
    traj.times.reserve(expected);
    traj.states.reserve(expected);
    traj.energies.reserve(expected);
    traj.stopped_at = integrate_streaming(
        ham, cfg, initial, opts, [&](std::size_t n, double t, const PhaseState& z, double energy) {
            traj.steps.push_back(n);
            traj.times.push_back(t);
            traj.states.push_back(z);
            traj.energies.push_back(energy);
        });
    return traj;
}

} // namespace pseudosym
