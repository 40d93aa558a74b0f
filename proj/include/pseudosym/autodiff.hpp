#pragma once

// Jacobians of phase-space maps. `jacobian` runs the map once on dual numbers
// carrying 2N directions; `finite_difference_jacobian` is the independent
// central-difference cross-check.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pseudosym/dual.hpp"
#include "pseudosym/linalg.hpp"
#include "pseudosym/phase_state.hpp"

namespace pseudosym {

class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Seeds `at` as 2N independent variables.
inline AdPhaseState seed_variables(const PhaseState& at)
{
    require_consistent(at);
    const std::size_t n = at.dim();
    AdPhaseState z;
    z.q.reserve(n);
    z.p.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        z.q.push_back(AdScalar::variable(at.q[i], i, 2 * n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        z.p.push_back(AdScalar::variable(at.p[i], n + i, 2 * n));
    }
    return z;
}

inline PhaseState values_of(const AdPhaseState& z)
{
    PhaseState out;
    for (const auto& x : z.q) out.q.push_back(x.value());
    for (const auto& x : z.p) out.p.push_back(x.value());
    return out;
}

/// Row i, column j holds d(output_i)/d(input_j), coordinates ordered (q, p).
/// `map` must accept an AdPhaseState and return one of the same dimension.
template <class Map>
Matrix jacobian(Map&& map, const PhaseState& at)
{
    for (double x : flatten(at)) {
        if (!std::isfinite(x)) {
            throw NonFiniteError("jacobian: evaluation point has non-finite entries");
        }
    }
    const std::size_t n = at.dim();
    const AdPhaseState out = map(seed_variables(at));
    if (out.q.size() != n || out.p.size() != n) {
        throw DimensionError("jacobian: map changed the phase-space dimension");
    }
    Matrix jac(2 * n, 2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) {
        const AdScalar& y = i < n ? out.q[i] : out.p[i - n];
        if (!all_finite(y)) {
            throw NonFiniteError("jacobian: output component " + std::to_string(i) +
                                 " is not finite");
        }
        for (std::size_t j = 0; j < 2 * n; ++j) {
            jac(i, j) = y.derivative(j);
        }
    }
    return jac;
}

/// Central differences with per-coordinate step `step * max(1, |z_j|)`.
/// Truncation error is O(step^2).
template <class Map>
Matrix finite_difference_jacobian(Map&& map, const PhaseState& at, double step = 1e-6)
{
    if (!(step > 0.0)) {
        throw std::invalid_argument("finite_difference_jacobian: step must be positive");
    }
    const std::vector<double> z0 = flatten(at);
    const std::size_t dim = z0.size();
    Matrix jac(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const double hj = step * std::max(1.0, std::abs(z0[j]));
        std::vector<double> plus = z0;
        std::vector<double> minus = z0;
        plus[j] += hj;
        minus[j] -= hj;
        const std::vector<double> fp = flatten(map(unflatten(plus)));
        const std::vector<double> fm = flatten(map(unflatten(minus)));
        const double width = plus[j] - minus[j];
        for (std::size_t i = 0; i < dim; ++i) {
            jac(i, j) = (fp[i] - fm[i]) / width;
            if (!std::isfinite(jac(i, j))) {
                throw NonFiniteError("finite_difference_jacobian: output component " +
                                     std::to_string(i) + " is not finite");
            }
        }
    }
    return jac;
}

} // namespace pseudosym
