#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pseudosym/dual.hpp"

namespace pseudosym {

template <class S>
using Vec = std::vector<S>;

/// Scalar used for Jacobians of flow maps: one dual direction per phase-space
/// coordinate.
using AdScalar = Dual<double>;

/// Position/momentum pair of equal dimension N.
template <class S>
struct BasicPhaseState {
    Vec<S> q;
    Vec<S> p;

    std::size_t dim() const noexcept { return q.size(); }

    friend bool operator==(const BasicPhaseState&, const BasicPhaseState&) = default;
};

using PhaseState = BasicPhaseState<double>;
using AdPhaseState = BasicPhaseState<AdScalar>;

inline void require_consistent(const PhaseState& z)
{
    if (z.q.size() != z.p.size()) {
        throw std::invalid_argument("phase state: q and p have different dimensions");
    }
}

/// Flattens to (q_1..q_N, p_1..p_N).
inline std::vector<double> flatten(const PhaseState& z)
{
    std::vector<double> out(z.q);
    out.insert(out.end(), z.p.begin(), z.p.end());
    return out;
}

inline PhaseState unflatten(const std::vector<double>& z)
{
    if (z.size() % 2 != 0) {
        throw std::invalid_argument("phase state: flattened vector has odd length");
    }
    const auto n = static_cast<std::ptrdiff_t>(z.size() / 2);
    return {{z.begin(), z.begin() + n}, {z.begin() + n, z.end()}};
}

} // namespace pseudosym
