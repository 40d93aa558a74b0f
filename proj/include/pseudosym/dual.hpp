#pragma once

// Forward-mode dual numbers with a multi-directional derivative part.
//
// Dual<T, W> carries a value of type T and W directional derivatives of type
// T. W == kDynamicWidth selects heap storage sized at runtime; a dynamic dual
// with an empty gradient is a constant (all derivatives zero), which lets
// generic code write `S(1.0) + x` without knowing the width. T may itself be
// a Dual, giving nested (second-order) derivatives.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace pseudosym {

inline constexpr int kDynamicWidth = 0;

template <class T, int W = kDynamicWidth>
class Dual;

template <class S>
struct is_dual : std::false_type {};
template <class T, int W>
struct is_dual<Dual<T, W>> : std::true_type {};
template <class S>
inline constexpr bool is_dual_v = is_dual<S>::value;

template <class T, int W>
class Dual {
public:
    using value_type = T;
    using storage_type =
        std::conditional_t<W == kDynamicWidth, std::vector<T>, std::array<T, std::size_t(W > 0 ? W : 1)>>;

    Dual() : value_(0.0) { zero_fill(); }
    Dual(double v) : value_(v) { zero_fill(); } // NOLINT: implicit by design of generic code
    template <class U = T, std::enable_if_t<!std::is_same_v<U, double>, int> = 0>
    Dual(const T& v) : value_(v) // NOLINT
    {
        zero_fill();
    }
    Dual(T v, storage_type grad) : value_(std::move(v)), grad_(std::move(grad)) {}

    /// Independent variable: derivative 1 in direction `index` of `width`.
    static Dual variable(T v, std::size_t index, std::size_t width)
    {
        Dual d(std::move(v));
        if constexpr (W == kDynamicWidth) {
            d.grad_.assign(width, T(0.0));
        } else if (width != std::size_t(W)) {
            throw std::invalid_argument("Dual::variable: width does not match static width");
        }
        d.grad_.at(index) = T(1.0);
        return d;
    }

    const T& value() const noexcept { return value_; }
    T& value() noexcept { return value_; }
    const storage_type& grad() const noexcept { return grad_; }
    storage_type& grad() noexcept { return grad_; }

    std::size_t width() const noexcept { return grad_.size(); }
    bool is_constant() const noexcept { return width() == 0; }

    /// d/d(direction i); zero for constants.
    T derivative(std::size_t i) const { return i < grad_.size() ? grad_[i] : T(0.0); }

    /// Result with value `v` and gradient `dv * x.grad` (chain rule for f(x)).
    static Dual chain(T v, const T& dv, const Dual& x)
    {
        Dual out(std::move(v), x.grad_);
        for (auto& g : out.grad_) {
            g = dv * g;
        }
        return out;
    }

    /// Result with value `v` and gradient `da * a.grad + db * b.grad`.
    static Dual chain2(T v, const T& da, const Dual& a, const T& db, const Dual& b)
    {
        Dual out(std::move(v));
        if constexpr (W == kDynamicWidth) {
            if (a.is_constant()) {
                return chain(std::move(out.value_), db, b);
            }
            if (b.is_constant()) {
                return chain(std::move(out.value_), da, a);
            }
            if (a.width() != b.width()) {
                throw std::invalid_argument("Dual: gradient widths differ within one computation");
            }
            out.grad_.resize(a.width());
        }
        for (std::size_t i = 0; i < out.grad_.size(); ++i) {
            out.grad_[i] = da * a.grad_[i] + db * b.grad_[i];
        }
        return out;
    }

    Dual& operator+=(const Dual& o) { return *this = *this + o; }
    Dual& operator-=(const Dual& o) { return *this = *this - o; }
    Dual& operator*=(const Dual& o) { return *this = *this * o; }
    Dual& operator/=(const Dual& o) { return *this = *this / o; }

    friend Dual operator+(const Dual& a, const Dual& b)
    {
        return chain2(a.value_ + b.value_, T(1.0), a, T(1.0), b);
    }
    friend Dual operator-(const Dual& a, const Dual& b)
    {
        return chain2(a.value_ - b.value_, T(1.0), a, T(-1.0), b);
    }
    friend Dual operator*(const Dual& a, const Dual& b)
    {
        return chain2(a.value_ * b.value_, b.value_, a, a.value_, b);
    }
    friend Dual operator/(const Dual& a, const Dual& b)
    {
        const T inv = T(1.0) / b.value_;
        const T q = a.value_ * inv;
        return chain2(q, inv, a, T(0.0) - q * inv, b);
    }
    friend Dual operator-(const Dual& a) { return chain(T(0.0) - a.value_, T(-1.0), a); }
    friend Dual operator+(const Dual& a) { return a; }

private:
    void zero_fill()
    {
        if constexpr (W != kDynamicWidth) {
            grad_.fill(T(0.0));
        }
    }

    T value_;
    storage_type grad_{};
};

// Mixed operations with plain doubles. For T == double these resolve through
// the implicit constructor; for nested duals they avoid building constants.
template <class T, int W, std::enable_if_t<!std::is_same_v<T, double>, int> = 0>
Dual<T, W> operator*(const Dual<T, W>& a, double s)
{
    return Dual<T, W>::chain(a.value() * s, T(s), a);
}
template <class T, int W, std::enable_if_t<!std::is_same_v<T, double>, int> = 0>
Dual<T, W> operator*(double s, const Dual<T, W>& a)
{
    return a * s;
}
template <class T, int W, std::enable_if_t<!std::is_same_v<T, double>, int> = 0>
Dual<T, W> operator+(const Dual<T, W>& a, double s)
{
    return Dual<T, W>(a.value() + s, a.grad());
}
template <class T, int W, std::enable_if_t<!std::is_same_v<T, double>, int> = 0>
Dual<T, W> operator+(double s, const Dual<T, W>& a)
{
    return a + s;
}
template <class T, int W, std::enable_if_t<!std::is_same_v<T, double>, int> = 0>
Dual<T, W> operator-(const Dual<T, W>& a, double s)
{
    return Dual<T, W>(a.value() - s, a.grad());
}
template <class T, int W, std::enable_if_t<!std::is_same_v<T, double>, int> = 0>
Dual<T, W> operator-(double s, const Dual<T, W>& a)
{
    return Dual<T, W>(s) - a;
}
template <class T, int W, std::enable_if_t<!std::is_same_v<T, double>, int> = 0>
Dual<T, W> operator/(const Dual<T, W>& a, double s)
{
    return a * (1.0 / s);
}
template <class T, int W, std::enable_if_t<!std::is_same_v<T, double>, int> = 0>
Dual<T, W> operator/(double s, const Dual<T, W>& a)
{
    return Dual<T, W>(s) / a;
}

template <class T, int W>
Dual<T, W> sqrt(const Dual<T, W>& x)
{
    using std::sqrt;
    T root = sqrt(x.value());
    const T d = T(0.5) / root;
    return Dual<T, W>::chain(std::move(root), d, x);
}

template <class T, int W>
Dual<T, W> log(const Dual<T, W>& x)
{
    using std::log;
    return Dual<T, W>::chain(log(x.value()), T(1.0) / x.value(), x);
}

/// Innermost double value of a possibly nested dual.
inline double value_of(double x) noexcept { return x; }
template <class T, int W>
double value_of(const Dual<T, W>& x) noexcept
{
    return value_of(x.value());
}

/// True when the value and every derivative component are finite.
inline bool all_finite(double x) noexcept { return std::isfinite(x); }
template <class T, int W>
bool all_finite(const Dual<T, W>& x) noexcept
{
    if (!all_finite(x.value())) {
        return false;
    }
    for (const auto& g : x.grad()) {
        if (!all_finite(g)) {
            return false;
        }
    }
    return true;
}

/// A scalar primitive whose value is computed opaquely (e.g. by quadrature)
/// and whose derivative is supplied analytically as generic code, so it can be
/// evaluated on nested duals.
template <class P>
concept ScalarPrimitive = requires(const P& p, double x) {
    { p.value(x) } -> std::convertible_to<double>;
    { p.derivative(x) } -> std::convertible_to<double>;
};

template <ScalarPrimitive P>
double apply_primitive(const P& prim, double x)
{
    return prim.value(x);
}

template <ScalarPrimitive P, class T, int W>
Dual<T, W> apply_primitive(const P& prim, const Dual<T, W>& x)
{
    return Dual<T, W>::chain(apply_primitive(prim, x.value()), prim.derivative(x.value()), x);
}

/// Max relative mismatch between `derivative` and a central difference of
/// `value` over the sample points. Registration check for primitives.
template <ScalarPrimitive P, class Range>
double primitive_derivative_mismatch(const P& prim, const Range& samples, double step = 1e-5)
{
    double worst = 0.0;
    for (double x : samples) {
        const double fd = (prim.value(x + step) - prim.value(x - step)) / (2.0 * step);
        const double an = prim.derivative(x);
        const double scale = std::max(std::abs(an), 1e-300);
        worst = std::max(worst, std::abs(fd - an) / scale);
    }
    return worst;
}

} // namespace pseudosym
