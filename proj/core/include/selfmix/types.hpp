#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace selfmix {

/// Position or velocity vector. Grids are one- or two-dimensional; in 1D the
/// second component is always zero, so the same arithmetic serves both.
using Vec = std::array<double, 2>;

inline constexpr Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline constexpr Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline constexpr Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1]}; }
inline constexpr Vec& operator+=(Vec& a, const Vec& b) {
    a[0] += b[0];
    a[1] += b[1];
    return a;
}

inline constexpr double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

/// 2D cross product x1*a2 - x2*a1 (the only nonzero component of x ∧ α).
inline constexpr double cross(const Vec& x, const Vec& a) { return x[0] * a[1] - x[1] * a[0]; }

enum class Boundary { periodic, outflow };

/// Raised when an explicit update produces a non-finite or negative entry.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::size_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace selfmix
