#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace nlcm {

/// Dense coordinate vector. Dimensions in this library are tiny (n <= 6),
/// so plain std::vector<double> with a few free helpers is all we need.
using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Squared Euclidean norm.
inline double norm2(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline bool all_finite(std::span<const double> a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

}  // namespace nlcm
