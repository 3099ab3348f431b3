#pragma once

#include <cmath>

#include "heis/errors.hpp"

namespace heis {

inline double gamma_fn(double x) { return std::tgamma(x); }

inline double beta_fn(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

/// Surface measure of the unit sphere S^k in R^{k+1}; S^0 counts its two points.
inline double sphere_area(int k) {
    if (k < 0) throw DomainError("sphere_area: negative dimension");
    if (k == 0) return 2.0;
    return 2.0 * std::pow(M_PI, 0.5 * (k + 1)) / gamma_fn(0.5 * (k + 1));
}

/// Measure of S^{2n-1} \cap n^perp, the sphere slice orthogonal to a horizontal direction.
inline double slice_sphere_area(int n) { return sphere_area(2 * n - 2); }

/// int_0^1 r^{2n-2} sqrt(1-r^4) dr
inline double c9_constant(int n) {
    return 0.25 * beta_fn(0.25 * (2 * n - 1), 1.5);
}

/// int_0^1 r^{2n} sqrt(1-r^4) dr
inline double c8_constant(int n) {
    return 0.25 * beta_fn(0.25 * (2 * n + 1), 1.5);
}

/// Normalizing constant of the spherical Hausdorff representation formulas:
/// the Euclidean area of the unit Koranyi ball sliced by a vertical hyperplane.
inline double cn_gamma_formula(int n) {
    return std::sqrt(M_PI) * gamma_fn(0.25 * (2 * n - 1)) * slice_sphere_area(n) /
           ((2 * n + 1) * gamma_fn(0.25 * (2 * n + 1)));
}

/// Constant relating the closed-form third expansion coefficient to its
/// admissibility bracket.
inline double Cn_expansion_constant(int n) {
    return std::sqrt(M_PI) * gamma_fn(0.25 * (2 * n + 1)) /
           (0.25 * (2 * n + 3) * gamma_fn(0.25 * (2 * n + 3)));
}

inline void check_group_index(int n) {
    if (n < 1 || n > kMaxN) throw DomainError("group index n must be in [1,4]");
}

}  // namespace heis
