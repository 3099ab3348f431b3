#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "heis/errors.hpp"

namespace heis {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::int64_t evals = 0;
};

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_intervals = 8000;
};

/// Adaptive Gauss-Kronrod (G7,K15) on [a,b].  Worst-error-first subdivision.
QuadResult gk_adaptive(const std::function<double(double)>& f, double a, double b,
                       const QuadOptions& opt = {});

/// Adaptive integration over [a,b] pre-split into dyadic bands around the
/// given centers (unit base scale), so integrands localized near a center
/// cannot vanish between the Kronrod nodes of a wide interval.
QuadResult gk_adaptive_banded(const std::function<double(double)>& f, double a, double b,
                              std::initializer_list<double> centers,
                              const QuadOptions& opt = {});

/// Vector-valued variant; error is the max-norm over components.
/// f(x, out) must fill out[0..dim).
struct VecQuadResult {
    std::vector<double> value;
    double abs_error = 0.0;
    std::int64_t evals = 0;
};
VecQuadResult gk_adaptive_vec(const std::function<void(double, double*)>& f, int dim,
                              double a, double b, const QuadOptions& opt = {});

/// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Fixed-order Gauss-Legendre on [a,b].
double gl_integrate(const std::function<double(double)>& f, double a, double b, int order);

/// Stratified Monte Carlo over an axis-aligned box.  Deterministic for a fixed
/// seed: every cell is jittered from its own (seed, cell-counter) stream.
/// Error estimate from the spread of 64 interleaved cell chunks.
struct McResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::uint64_t samples = 0;
};
McResult mc_stratified(const std::function<double(const double*)>& f, int dim,
                       const double* lo, const double* hi, std::uint64_t n_target,
                       std::uint64_t seed);

/// Sign-scan + bisection root bracketing: all sub-intervals of [a,b] where
/// f <= level.  Used for radial sections of the octic polar criterion, whose
/// sublevel sets always contain the left endpoint.
std::vector<std::pair<double, double>> sublevel_intervals(
    const std::function<double(double)>& f, double a, double b, double level,
    int scan_points = 256);

/// Real roots of a polynomial given by ascending coefficients, via the
/// companion matrix.
std::vector<double> real_roots(const std::vector<double>& coeffs, double imag_tol = 1e-8);

/// Exact sub-intervals of [a,b] where the polynomial (ascending coefficients)
/// is <= level.  Robust for arbitrarily thin sections.
std::vector<std::pair<double, double>> polynomial_sublevel(
    const std::vector<double>& coeffs, double a, double b, double level);

}  // namespace heis
