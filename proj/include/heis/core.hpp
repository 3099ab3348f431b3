#pragma once

#include "heis/errors.hpp"
#include "heis/types.hpp"

namespace heis {

/// A point of H^n split into horizontal part h in R^{2n} and vertical
/// coordinate t.  All coordinates must be finite.
struct HPoint {
    HVec h;
    double t = 0.0;

    HPoint() = default;
    HPoint(HVec h_, double t_);
    static HPoint zero(int n);

    int n() const { return static_cast<int>(h.size()) / 2; }
};

/// The standard symplectic matrix [[0, I], [-I, 0]] on R^{2n}.
struct SymplecticJ {
    int n;
    explicit SymplecticJ(int n_);
    HMat matrix() const;
};

/// Jv without forming the matrix.
HVec apply_J(const HVec& v);

/// Orthogonal matrix inducing a linear isometry of H^n: U^T U = I and
/// U^T J U = sign * J.  Validated at construction.
struct IsometryU {
    HMat U;
    int sign = 1;

    explicit IsometryU(HMat U_, double tol = 1e-12);
};

HPoint mul(const HPoint& x, const HPoint& y);
HPoint inv(const HPoint& x);
HPoint dilate(double lambda, const HPoint& x);
double knorm(const HPoint& x);
double kdist(const HPoint& x, const HPoint& y);
HPoint isometry_apply(const IsometryU& iso, const HPoint& x);

/// Polarization of the Koranyi norm split into parts homogeneous of degree
/// 1, 2, 3 in the first argument; L + Q + T = 2V.
struct PolarizationParts {
    double V = 0.0;
    double L = 0.0;
    double Q = 0.0;
    double T = 0.0;
};

PolarizationParts polarize(const HPoint& u, const HPoint& z);

}  // namespace heis
