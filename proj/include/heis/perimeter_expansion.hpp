#pragma once

#include <functional>
#include <vector>

#include "heis/measure_models.hpp"

namespace heis {

/// Geometry of the perimeter expansion of the t-graph of f(h) = <h, D h> at
/// the non-characteristic point X = (x, f(x)): horizontal normal, density
/// scale c = 2|(D+J)x| and the quadratic-form shorthands.
struct ExpansionFrame {
    int n = 1;
    HMat D;
    HVec x;
    HVec normal;        // (D+J)x normalized
    double c = 0.0;     // 2 |(D+J)x|
    double alpha_n = 0.0;
    double dist_sigma = 0.0;  // distance from x to ker(D+J)
    double r_max = 0.0;       // default expansion regime bound

    static ExpansionFrame make(const HMat& D, const HVec& x);

    double beta(const HVec& v) const { return v.dot(D * normal); }
    double gamma(const HVec& v) const { return v.dot(D * v); }

    /// min over the (theta, v) grid of the quartic leading coefficient A.
    double min_A(int n_theta = 256, int n_v = 64) const;
};

/// w = x + (sin th / c) rho^2 n + cos th rho v
HVec polar_map(const ExpansionFrame& fr, double theta, double rho, const HVec& v);

struct PolarCoords {
    double theta = 0.0;
    double rho = 0.0;
    HVec v;
};
PolarCoords polar_inverse(const ExpansionFrame& fr, const HVec& w);

struct HCoefficients {
    double A = 0.0;
    double Bbar = 0.0;
    double Cbar = 0.0;
    double Dbar = 0.0;
    double Ebar = 0.0;
};
HCoefficients h_coefficients(const ExpansionFrame& fr, double theta, const HVec& v);

/// A rho^4 + (Bbar/c) rho^5 + (Cbar/c^2) rho^6 + (Dbar/c^3) rho^7 + (Ebar/c^4) rho^8
double h_eval(const ExpansionFrame& fr, double theta, double rho, const HVec& v);

/// G(w) = |w|^4 + |c <n,w> + <w,Dw>|^2 with w measured from x.
double ball_criterion(const ExpansionFrame& fr, const HVec& w);

/// Truncated radius expansion P_{theta,v}(r); requires r <= r_max.
double rho_expansion(const ExpansionFrame& fr, double theta, const HVec& v, double r);
/// Smallest positive root of h_eval = r^4 (bisection oracle).
double rho_root(const ExpansionFrame& fr, double theta, const HVec& v, double r);

struct DensityExpansion {
    double lin = 0.0;   // coefficient of rho
    double quad = 0.0;  // coefficient of rho^2
};
/// Taylor coefficients of rho -> 2|(D+J)(x + P(theta,rho,v))| about rho = 0.
DensityExpansion density_expansion(const ExpansionFrame& fr, double theta, const HVec& v);

/// Horizontal-perimeter mass of the Koranyi ball B_r(X) on the graph, by the
/// adapted polar coordinates and, as a cross-check, in Cartesian coordinates.
IntegralResult perimeter_ball(const ExpansionFrame& fr, double r,
                              const IntegrationConfig& cfg = {});
IntegralResult perimeter_ball_cartesian(const ExpansionFrame& fr, double r,
                                        const IntegrationConfig& cfg = {});

/// int x^k (1+x^2)^{-alpha} dx over R; zero for odd k, Beta quotient otherwise.
double conto1(int k, double alpha);
/// residual between the theta-form and the rational form of the slice integrals
double conto2_check(const std::function<double(double)>& f, double alpha, double gamma,
                    int n = 1, const IntegrationConfig& cfg = {});

/// Dimensionless admissibility bracket E(D, n).  Vanishes identically on
/// horizontal normals of graphs supporting uniform measures.
double admissibility_residual(int n, const HMat& D, const HVec& normal);

double coeff_e_closed(const ExpansionFrame& fr);
/// (C_n sigma(S(n)) / c^2) * closed bracket: the third expansion coefficient.
double coeff_e_full(const ExpansionFrame& fr);

struct ExpansionReport {
    double c_fit = 0.0, d_fit = 0.0, e_fit = 0.0;
    double c_err = 0.0, d_err = 0.0, e_err = 0.0;
    double c_closed = 0.0, e_closed = 0.0;
    double residual_norm = 0.0;
    double condition = 0.0;
    std::vector<double> radii;
    std::vector<double> masses;
};
/// Least-squares fit of perimeter_ball to c r^{2n+1} + d r^{2n+2} + e r^{2n+3}.
ExpansionReport coeff_fit(const ExpansionFrame& fr, const std::vector<double>& r_grid,
                          const IntegrationConfig& cfg = {});

/// E(D, n(h)) at the induced normal n(h) = (D+J)h / |(D+J)h|.
double constraint_residual(int n, const HMat& D, const HVec& h);

}  // namespace heis
