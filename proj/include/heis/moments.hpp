#pragma once

#include <string>
#include <vector>

#include "heis/measure_models.hpp"

namespace heis {

/// Curves of the quadric construction: horizontal barycentre b(s), matrix
/// Q(s) assembled as Q1 + Q2 - Q3 - Q4, and vertical barycentre T(s).
struct MomentCurves {
    double s = 1.0;
    HVec b_s;
    HMat Q_s;
    double T_s = 0.0;
    double C_m = 1.0;  // Gamma(m/4 + 1)
};

/// Multi-index over the (L, Q, T) polarization parts; weight a1 + 2 a2 + 3 a3
/// is the intrinsic homogeneity in the first argument.
struct MultiIndexAlpha {
    int a1 = 0, a2 = 0, a3 = 0;

    int order() const { return a1 + a2 + a3; }
    int weight() const { return a1 + 2 * a2 + 3 * a3; }
    bool in_A(int l) const { return order() > 0 && weight() <= l; }

    static std::vector<MultiIndexAlpha> enumerate_A(int l);
    static std::vector<MultiIndexAlpha> with_order(int k);
};

struct MomentConfig {
    IntegrationConfig quad{1e-7, 1e-12, 2'000'000, 20240808ULL, 64};
};

/// m int_0^inf r^{m-1} g(r) dr: the radial reduction of ∫ g(||u^{-1} z||) dmu.
double radial_integral(const MeasureModel& mu, const std::function<double(double)>& g,
                       const HPoint& u, const MomentConfig& cfg = {});

/// (m/4) s^{-(m+p)/4} Gamma((m+p)/4): the closed form of the weighted norm
/// moment int ||z||^p e^{-s ||z||^4} dmu over an m-uniform measure.
double gamma_integral(int m, double p, double s);

double moment_b(const MeasureModel& mu, int k, double s, const HPoint& u,
                const MomentConfig& cfg = {});
double moment_c(const MeasureModel& mu, const MultiIndexAlpha& alpha, double s,
                const HPoint& u, const MomentConfig& cfg = {});

/// E(m) = sum_k (16^k / k!) Gamma((m+3k)/4)/Gamma(m/4), and G(m) = max(E, e).
/// The series peaks near k ~ 16^4 and its value overflows doubles, so the
/// log-space forms are authoritative.
double log_E_constant(int m);
double E_constant(int m);
double log_G_constant(int m);
double G_constant(int m);

struct ExpansionCheck {
    double lhs = 0.0;
    double rhs = 0.0;      // +inf when the exact bound exceeds double range
    double log_rhs = 0.0;  // always finite
};
/// Moment expansion control: lhs = |sum_{k<=4q} b_{k,s}(u) - sum_{k<=q} (s||u||^4)^k/k!|,
/// rhs = G(m) (s||u||^4)^{q+1/4} (2 + (s||u||^4)^{2q}).
ExpansionCheck expansion_residual(const MeasureModel& mu, const HPoint& u, double s, int q,
                                  const MomentConfig& cfg = {});

MomentCurves curves(const MeasureModel& mu, double s, const MomentConfig& cfg = {});

enum class TraceMethod { Assembled, Formula };
double trace_Q(const MeasureModel& mu, double s, TraceMethod method,
               const MomentConfig& cfg = {});

/// f(s) = int |z_H|^2 e^{-s||z||^4} dmu
double f_curve(const MeasureModel& mu, double s, const MomentConfig& cfg = {});

/// | f(s) + C(m)/(8 s^{(n+2)/2}) int_0^s l^{(2n-2-m)/4} Tr(Q(l)) dl |
double ode_check(const MeasureModel& mu, double s, const MomentConfig& cfg = {});

/// CSV of (s, b(s), Q(s) entries, T(s), Tr Q(s)); header lines echo the config.
void write_curves_csv(const MeasureModel& mu, const std::vector<double>& s_values,
                      const std::string& path, const MomentConfig& cfg = {},
                      const std::string& config_echo = "");

}  // namespace heis
