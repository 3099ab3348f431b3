#include "heis/moments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "heis/quadrature.hpp"
#include "heis/special.hpp"

namespace heis {

std::vector<MultiIndexAlpha> MultiIndexAlpha::enumerate_A(int l) {
    std::vector<MultiIndexAlpha> out;
    for (int a1 = 0; a1 <= l; ++a1)
        for (int a2 = 0; 2 * a2 <= l; ++a2)
            for (int a3 = 0; 3 * a3 <= l; ++a3) {
                MultiIndexAlpha a{a1, a2, a3};
                if (a.in_A(l)) out.push_back(a);
            }
    return out;
}

std::vector<MultiIndexAlpha> MultiIndexAlpha::with_order(int k) {
    std::vector<MultiIndexAlpha> out;
    for (int a1 = 0; a1 <= k; ++a1)
        for (int a2 = 0; a1 + a2 <= k; ++a2) out.push_back({a1, a2, k - a1 - a2});
    return out;
}

double radial_integral(const MeasureModel& mu, const std::function<double(double)>& g,
                       const HPoint& u, const MomentConfig& cfg) {
    if (!mu.on_support(u, 1e-7))
        throw SupportError("radial_integral: base point off the support");
    const int m = mu.m();
    auto f = [&](double r) { return std::pow(r, m - 1) * g(r); };
    const auto& q = cfg.quad;
    double total = 0.0, prev = -1.0, R = 1.0;
    int stable = 0;
    for (int k = 0; k < 24; ++k) {
        prev = total;
        total = gk_adaptive(f, 0.0, R, QuadOptions{q.rel_tol, q.abs_tol, 20000}).value;
        if (k > 0 &&
            std::abs(total - prev) <= std::max(q.abs_tol, q.rel_tol * std::abs(total))) {
            if (++stable >= 2) return m * total;
        } else {
            stable = 0;
        }
        R *= 2.0;
    }
    throw IntegrationError("radial_integral: divergent profile");
}

double gamma_integral(int m, double p, double s) {
    if (m < 1) throw DomainError("gamma_integral: m must be positive");
    if (p < 0.0) throw DomainError("gamma_integral: p must be nonnegative");
    if (!(s > 0.0)) throw DomainError("gamma_integral: s must be positive");
    return 0.25 * m * std::pow(s, -0.25 * (m + p)) * gamma_fn(0.25 * (m + p));
}

double moment_b(const MeasureModel& mu, int k, double s, const HPoint& u,
                const MomentConfig& cfg) {
    if (k < 1) throw DomainError("moment_b: k must be >= 1");
    const int m = mu.m();
    const double Cm = gamma_fn(0.25 * m + 1.0);
    auto F = [&](const HPoint& z) {
        const PolarizationParts p = polarize(u, z);
        return std::pow(2.0 * p.V, k);
    };
    const double raw = integrate_gauss(mu, s, F, cfg.quad);
    double logk = 0.0;
    for (int i = 2; i <= k; ++i) logk += std::log(static_cast<double>(i));
    return std::pow(s, k + 0.25 * m) / (std::exp(logk) * Cm) * raw;
}

double moment_c(const MeasureModel& mu, const MultiIndexAlpha& alpha, double s,
                const HPoint& u, const MomentConfig& cfg) {
    if (alpha.order() < 1) throw DomainError("moment_c: alpha must be nonzero");
    const int m = mu.m();
    const double Cm = gamma_fn(0.25 * m + 1.0);
    auto F = [&](const HPoint& z) {
        const PolarizationParts p = polarize(u, z);
        return std::pow(p.L, alpha.a1) * std::pow(p.Q, alpha.a2) * std::pow(p.T, alpha.a3);
    };
    const double raw = integrate_gauss(mu, s, F, cfg.quad);
    auto fact = [](int k) {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    return std::pow(s, alpha.order() + 0.25 * m) /
           (fact(alpha.a1) * fact(alpha.a2) * fact(alpha.a3) * Cm) * raw;
}

// The envelope series sum_k 16^k Gamma((m+3k)/4) / (k! Gamma(m/4)) converges
// by the ratio test but peaks near k ~ 16^4 at a value far beyond double
// range, so the summation runs in log space.
double log_E_constant(int m) {
    const double lg_m = std::lgamma(0.25 * m);
    double log_sum = -std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200000; ++k) {
        const double lt = k * std::log(16.0) - std::lgamma(k + 1.0) +
                          std::lgamma(0.25 * (m + 3 * k)) - lg_m;
        if (lt <= log_sum) {
            log_sum += std::log1p(std::exp(lt - log_sum));
            if (lt - log_sum < std::log(1e-16)) break;
        } else {
            log_sum = lt + std::log1p(log_sum == -std::numeric_limits<double>::infinity()
                                          ? 0.0
                                          : std::exp(log_sum - lt));
        }
    }
    return log_sum;
}

double E_constant(int m) { return std::exp(log_E_constant(m)); }

double log_G_constant(int m) { return std::max(log_E_constant(m), 1.0); }

double G_constant(int m) { return std::exp(log_G_constant(m)); }

ExpansionCheck expansion_residual(const MeasureModel& mu, const HPoint& u, double s, int q,
                                  const MomentConfig& cfg) {
    if (q < 1) throw DomainError("expansion_residual: q must be >= 1");
    const int m = mu.m();
    const double Cm = gamma_fn(0.25 * m + 1.0);
    const double su4 = s * std::pow(knorm(u), 4);

    ExpansionCheck out;
    if (knorm(u) == 0.0) return out;

    const int kmax = 4 * q;
    // all powers (2V)^k in one weighted pass
    auto F = [&](const HPoint& z, double* o) {
        const PolarizationParts p = polarize(u, z);
        double pw = 1.0;
        for (int k = 1; k <= kmax; ++k) {
            pw *= 2.0 * p.V;
            o[k - 1] = pw;
        }
    };
    const std::vector<double> raw = integrate_gauss_vec(mu, s, F, kmax, cfg.quad);
    double sum_b = 0.0, kfact = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        kfact *= k;
        sum_b += std::pow(s, k + 0.25 * m) / (kfact * Cm) * raw[k - 1];
    }
    double sum_e = 0.0, qfact = 1.0;
    for (int k = 1; k <= q; ++k) {
        qfact *= k;
        sum_e += std::pow(su4, k) / qfact;
    }
    out.lhs = std::abs(sum_b - sum_e);
    // rhs assembled in log space; saturates to +inf when it exceeds range
    const double log_rhs = log_G_constant(m) + (q + 0.25) * std::log(su4) +
                           std::log(2.0 + std::pow(su4, 2 * q));
    out.rhs = std::exp(log_rhs);
    out.log_rhs = log_rhs;
    return out;
}

MomentCurves curves(const MeasureModel& mu, double s, const MomentConfig& cfg) {
    const int n = mu.n();
    const int d = 2 * n;
    const int m = mu.m();
    // channels: I_b (d) | I_Q1 (d*d) | I_Q2 (d*d) | I_Q3 (d*d) | I_Q4 (1) | I_T (1)
    const int dim = d + 3 * d * d + 2;
    auto F = [&](const HPoint& z, double* o) {
        const HVec& y = z.h;
        const HVec Jy = apply_J(y);
        const double y2 = y.squaredNorm();
        int at = 0;
        for (int i = 0; i < d; ++i) o[at++] = y2 * y(i) + z.t * Jy(i);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                o[at++] = y2 * y2 * y(i) * y(j) + z.t * z.t * Jy(i) * Jy(j);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                o[at++] = y2 * z.t * (y(i) * Jy(j) + Jy(i) * y(j));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) o[at++] = y(i) * y(j) + Jy(i) * Jy(j);
        o[at++] = y2;
        o[at++] = z.t;
    };
    const std::vector<double> raw = integrate_gauss_vec(mu, s, F, dim, cfg.quad);

    const double Cm = gamma_fn(0.25 * m + 1.0);
    const double pref2 = std::pow(s, 0.25 * (m + 2)) / Cm;  // s^{(m+2)/4}/C(m)
    const double pref6 = std::pow(s, 0.25 * (m + 6)) / Cm;

    MomentCurves mc;
    mc.s = s;
    mc.C_m = Cm;
    mc.b_s = HVec::Zero(d);
    mc.Q_s = HMat::Zero(d, d);
    int at = 0;
    for (int i = 0; i < d; ++i) mc.b_s(i) = 4.0 * pref2 * raw[at++];
    HMat Q1(d, d), Q2(d, d), Q3(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) Q1(i, j) = raw[at++];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) Q2(i, j) = raw[at++];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) Q3(i, j) = raw[at++];
    const double q4 = raw[at++];
    mc.T_s = 2.0 * pref2 * raw[at++];
    mc.Q_s = 8.0 * pref6 * (Q1 + Q2) - 4.0 * pref2 * Q3 -
             2.0 * pref2 * q4 * HMat::Identity(d, d);
    mc.Q_s = 0.5 * (mc.Q_s + mc.Q_s.transpose());
    return mc;
}

double trace_Q(const MeasureModel& mu, double s, TraceMethod method,
               const MomentConfig& cfg) {
    if (method == TraceMethod::Assembled) return curves(mu, s, cfg).Q_s.trace();
    const int n = mu.n();
    const int m = mu.m();
    const double Cm = gamma_fn(0.25 * m + 1.0);
    auto F = [&](const HPoint& z) {
        const double k2 = std::hypot(z.h.squaredNorm(), z.t);
        return z.h.squaredNorm() * (8.0 * s * k2 * k2 - (8.0 + 4.0 * n));
    };
    return std::pow(s, 0.25 * (m + 2)) / Cm * integrate_gauss(mu, s, F, cfg.quad);
}

double f_curve(const MeasureModel& mu, double s, const MomentConfig& cfg) {
    auto F = [](const HPoint& z) { return z.h.squaredNorm(); };
    return integrate_gauss(mu, s, F, cfg.quad);
}

double ode_check(const MeasureModel& mu, double s, const MomentConfig& cfg) {
    const int n = mu.n();
    const int m = mu.m();
    if (m >= 2 * n + 2) throw DomainError("ode_check: requires m <= 2n+1");
    const double Cm = gamma_fn(0.25 * m + 1.0);
    // int_0^s l^{(2n-2-m)/4} Tr(Q(l)) dl, desingularized by l = u^p with
    // p = 4/(2n+2-m)
    const double p = 4.0 / (2 * n + 2 - m);
    auto f = [&](double u) { return trace_Q(mu, std::pow(u, p), TraceMethod::Formula, cfg); };
    const double upper = std::pow(s, 1.0 / p);
    QuadResult qr = gk_adaptive(f, 0.0, upper,
                                QuadOptions{1e-8, 1e-12, 2000});
    const double lam_int = p * qr.value;
    const double rhs = -Cm / (8.0 * std::pow(s, 0.5 * (n + 2))) * lam_int;
    return std::abs(f_curve(mu, s, cfg) - rhs);
}

void write_curves_csv(const MeasureModel& mu, const std::vector<double>& s_values,
                      const std::string& path, const MomentConfig& cfg,
                      const std::string& config_echo) {
    std::ofstream out(path);
    if (!out) throw Error("write_curves_csv: cannot open " + path);
    const int d = 2 * mu.n();
    if (!config_echo.empty()) out << "# " << config_echo << "\n";
    out << "s";
    for (int i = 0; i < d; ++i) out << ",b" << i;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) out << ",Q" << i << j;
    out << ",T,TrQ\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (double s : s_values) {
        const MomentCurves mc = curves(mu, s, cfg);
        emit(s);
        for (int i = 0; i < d; ++i) {
            out << ',';
            emit(mc.b_s(i));
        }
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                out << ',';
                emit(mc.Q_s(i, j));
            }
        out << ',';
        emit(mc.T_s);
        out << ',';
        emit(mc.Q_s.trace());
        out << '\n';
    }
}

}  // namespace heis
