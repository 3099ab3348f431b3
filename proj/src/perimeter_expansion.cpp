#include "heis/perimeter_expansion.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "heis/quadrature.hpp"
#include "heis/rng.hpp"
#include "heis/special.hpp"

namespace heis {

ExpansionFrame ExpansionFrame::make(const HMat& D, const HVec& x) {
    const int d = static_cast<int>(x.size());
    if (d % 2 != 0 || D.rows() != d || D.cols() != d)
        throw DimensionError("ExpansionFrame: size mismatch");
    check_group_index(d / 2);
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw DomainError("ExpansionFrame: D must be symmetric");

    ExpansionFrame fr;
    fr.n = d / 2;
    fr.D = 0.5 * (D + D.transpose());
    fr.x = x;
    const HVec g = fr.D * x + apply_J(x);
    const double gs = g.norm();
    if (gs <= 1e-12 * std::max(1.0, x.norm()))
        throw CharacteristicPointError("ExpansionFrame: x is characteristic");
    fr.normal = g / gs;
    fr.c = 2.0 * gs;
    fr.alpha_n = fr.normal.dot(fr.D * fr.normal);

    // distance from x to ker(D+J)
    Eigen::MatrixXd M = Eigen::MatrixXd(fr.D) + Eigen::MatrixXd(SymplecticJ(fr.n).matrix());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const double smax = svd.singularValues()(0);
    Eigen::VectorXd perp = Eigen::VectorXd(x);
    for (int i = 0; i < d; ++i)
        if (svd.singularValues()(i) <= 1e-12 * smax)
            perp -= svd.matrixV().col(i).dot(Eigen::VectorXd(x)) * svd.matrixV().col(i);
    fr.dist_sigma = perp.norm();
    fr.r_max = 0.1 * std::min(fr.c, fr.dist_sigma);
    return fr;
}

namespace {

// directions of the slice sphere S^{2n-1} cap normal^perp as an omega measure
OmegaMeasure slice_of(const ExpansionFrame& fr) {
    return OmegaMeasure::full_slice(fr.n, fr.normal);
}

}  // namespace

double ExpansionFrame::min_A(int n_theta, int n_v) const {
    double best = std::numeric_limits<double>::infinity();
    auto scan_theta = [&](const HVec& v) {
        const double g = gamma(v);
        for (int i = 0; i <= n_theta; ++i) {
            const double th = -0.5 * M_PI + M_PI * i / n_theta;
            const double ct = std::cos(th), st = std::sin(th);
            const double a = ct * ct * ct * ct + std::pow(ct * ct * g + st, 2);
            best = std::min(best, a);
        }
    };
    if (n == 1) {
        scan_theta(apply_J(normal));
    } else {
        HMat basis(2 * n, 2 * n - 1);
        {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
            m.col(0) = Eigen::VectorXd(normal);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
            basis = Eigen::MatrixXd(qr.householderQ()).rightCols(2 * n - 1);
        }
        SplitMix64 rng(7);
        for (int k = 0; k < n_v; ++k) {
            Eigen::VectorXd xi(2 * n - 1);
            for (int i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
            HVec v = basis * (xi / xi.norm());
            scan_theta(v);
        }
    }
    return best;
}

HVec polar_map(const ExpansionFrame& fr, double theta, double rho, const HVec& v) {
    return fr.x + (std::sin(theta) / fr.c) * rho * rho * fr.normal +
           std::cos(theta) * rho * v;
}

PolarCoords polar_inverse(const ExpansionFrame& fr, const HVec& w) {
    const HVec rel = w - fr.x;
    const double lam = fr.normal.dot(rel);
    const HVec u = rel - lam * fr.normal;
    const double un = u.norm();
    if (un <= 1e-14 * std::max(1.0, rel.norm()))
        throw AxisError("polar_inverse: point on the normal axis");
    PolarCoords pc;
    const double disc = std::sqrt(std::pow(un, 4) + 4.0 * lam * lam * fr.c * fr.c);
    const double rho2 = 0.5 * (un * un + disc);
    pc.rho = std::sqrt(rho2);
    const double s = fr.c * lam / rho2;
    const double ct = un / pc.rho;
    pc.theta = std::atan2(s, ct);
    pc.v = u / un;
    return pc;
}

HCoefficients h_coefficients(const ExpansionFrame& fr, double theta, const HVec& v) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double g = fr.gamma(v), b = fr.beta(v), a = fr.alpha_n;
    HCoefficients h;
    const double p = ct * ct * g + st;
    h.A = ct * ct * ct * ct + p * p;
    h.Bbar = 4.0 * st * ct * b * p;
    h.Cbar = st * st * (ct * ct * (2.0 + 4.0 * b * b + 2.0 * g * a) + 2.0 * st * a);
    h.Dbar = 4.0 * a * b * st * st * st * ct;
    h.Ebar = (1.0 + a * a) * st * st * st * st;
    return h;
}

double h_eval(const ExpansionFrame& fr, double theta, double rho, const HVec& v) {
    const HCoefficients h = h_coefficients(fr, theta, v);
    const double c = fr.c;
    return ((((h.Ebar / c * rho + h.Dbar) / c * rho + h.Cbar) / c * rho + h.Bbar) / c * rho +
            h.A) *
           rho * rho * rho * rho;
}

double ball_criterion(const ExpansionFrame& fr, const HVec& w) {
    const double a = w.squaredNorm();
    const double b = fr.c * fr.normal.dot(w) + w.dot(fr.D * w);
    return a * a + b * b;
}

double rho_expansion(const ExpansionFrame& fr, double theta, const HVec& v, double r) {
    if (r > fr.r_max * (1.0 + 1e-12))
        throw DomainError("rho_expansion: r beyond the expansion regime");
    const HCoefficients h = h_coefficients(fr, theta, v);
    const double B = h.Bbar / fr.c, C = h.Cbar / (fr.c * fr.c);
    const double A14 = std::pow(h.A, 0.25);
    return r / A14 - B * r * r / (4.0 * std::pow(h.A, 1.5)) +
           (7.0 / 32.0 * B * B / std::pow(h.A, 2.75) - C / (4.0 * std::pow(h.A, 1.75))) *
               r * r * r;
}

double rho_root(const ExpansionFrame& fr, double theta, const HVec& v, double r) {
    const double r4 = std::pow(r, 4);
    auto f = [&](double rho) { return h_eval(fr, theta, rho, v) - r4; };
    // bracket the first sign change from 0
    double hi = r / std::pow(std::max(h_coefficients(fr, theta, v).A, 1e-8), 0.25);
    double step = hi / 64.0;
    double lo = 0.0;
    double x = step;
    while (f(x) < 0.0) {
        lo = x;
        x += step;
        if (x > 64.0 * hi) throw DomainError("rho_root: no root found");
    }
    double a = lo, b = x;
    for (int i = 0; i < 100; ++i) {
        const double m = 0.5 * (a + b);
        (f(m) < 0.0 ? a : b) = m;
    }
    return 0.5 * (a + b);
}

DensityExpansion density_expansion(const ExpansionFrame& fr, double theta, const HVec& v) {
    const double ct = std::cos(theta), st = std::sin(theta);
    DensityExpansion de;
    de.lin = 2.0 * ct * (fr.beta(v) + apply_J(v).dot(fr.normal));
    const HVec Mv = fr.D * v + apply_J(v);
    const HVec proj = Mv - fr.normal.dot(Mv) * fr.normal;
    de.quad = 2.0 / fr.c * (fr.alpha_n * st + proj.squaredNorm() * ct * ct);
    return de;
}

namespace {

double density_at(const ExpansionFrame& fr, const HVec& w) {
    // 2 |(D+J)(x+w)|
    const HVec h = fr.x + w;
    return 2.0 * (fr.D * h + apply_J(h)).norm();
}

// rho-intervals of {H(theta, ., v) <= r^4}; H is an octic polynomial in rho
std::vector<std::pair<double, double>> rho_intervals(const ExpansionFrame& fr,
                                                     double theta, const HVec& v,
                                                     double r) {
    const double r4 = std::pow(r, 4);
    const double ct = std::max(std::abs(std::cos(theta)), 1e-12);
    const double st = std::max(std::abs(std::sin(theta)), 1e-12);
    // H >= |w|^4 and |w|^2 = sin^2 th rho^4/c^2 + cos^2 th rho^2 bounds the reach
    const double cap = std::min(r / ct, std::sqrt(fr.c * r / st)) * 1.0000001;
    const HCoefficients h = h_coefficients(fr, theta, v);
    const double c = fr.c;
    std::vector<double> poly = {0.0,
                                0.0,
                                0.0,
                                0.0,
                                h.A,
                                h.Bbar / c,
                                h.Cbar / (c * c),
                                h.Dbar / (c * c * c),
                                h.Ebar / (c * c * c * c)};
    return polynomial_sublevel(poly, 0.0, cap, r4);
}

}  // namespace

IntegralResult perimeter_ball(const ExpansionFrame& fr, double r,
                              const IntegrationConfig& cfg) {
    if (!(r > 0.0)) throw DomainError("perimeter_ball: r must be positive");
    IntegralResult out;
    out.seed = cfg.seed;
    const OmegaMeasure slice = slice_of(fr);
    const int n = fr.n;
    std::int64_t evals = 0;
    double err_acc = 0.0;

    auto per_direction = [&](const HVec& v) {
        auto theta_integrand = [&](double theta) {
            const double ct = std::cos(theta);
            const double jac_ang = std::pow(std::abs(ct), 2 * n - 2) *
                                   (1.0 + std::sin(theta) * std::sin(theta));
            double acc = 0.0;
            for (auto [a, b] : rho_intervals(fr, theta, v, r)) {
                auto f = [&](double rho) {
                    const HVec w = polar_map(fr, theta, rho, v) - fr.x;
                    return std::pow(rho, 2 * n) * density_at(fr, w);
                };
                acc += gl_integrate(f, a, b, cfg.gl_order);
            }
            return jac_ang * acc / fr.c;
        };
        QuadResult qr = gk_adaptive(theta_integrand, -0.5 * M_PI, 0.5 * M_PI,
                                    QuadOptions{cfg.rel_tol, cfg.abs_tol, 20000});
        evals += qr.evals;
        err_acc += qr.abs_error;
        return qr.value;
    };
    out.value = slice.integral(per_direction, cfg.gl_order);
    out.abs_error_est = err_acc;
    out.samples = static_cast<std::uint64_t>(evals);
    return out;
}

IntegralResult perimeter_ball_cartesian(const ExpansionFrame& fr, double r,
                                        const IntegrationConfig& cfg) {
    if (fr.n != 1)
        throw IntegrationError("perimeter_ball_cartesian: implemented for n = 1");
    IntegralResult out;
    out.seed = cfg.seed;
    const double r4 = std::pow(r, 4);
    auto outer = [&](double w1) {
        // G(w1, .) is quartic in w2: |w|^4 plus a squared quadratic
        const double e0 = w1 * w1;
        const double t0 = fr.c * fr.normal(0) * w1 + fr.D(0, 0) * w1 * w1;
        const double t1 = fr.c * fr.normal(1) + 2.0 * fr.D(0, 1) * w1;
        const double t2 = fr.D(1, 1);
        std::vector<double> q(5, 0.0);
        q[0] = e0 * e0 + t0 * t0;
        q[1] = 2.0 * t0 * t1;
        q[2] = 2.0 * e0 + t1 * t1 + 2.0 * t0 * t2;
        q[3] = 2.0 * t1 * t2;
        q[4] = 1.0 + t2 * t2;
        double acc = 0.0;
        for (auto [a, b] : polynomial_sublevel(q, -r, r, r4)) {
            auto f = [&](double w2) {
                HVec w(2);
                w << w1, w2;
                return density_at(fr, w);
            };
            acc += gl_integrate(f, a, b, cfg.gl_order);
        }
        return acc;
    };
    QuadResult qr =
        gk_adaptive(outer, -r, r, QuadOptions{cfg.rel_tol, cfg.abs_tol, 20000});
    out.value = qr.value;
    out.abs_error_est = qr.abs_error;
    out.samples = static_cast<std::uint64_t>(qr.evals);
    return out;
}

double conto1(int k, double alpha) {
    if (k < 0) throw DomainError("conto1: k must be nonnegative");
    if (!(alpha > 0.5 * (k + 1))) throw DomainError("conto1: requires alpha > (k+1)/2");
    if (k % 2 == 1) return 0.0;
    return gamma_fn(0.5 * (k + 1)) * gamma_fn(alpha - 0.5 * (k + 1)) / gamma_fn(alpha);
}

double conto2_check(const std::function<double(double)>& f, double alpha, double gamma,
                    int n, const IntegrationConfig& cfg) {
    // theta side
    auto lhs_f = [&](double th) {
        const double ct = std::cos(th), st = std::sin(th);
        const double dd = std::pow(ct, 2 * n - 2) * (ct * ct + 2.0 * st * st);
        const double p = ct * ct * gamma + st;
        const double A = ct * ct * ct * ct + p * p;
        return dd * std::pow(ct, 4.0 * alpha - 2 * n - 1) * f(st / (ct * ct)) /
               std::pow(A, alpha);
    };
    const double lhs =
        gk_adaptive(lhs_f, -0.5 * M_PI, 0.5 * M_PI, QuadOptions{1e-12, 1e-15, 20000})
            .value;
    // rational side via x + gamma = sinh(tau); the decay rate depends on f,
    // so expand the window until the value stabilizes.  Intermediate
    // overflow of f at extreme arguments counts as a vanished tail.
    auto rhs_f = [&](double tau) {
        const double ch = std::cosh(tau);
        const double v = f(std::sinh(tau) - gamma) * std::pow(ch, 1.0 - 2.0 * alpha);
        return std::isfinite(v) ? v : 0.0;
    };
    double rhs = 0.0, prev = std::numeric_limits<double>::infinity();
    double T = 20.0;
    int stable = 0;
    for (int k = 0; k < 8; ++k) {
        rhs = gk_adaptive_banded(rhs_f, -T, T, {0.0}, QuadOptions{1e-13, 1e-16, 40000})
                  .value;
        if (std::abs(rhs - prev) <= 1e-13 * std::max(1.0, std::abs(rhs))) {
            if (++stable >= 2) break;
        } else {
            stable = 0;
        }
        prev = rhs;
        T *= 2.0;
    }
    (void)cfg;
    return std::abs(lhs - rhs);
}

double admissibility_residual(int nn, const HMat& D, const HVec& normal) {
    const double tr = D.trace();
    const double tr2 = (D * D).trace();
    const double nDn = normal.dot(D * normal);
    const double nD2n = (D * normal).squaredNorm();
    const double nDJn = normal.dot(D * apply_J(normal));
    const double den = 2.0 * nn - 1.0;
    return (tr2 - 2.0 * nD2n + nDn * nDn) / (4.0 * den) + (nn - 1.0) / den - 0.25 +
           nDJn / den - std::pow(tr - nDn, 2) / (8.0 * den);
}

double coeff_e_closed(const ExpansionFrame& fr) {
    return admissibility_residual(fr.n, fr.D, fr.normal);
}

double coeff_e_full(const ExpansionFrame& fr) {
    return Cn_expansion_constant(fr.n) * slice_sphere_area(fr.n) / (fr.c * fr.c) *
           coeff_e_closed(fr);
}

ExpansionReport coeff_fit(const ExpansionFrame& fr, const std::vector<double>& r_grid,
                          const IntegrationConfig& cfg) {
    if (r_grid.size() < 6)
        throw FitError("coeff_fit: need at least 6 radii in the expansion regime");
    ExpansionReport rep;
    rep.radii = r_grid;
    double r0 = 0.0;
    for (double r : r_grid) r0 = std::max(r0, r);
    const int N = static_cast<int>(r_grid.size());
    const int p0 = 2 * fr.n + 1;

    Eigen::MatrixXd A(N, 3);
    Eigen::VectorXd y(N);
    for (int i = 0; i < N; ++i) {
        const double t = r_grid[i] / r0;
        A(i, 0) = std::pow(t, p0);
        A(i, 1) = std::pow(t, p0 + 1);
        A(i, 2) = std::pow(t, p0 + 2);
        const double mass = perimeter_ball(fr, r_grid[i], cfg).value;
        rep.masses.push_back(mass);
        y(i) = mass;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    rep.condition = svd.singularValues()(0) / svd.singularValues()(2);
    if (rep.condition > 1e10)
        throw FitError("coeff_fit: ill-conditioned design matrix, cond = " +
                       std::to_string(rep.condition));
    Eigen::Vector3d coef = svd.solve(y);
    Eigen::VectorXd resid = y - A * coef;
    rep.residual_norm = resid.norm();
    const double sigma2 = resid.squaredNorm() / std::max(1, N - 3);
    Eigen::Matrix3d cov = (A.transpose() * A).inverse() * sigma2;

    rep.c_fit = coef(0) / std::pow(r0, p0);
    rep.d_fit = coef(1) / std::pow(r0, p0 + 1);
    rep.e_fit = coef(2) / std::pow(r0, p0 + 2);
    rep.c_err = std::sqrt(std::abs(cov(0, 0))) / std::pow(r0, p0);
    rep.d_err = std::sqrt(std::abs(cov(1, 1))) / std::pow(r0, p0 + 1);
    rep.e_err = std::sqrt(std::abs(cov(2, 2))) / std::pow(r0, p0 + 2);
    rep.c_closed = cn_gamma_formula(fr.n);
    rep.e_closed = coeff_e_full(fr);
    return rep;
}

double constraint_residual(int n, const HMat& D, const HVec& h) {
    check_group_index(n);
    if (h.size() != 2 * n || D.rows() != 2 * n)
        throw DimensionError("constraint_residual: size mismatch");
    const HVec g = D * h + apply_J(h);
    const double gn = g.norm();
    if (gn <= 1e-12 * std::max(1.0, h.norm()))
        throw CharacteristicPointError("constraint_residual: characteristic direction");
    return admissibility_residual(n, D, HVec(g / gn));
}

}  // namespace heis
