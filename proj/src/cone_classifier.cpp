#include "heis/cone_classifier.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "heis/quadrature.hpp"
#include "heis/rng.hpp"
#include "heis/special.hpp"

namespace heis {

namespace {

std::vector<HVec> sphere_directions(int n, int n_dirs, std::uint64_t seed) {
    std::vector<HVec> dirs;
    dirs.reserve(n_dirs);
    if (n == 1) {
        SplitMix64 rng(seed);
        const double off = rng.uniform();
        for (int i = 0; i < n_dirs; ++i) {
            const double phi = 2.0 * M_PI * (i + off) / n_dirs;
            HVec v(2);
            v << std::cos(phi), std::sin(phi);
            dirs.push_back(v);
        }
        return dirs;
    }
    for (int i = 0; i < n_dirs; ++i) {
        SplitMix64 rng(seed, static_cast<std::uint64_t>(i));
        HVec v(2 * n);
        double norm = 0.0;
        do {
            for (int j = 0; j < 2 * n; ++j) v(j) = rng.normal();
            norm = v.norm();
        } while (norm < 1e-6);
        dirs.push_back(HVec(v / norm));
    }
    return dirs;
}

}  // namespace

ResidualField admissibility_scan(int n, const HMat& D, int n_dirs, std::uint64_t seed,
                                 double tube_tol) {
    check_group_index(n);
    if (D.cwiseAbs().maxCoeff() == 0.0)
        throw DomainError("admissibility_scan: D must be nonzero");
    ResidualField field;
    field.D = D;
    for (const HVec& h : sphere_directions(n, n_dirs, seed)) {
        const HVec g = D * h + apply_J(h);
        if (g.norm() <= tube_tol) continue;  // characteristic tube
        ResidualField::Sample s;
        s.dir = h;
        s.residual = admissibility_residual(n, D, HVec(g / g.norm()));
        if (std::abs(s.residual) >= field.sup_abs) {
            field.sup_abs = std::abs(s.residual);
            field.argmax_dir = h;
        }
        field.samples.push_back(std::move(s));
    }
    if (field.samples.empty())
        throw DegenerateScan("admissibility_scan: all directions characteristic");
    return field;
}

EigenConstraintReport eigen_constraint(const HMat& Q, double tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(Q)};
    const double tr = Q.trace();
    const double tr2 = (Q * Q).trace();
    EigenConstraintReport rep;
    bool has_one = false;
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double l = es.eigenvalues()(i);
        if (std::abs(l) <= tol * scale) continue;
        rep.entries.push_back({l, -3.0 * l * l + 2.0 * tr * l + (2.0 * tr2 - tr * tr)});
        if (std::abs(l - 1.0) <= 1e-9) has_one = true;
    }
    if (has_one) rep.lambda2 = 2.0 * tr / 3.0 - 1.0;
    return rep;
}

NormBoundsReport norm_bounds(int n, int scan_count, int n_dirs, std::uint64_t seed,
                             double norm_lo, double norm_hi) {
    check_group_index(n);
    NormBoundsReport rep;
    rep.lower = 1.0 / std::sqrt(4.0 * n * n + 8.0 * n + 7.0);
    rep.scanned = scan_count;
    const std::vector<double> schedule = {1e-1, 1e-2, 1e-3, 1e-6};
    rep.envelopes.resize(schedule.size());
    for (std::size_t i = 0; i < schedule.size(); ++i)
        rep.envelopes[i].threshold = schedule[i];

    const int d = 2 * n;
    for (int k = 0; k < scan_count; ++k) {
        SplitMix64 rng(seed, static_cast<std::uint64_t>(k) + 1000003ULL);
        HMat D = HMat::Zero(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                const double v = rng.normal();
                D(i, j) = v;
                D(j, i) = v;
            }
        const double opnorm =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(D))
                .eigenvalues()
                .cwiseAbs()
                .maxCoeff();
        if (opnorm == 0.0) continue;
        const double target = rng.uniform(norm_lo, norm_hi);
        D *= target / opnorm;
        const ResidualField field = admissibility_scan(n, D, n_dirs, seed + k);
        for (auto& env : rep.envelopes) {
            if (field.sup_abs <= env.threshold) {
                env.count += 1;
                env.max_norm = std::max(env.max_norm, target);
            }
        }
    }
    return rep;
}

double bellalei_integral(int n, const HMat& D, const HVec& m,
                         const IntegrationConfig& cfg) {
    check_group_index(n);
    MeasureModel cone = MeasureModel::horizontal_graph(n, HVec::Zero(2 * n), D);
    Integrand g{[&](const HPoint& z) {
                    const double p = m.dot(z.h);
                    return p * p;
                },
                true};
    return integrate(cone, g, BallRegion{HPoint::zero(n), 1.0}, cfg).value;
}

double bellalei_sphere_form(int n, const HMat& D, const HVec& m,
                            const IntegrationConfig& cfg) {
    // (2 / (c_n (2n+3))) int_{S^{2n-1}} <m,v>^2 |(D+J)v| (1+<v,Dv>^2)^{-(2n+3)/4}
    const double cn = cn_gamma_formula(n);
    auto g = [&](const HVec& v) {
        const double mv = m.dot(v);
        const double dvv = v.dot(D * v);
        return mv * mv * (D * v + apply_J(v)).norm() *
               std::pow(1.0 + dvv * dvv, -0.25 * (2 * n + 3));
    };
    double total = 0.0;
    if (n == 1) {
        auto f = [&](double phi) {
            HVec v(2);
            v << std::cos(phi), std::sin(phi);
            return g(v);
        };
        total = gk_adaptive(f, 0.0, 2.0 * M_PI, QuadOptions{cfg.rel_tol, cfg.abs_tol, 20000})
                    .value;
    } else if (n == 2) {
        // product quadrature over S^3 in double-polar coordinates
        auto fpsi = [&](double psi) {
            const double c1 = std::cos(psi), s1 = std::sin(psi);
            auto fab = [&](double a) {
                auto fb = [&](double b) {
                    HVec v(4);
                    v << c1 * std::cos(a), c1 * std::sin(a), s1 * std::cos(b),
                        s1 * std::sin(b);
                    return g(v);
                };
                return gl_integrate(fb, 0.0, 2.0 * M_PI, cfg.gl_order);
            };
            return c1 * s1 * gl_integrate(fab, 0.0, 2.0 * M_PI, cfg.gl_order);
        };
        total = gk_adaptive(fpsi, 0.0, 0.5 * M_PI, QuadOptions{1e-9, 1e-12, 4000}).value;
    } else {
        throw IntegrationError("bellalei_sphere_form: n <= 2");
    }
    return 2.0 * total / (cn * (2 * n + 3));
}

FlatnessVerdict flatness_decision(const MomentMatrix& M, double tol, double flat_gap) {
    FlatnessVerdict v;
    v.spectrum = M.eigenvalues;
    const int d = static_cast<int>(M.eigenvalues.size());
    const double inv = 1.0 / (d - 1);
    v.min_eigenvalue = M.eigenvalues.back();
    bool top_flat = true;
    for (int i = 0; i + 1 < d; ++i)
        if (std::abs(M.eigenvalues[i] - inv) > tol) top_flat = false;
    if (v.min_eigenvalue <= tol && top_flat) {
        v.verdict = Flatness::Flat;
        v.normal = M.eigenvectors.col(d - 1);
    } else if (v.min_eigenvalue >= flat_gap) {
        v.verdict = Flatness::NotFlat;
    } else {
        v.verdict = Flatness::Inconclusive;
    }
    return v;
}

double eta_cutoff(const HPoint& z) {
    const double s = knorm(z);
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double u = s - 1.0;
    return 1.0 - 3.0 * u * u + 2.0 * u * u * u;
}

namespace {

HMat weighted_second_moment(const MeasureModel& mu, double lambda,
                            const IntegrationConfig& cfg) {
    const int d = 2 * mu.n();
    HMat W = HMat::Zero(d, d);
    // integrate eta(D_{1/lambda} z) z_H x z_H over B_{2 lambda}, then scale
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            Integrand g{[&](const HPoint& z) {
                            HPoint zs = dilate(1.0 / lambda, z);
                            return eta_cutoff(zs) * z.h(i) * z.h(j);
                        },
                        false};
            const double v =
                integrate(mu, g, BallRegion{HPoint::zero(mu.n()), 2.0 * lambda}, cfg)
                    .value;
            W(i, j) = v;
            W(j, i) = v;
        }
    return W;
}

}  // namespace

double F_functional_dilated(const MeasureModel& mu, double lambda,
                            const IntegrationConfig& cfg) {
    if (mu.m() != 2 * mu.n() + 1)
        throw DomainError("F_functional: requires a codimension-one model");
    const HMat W = weighted_second_moment(mu, lambda, cfg);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(W)};
    const double scale = std::pow(lambda, -(mu.m() + 2.0));
    return scale * es.eigenvalues().minCoeff();
}

double F_functional(const MeasureModel& mu, const IntegrationConfig& cfg) {
    return F_functional_dilated(mu, 1.0, cfg);
}

namespace {

std::vector<HPoint> support_centers(const MeasureModel& mu, int count,
                                    std::uint64_t seed) {
    std::vector<HPoint> centers;
    SplitMix64 rng(seed, 77);
    const int n = mu.n();
    for (int k = 0; k < count; ++k) {
        switch (mu.kind()) {
            case MeasureModel::Kind::FlatPlane: {
                const auto& c = mu.plane_charts()[0];
                Eigen::VectorXd xi(2 * n - 1);
                for (int i = 0; i < xi.size(); ++i) xi(i) = rng.uniform(-1.5, 1.5);
                centers.emplace_back(HVec(c.base + c.basis * xi), rng.uniform(-1.5, 1.5));
                break;
            }
            case MeasureModel::Kind::HorizontalLine:
                centers.emplace_back(HVec(rng.uniform(-1.5, 1.5) * mu.line_direction()),
                                     0.0);
                break;
            case MeasureModel::Kind::VerticalAxis:
                centers.emplace_back(HVec::Zero(2 * n), rng.uniform(-1.5, 1.5));
                break;
            case MeasureModel::Kind::VerticalCone: {
                const auto& cs = mu.plane_charts();
                const auto& c = cs[k % cs.size()];
                Eigen::VectorXd xi(2 * n - 1);
                for (int i = 0; i < xi.size(); ++i) {
                    double u = rng.uniform(0.4, 1.4);
                    if (c.half_sign == 0 && rng.uniform() < 0.5) u = -u;
                    xi(i) = u;
                }
                HVec y = c.base + c.basis * xi;
                if (c.half_sign != 0 && c.half_sign * c.half_dir.dot(y - c.base) < 0.0)
                    y = c.base - c.basis * xi;
                centers.emplace_back(y, rng.uniform(-1.5, 1.5));
                break;
            }
            case MeasureModel::Kind::HorizontalGraph: {
                HVec h(2 * n);
                for (int i = 0; i < 2 * n; ++i) h(i) = rng.uniform(-1.2, 1.2);
                if (mu.graph_domain() == MeasureModel::Domain::HalfSpace &&
                    mu.half_normal().dot(h) < 0.0)
                    h -= 2.0 * mu.half_normal().dot(h) * mu.half_normal();
                centers.emplace_back(h, mu.graph_f(h));
                break;
            }
        }
    }
    return centers;
}

}  // namespace

H1Report classify_h1(const MeasureModel& mu, double tol, std::uint64_t seed,
                     const IntegrationConfig& cfg) {
    if (mu.n() != 1) throw DomainError("classify_h1: n = 1 only");
    H1Report rep;
    const std::vector<double> radii = {0.5, 1.0, 2.0};
    for (const HPoint& c : support_centers(mu, 5, seed)) {
        for (double r : radii) {
            const double mass = ball_mass(mu, c, r, cfg).value;
            const double expect = std::pow(r, mu.m());
            rep.worst_rel_err =
                std::max(rep.worst_rel_err, std::abs(mass - expect) / expect);
        }
    }
    if (rep.worst_rel_err > tol) {
        rep.label = H1Class::NotUniform;
        return rep;
    }
    switch (mu.kind()) {
        case MeasureModel::Kind::HorizontalLine:
            rep.label = H1Class::HorizontalLine;
            break;
        case MeasureModel::Kind::VerticalAxis:
            rep.label = H1Class::VerticalAxis;
            break;
        case MeasureModel::Kind::FlatPlane:
            rep.label = H1Class::VerticalPlane;
            break;
        case MeasureModel::Kind::VerticalCone:
            // a single full plane passes as flat; anything else that survived
            // the grid is still reported by its support
            rep.label = (mu.plane_charts().size() == 1 &&
                         mu.plane_charts()[0].half_sign == 0)
                            ? H1Class::VerticalPlane
                            : H1Class::NotUniform;
            break;
        case MeasureModel::Kind::HorizontalGraph:
            rep.label = H1Class::NotUniform;
            break;
    }
    return rep;
}

const char* to_string(H1Class c) {
    switch (c) {
        case H1Class::HorizontalLine: return "HorizontalLine";
        case H1Class::VerticalAxis: return "VerticalAxis";
        case H1Class::VerticalPlane: return "VerticalPlane";
        case H1Class::NotUniform: return "NotUniform";
    }
    return "?";
}

const char* to_string(Flatness f) {
    switch (f) {
        case Flatness::Flat: return "Flat";
        case Flatness::NotFlat: return "NotFlat";
        case Flatness::Inconclusive: return "Inconclusive";
    }
    return "?";
}

}  // namespace heis
