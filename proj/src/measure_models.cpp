#include "heis/measure_models.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>

#include "heis/quadrature.hpp"
#include "heis/special.hpp"

namespace heis {

namespace {

// e^{-L} bounds every Gaussian-weighted tail we truncate.
constexpr double kTailLog = 60.0;

HMat orthonormal_complement(const HVec& unit) {
    const int d = static_cast<int>(unit.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    m.col(0) = Eigen::VectorXd(unit);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ();
    // first column of q is +-unit; the rest span the complement
    HMat basis(d, d - 1);
    basis = q.rightCols(d - 1);
    return basis;
}

HVec normalized(HVec v, const char* what) {
    const double norm = v.norm();
    if (norm <= 0.0) throw DomainError(std::string(what) + ": zero vector");
    return v / norm;
}

// The Koranyi ball criterion restricted to a line is always the sum of two
// squared quadratics; expand it into quartic coefficients for exact sections.
std::vector<double> quartic_from_squares(const std::array<double, 3>& e,
                                         const std::array<double, 3>& t) {
    std::vector<double> c(5, 0.0);
    auto add_sq = [&](const std::array<double, 3>& q) {
        c[0] += q[0] * q[0];
        c[1] += 2.0 * q[0] * q[1];
        c[2] += q[1] * q[1] + 2.0 * q[0] * q[2];
        c[3] += 2.0 * q[1] * q[2];
        c[4] += q[2] * q[2];
    };
    add_sq(e);
    add_sq(t);
    return c;
}

}  // namespace

MeasureModel MeasureModel::flat_plane(int n, HVec e) {
    check_group_index(n);
    if (e.size() != 2 * n) throw DimensionError("flat_plane: normal has wrong size");
    MeasureModel m;
    m.kind_ = Kind::FlatPlane;
    m.n_ = n;
    m.m_ = 2 * n + 1;
    m.e_ = normalized(std::move(e), "flat_plane");
    PlaneChart c;
    c.normal = m.e_;
    c.base = HVec::Zero(2 * n);
    c.basis = orthonormal_complement(m.e_);
    m.charts_.push_back(std::move(c));
    return m;
}

MeasureModel MeasureModel::horizontal_line(HVec v) {
    if (v.size() != 2) throw DimensionError("horizontal_line: n = 1 only");
    MeasureModel m;
    m.kind_ = Kind::HorizontalLine;
    m.n_ = 1;
    m.m_ = 1;
    m.e_ = normalized(std::move(v), "horizontal_line");
    return m;
}

MeasureModel MeasureModel::vertical_axis(int n) {
    check_group_index(n);
    MeasureModel m;
    m.kind_ = Kind::VerticalAxis;
    m.n_ = n;
    m.m_ = 2;
    return m;
}

MeasureModel MeasureModel::vertical_cone(int n, HMat Q, HVec b, std::vector<int> selector) {
    check_group_index(n);
    Quadric q(n, b, Q, 0.0);
    const VerticalRankReport rep = classify_vertical_rank(q);

    MeasureModel m;
    m.kind_ = Kind::VerticalCone;
    m.n_ = n;
    m.m_ = 2 * n + 1;
    m.Q_ = q.Q;
    m.b_ = q.b;
    m.selector_ = selector;

    auto plane_through = [&](const HVec& normal, const HVec& base, int half_sign,
                             const HVec& half_dir) {
        PlaneChart c;
        c.normal = normal;
        c.base = base;
        c.basis = orthonormal_complement(normal);
        c.half_sign = half_sign;
        c.half_dir = half_dir;
        return c;
    };

    if (rep.kind == VerticalRank::Rank1Flat) {
        const HVec& nn = rep.normal;
        const double beta = nn.dot(b);
        if ((b - beta * nn).norm() > 1e-10 * std::max(1.0, b.norm()))
            throw DomainError("vertical_cone: rank-1 quadric with b outside span(normal) "
                              "supports no uniform measure model");
        const double lambda = nn.dot(Q * nn);
        m.charts_.push_back(plane_through(nn, HVec::Zero(2 * n), 0, {}));
        if (std::abs(beta) > 1e-14)
            m.charts_.push_back(plane_through(nn, HVec(-(beta / lambda) * nn), 0, {}));
        return m;
    }
    if (rep.kind != VerticalRank::Rank2 || !rep.indefinite)
        throw DomainError("vertical_cone: only rank <= 2 plane unions are supported");

    // base point: particular solution of 2 Q p = -b, must lie on the quadric
    HVec p = HVec::Zero(2 * n);
    if (b.norm() > 0.0) {
        Eigen::VectorXd sol =
            Eigen::MatrixXd(2.0 * Q).completeOrthogonalDecomposition().solve(
                -Eigen::VectorXd(b));
        p = sol;
        if ((2.0 * Q * p + b).norm() > 1e-9 * std::max(1.0, b.norm()) ||
            std::abs(b.dot(p)) > 1e-9 * std::max(1.0, b.norm()))
            throw DomainError("vertical_cone: quadric is not a union of vertical planes");
    }

    // component list: 0,1 halves of V(pair_n); 2,3 halves of V(pair_m)
    const HVec mn = rep.pair_n, mm = rep.pair_m;
    if (selector.empty()) {
        m.charts_.push_back(plane_through(mn, p, 0, {}));
        m.charts_.push_back(plane_through(mm, p, 0, {}));
    } else {
        for (int id : selector) {
            switch (id) {
                case 0: m.charts_.push_back(plane_through(mn, p, +1, mm)); break;
                case 1: m.charts_.push_back(plane_through(mn, p, -1, mm)); break;
                case 2: m.charts_.push_back(plane_through(mm, p, +1, mn)); break;
                case 3: m.charts_.push_back(plane_through(mm, p, -1, mn)); break;
                default: throw DomainError("vertical_cone: component id out of range");
            }
        }
    }
    return m;
}

MeasureModel MeasureModel::horizontal_graph(int n, HVec b, HMat D, Domain domain,
                                            HVec half_normal) {
    check_group_index(n);
    if (b.size() != 2 * n || D.rows() != 2 * n || D.cols() != 2 * n)
        throw DimensionError("horizontal_graph: b or D has wrong size");
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw DomainError("horizontal_graph: D must be symmetric");
    MeasureModel m;
    m.kind_ = Kind::HorizontalGraph;
    m.n_ = n;
    m.m_ = 2 * n + 1;
    m.b_ = std::move(b);
    m.D_ = 0.5 * (D + D.transpose());
    m.domain_ = domain;
    if (domain == Domain::HalfSpace)
        m.half_normal_ = normalized(std::move(half_normal), "horizontal_graph half");
    return m;
}

double MeasureModel::graph_f(const HVec& h) const {
    return h.dot(D_ * h) + b_.dot(h);
}

double MeasureModel::graph_density(const HVec& h) const {
    return (b_ + 2.0 * (D_ * h + apply_J(h))).norm();
}

bool MeasureModel::on_support(const HPoint& z, double tol) const {
    if (z.h.size() != 2 * n_) return false;
    const double scale = 1.0 + z.h.norm() + std::abs(z.t);
    switch (kind_) {
        case Kind::FlatPlane:
            return std::abs(e_.dot(z.h)) <= tol * scale;
        case Kind::HorizontalLine:
            return (z.h - e_.dot(z.h) * e_).norm() <= tol * scale &&
                   std::abs(z.t) <= tol * scale;
        case Kind::VerticalAxis:
            return z.h.norm() <= tol * scale;
        case Kind::VerticalCone:
            for (const auto& c : charts_) {
                if (std::abs(c.normal.dot(z.h - c.base)) > tol * scale) continue;
                if (c.half_sign != 0 &&
                    c.half_sign * c.half_dir.dot(z.h - c.base) < -tol * scale)
                    continue;
                return true;
            }
            return false;
        case Kind::HorizontalGraph: {
            if (std::abs(graph_f(z.h) - z.t) > tol * scale * scale) return false;
            if (domain_ == Domain::HalfSpace && half_normal_.dot(z.h) < -tol * scale)
                return false;
            return true;
        }
    }
    return false;
}

// ---------------- integration engine ----------------

struct ModelIntegrator {
    const MeasureModel& mu;
    const IntegrationConfig& cfg;
    std::uint64_t samples = 0;

    double cn() const { return cn_gamma_formula(mu.n()); }

    QuadOptions outer_opts() const {
        return QuadOptions{cfg.rel_tol, cfg.abs_tol, 20000};
    }
    QuadOptions inner_opts() const {
        return QuadOptions{cfg.rel_tol / 50.0, cfg.abs_tol / 50.0, 20000};
    }

    // ---- ball slices of vertical plane charts ----

    // chord of the ball on the chart, n = 1 (1-dim xi)
    struct Chord {
        double lo = 0.0, hi = -1.0;  // empty when hi < lo
        double q = 0.0, delta2 = 0.0;
    };
    Chord chart_chord(const MeasureModel::PlaneChart& c, const BallRegion& ball) const {
        Chord ch;
        const HVec rel = ball.center.h - c.base;
        const double q = (c.basis.transpose() * rel)(0);
        const double delta2 = (rel - c.basis * (c.basis.transpose() * rel)).squaredNorm();
        if (delta2 > ball.r * ball.r) return ch;
        const double half = std::sqrt(ball.r * ball.r - delta2);
        ch.lo = q - half;
        ch.hi = q + half;
        ch.q = q;
        ch.delta2 = delta2;
        // half-plane restriction: sign * <half_dir, y - base> >= 0
        if (c.half_sign != 0) {
            const double slope = (c.basis.transpose() * c.half_dir)(0);
            const double cut = 0.0;
            if (c.half_sign * slope > 0)
                ch.lo = std::max(ch.lo, cut);
            else
                ch.hi = std::min(ch.hi, cut);
        }
        return ch;
    }

    IntegralResult plane_ball(const MeasureModel::PlaneChart& c, const Integrand& g,
                              const BallRegion& ball) {
        IntegralResult out;
        out.seed = cfg.seed;
        const int n = mu.n();
        const double r4 = std::pow(ball.r, 4);
        const HPoint& x0 = ball.center;

        if (n == 1) {
            Chord ch = chart_chord(c, ball);
            if (ch.hi <= ch.lo) return out;
            auto y_of = [&](double xi) -> HVec { return c.base + c.basis.col(0) * xi; };
            auto width2 = [&](double xi) {
                const double d2 = (xi - ch.q) * (xi - ch.q) + ch.delta2;
                return r4 - d2 * d2;
            };
            // chart coordinate of the group origin anchors the decay scale of
            // norm-localized integrands
            const double xi0 = -(c.basis.transpose() * c.base)(0);
            std::function<double(double)> integrand;
            if (g.horizontal_only) {
                integrand = [&](double xi) {
                    const double w2 = width2(xi);
                    if (w2 <= 0.0) return 0.0;
                    HPoint z(y_of(xi), 0.0);
                    return g.f(z) * 2.0 * std::sqrt(w2);
                };
            } else {
                integrand = [&](double xi) {
                    const double w2 = width2(xi);
                    if (w2 <= 0.0) return 0.0;
                    const HVec y = y_of(xi);
                    const double w = std::sqrt(w2);
                    const double tc = x0.t + 2.0 * x0.h.dot(apply_J(y));
                    auto ft = [&](double t) { return g.f(HPoint(y, t)); };
                    return gk_adaptive_banded(ft, tc - w, tc + w, {tc, 0.0}, inner_opts())
                        .value;
                };
            }
            QuadResult qr =
                gk_adaptive_banded(integrand, ch.lo, ch.hi, {ch.q, xi0}, outer_opts());
            out.value = qr.value / cn();
            out.abs_error_est = qr.abs_error / cn();
            out.samples = static_cast<std::uint64_t>(qr.evals);
            return out;
        }

        // n >= 2: stratified MC over the chart chord box (horizontal g only)
        if (!g.horizontal_only)
            throw IntegrationError("ball integration of t-dependent integrands on "
                                   "vertical charts requires n = 1");
        const int d = 2 * n - 1;
        const HVec rel = x0.h - c.base;
        Eigen::VectorXd q = c.basis.transpose() * rel;
        const double delta2 = (rel - c.basis * q).squaredNorm();
        if (delta2 > ball.r * ball.r) return out;
        const double half = std::sqrt(ball.r * ball.r - delta2);
        double lo[7], hi[7];
        for (int i = 0; i < d; ++i) {
            lo[i] = q(i) - half;
            hi[i] = q(i) + half;
        }
        auto fmc = [&](const double* x) {
            Eigen::VectorXd xi = Eigen::Map<const Eigen::VectorXd>(x, d);
            const double rad2 = (xi - q).squaredNorm() + delta2;
            if (rad2 * rad2 > r4) return 0.0;
            HVec y = c.base + c.basis * xi;
            if (c.half_sign != 0 && c.half_sign * c.half_dir.dot(y - c.base) < 0.0)
                return 0.0;
            const double w2 = r4 - rad2 * rad2;
            return g.f(HPoint(y, 0.0)) * 2.0 * std::sqrt(w2);
        };
        McResult mc = mc_stratified(fmc, d, lo, hi, cfg.mc_samples, cfg.seed);
        out.value = mc.value / cn();
        out.abs_error_est = mc.abs_error / cn();
        out.samples = mc.samples;
        return out;
    }

    // ---- line / axis ----

    IntegralResult line_ball(const Integrand& g, const BallRegion& ball) {
        IntegralResult out;
        out.seed = cfg.seed;
        const HVec& v = mu.line_direction();
        const HPoint& x0 = ball.center;
        const double r4 = std::pow(ball.r, 4);
        const double twist = 2.0 * x0.h.dot(apply_J(v));
        const double c0 = v.dot(x0.h);
        auto quartic = quartic_from_squares(
            {x0.h.squaredNorm(), -2.0 * c0, 1.0}, {-x0.t, -twist, 0.0});
        auto ivs = polynomial_sublevel(quartic, c0 - ball.r, c0 + ball.r, r4);
        QuadResult total;
        for (auto [a, b] : ivs) {
            auto f = [&](double xi) { return g.f(HPoint(HVec(xi * v), 0.0)); };
            QuadResult qr = gk_adaptive_banded(f, a, b, {c0, 0.0}, outer_opts());
            total.value += qr.value;
            total.abs_error += qr.abs_error;
            total.evals += qr.evals;
        }
        out.value = 0.5 * total.value;
        out.abs_error_est = 0.5 * total.abs_error;
        out.samples = static_cast<std::uint64_t>(total.evals);
        return out;
    }

    IntegralResult axis_ball(const Integrand& g, const BallRegion& ball) {
        IntegralResult out;
        out.seed = cfg.seed;
        const HPoint& x0 = ball.center;
        const double r4 = std::pow(ball.r, 4);
        const double p4 = std::pow(x0.h.squaredNorm(), 2);
        if (p4 > r4) return out;
        const double w = std::sqrt(r4 - p4);
        auto f = [&](double t) { return g.f(HPoint(HVec::Zero(2 * mu.n()), t)); };
        QuadResult qr =
            gk_adaptive_banded(f, x0.t - w, x0.t + w, {x0.t, 0.0}, outer_opts());
        out.value = 0.5 * qr.value;
        out.abs_error_est = 0.5 * qr.abs_error;
        out.samples = static_cast<std::uint64_t>(qr.evals);
        return out;
    }

    // ---- graph ----

    IntegralResult graph_ball(const Integrand& g, const BallRegion& ball) {
        IntegralResult out;
        out.seed = cfg.seed;
        const int n = mu.n();
        const HPoint& x0 = ball.center;
        const double r4 = std::pow(ball.r, 4);
        auto crit = [&](const HVec& h) {
            const double a = (h - x0.h).squaredNorm();
            const double b = mu.graph_f(h) - x0.t - 2.0 * x0.h.dot(apply_J(h));
            return a * a + b * b;
        };
        auto in_domain = [&](const HVec& h) {
            return mu.graph_domain() == MeasureModel::Domain::Full ||
                   mu.half_normal().dot(h) >= 0.0;
        };

        if (n == 1) {
            auto outer = [&](double phi) {
                HVec w(2);
                w << std::cos(phi), std::sin(phi);
                // criterion along the ray is quartic in rho
                const double t0 = mu.graph_f(x0.h) - x0.t;
                const double t1 = 2.0 * x0.h.dot(mu.graph_D() * w) + mu.graph_b().dot(w) -
                                  2.0 * x0.h.dot(apply_J(w));
                const double t2 = w.dot(mu.graph_D() * w);
                auto ivs = polynomial_sublevel(
                    quartic_from_squares({0.0, 0.0, 1.0}, {t0, t1, t2}), 0.0,
                    ball.r * 1.0000001, r4);
                double acc = 0.0;
                for (auto [a, b] : ivs) {
                    // half-space domain cuts the ray at a linear threshold
                    if (mu.graph_domain() == MeasureModel::Domain::HalfSpace) {
                        const double c0 = mu.half_normal().dot(x0.h);
                        const double c1 = mu.half_normal().dot(w);
                        if (std::abs(c1) < 1e-15) {
                            if (c0 < 0.0) continue;
                        } else {
                            const double thr = -c0 / c1;
                            if (c1 > 0.0)
                                a = std::max(a, thr);
                            else
                                b = std::min(b, thr);
                            if (b <= a) continue;
                        }
                    }
                    auto f = [&](double rho) {
                        HVec h = x0.h + rho * w;
                        return g.f(HPoint(h, mu.graph_f(h))) * mu.graph_density(h) * rho;
                    };
                    acc += gl_integrate(f, a, b, cfg.gl_order);
                }
                return acc;
            };
            QuadResult qr = gk_adaptive(outer, 0.0, 2.0 * M_PI, outer_opts());
            out.value = qr.value / cn();
            out.abs_error_est = qr.abs_error / cn();
            out.samples = static_cast<std::uint64_t>(qr.evals);
            return out;
        }

        // n >= 2: stratified MC over the bounding box of the horizontal section
        const int d = 2 * n;
        double lo[8], hi[8];
        for (int i = 0; i < d; ++i) {
            lo[i] = x0.h(i) - ball.r;
            hi[i] = x0.h(i) + ball.r;
        }
        auto fmc = [&](const double* x) {
            HVec h = Eigen::Map<const Eigen::VectorXd>(x, d);
            if (crit(h) > r4 || !in_domain(h)) return 0.0;
            return g.f(HPoint(h, mu.graph_f(h))) * mu.graph_density(h);
        };
        McResult mc = mc_stratified(fmc, d, lo, hi, cfg.mc_samples, cfg.seed);
        out.value = mc.value / cn();
        out.abs_error_est = mc.abs_error / cn();
        out.samples = mc.samples;
        return out;
    }

    IntegralResult ball(const Integrand& g, const BallRegion& region) {
        IntegralResult total;
        total.seed = cfg.seed;
        switch (mu.kind()) {
            case MeasureModel::Kind::HorizontalLine:
                return line_ball(g, region);
            case MeasureModel::Kind::VerticalAxis:
                return axis_ball(g, region);
            case MeasureModel::Kind::HorizontalGraph:
                return graph_ball(g, region);
            case MeasureModel::Kind::FlatPlane:
            case MeasureModel::Kind::VerticalCone: {
                for (const auto& c : mu.plane_charts()) {
                    IntegralResult part = plane_ball(c, g, region);
                    total.value += part.value;
                    total.abs_error_est += part.abs_error_est;
                    total.samples += part.samples;
                }
                return total;
            }
        }
        return total;
    }

    IntegralResult all(const Integrand& g) {
        // expanding Koranyi balls until the increments are negligible
        IntegralResult prev = ball(g, BallRegion{HPoint::zero(mu.n()), 4.0});
        int stable = 0;
        double r = 4.0;
        for (int k = 0; k < 12; ++k) {
            r *= 2.0;
            IntegralResult cur = ball(g, BallRegion{HPoint::zero(mu.n()), r});
            cur.samples += prev.samples;
            const double diff = std::abs(cur.value - prev.value);
            if (diff <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(cur.value))) {
                if (++stable >= 2) return cur;
            } else {
                stable = 0;
            }
            prev = cur;
        }
        throw IntegrationError("integrate: full-space integral did not stabilize; "
                               "integrand must decay");
    }
};

IntegralResult integrate(const MeasureModel& mu, const Integrand& g, const Region& region,
                         const IntegrationConfig& cfg) {
    ModelIntegrator engine{mu, cfg};
    if (std::holds_alternative<BallRegion>(region)) {
        const auto& ball = std::get<BallRegion>(region);
        if (ball.center.h.size() != 2 * mu.n())
            throw DimensionError("integrate: ball center has wrong group index");
        if (!(ball.r > 0.0)) throw DomainError("integrate: ball radius must be positive");
        return engine.ball(g, ball);
    }
    return engine.all(g);
}

// ---- Gaussian-weighted integrals ----

namespace {

struct GaussEngine {
    const MeasureModel& mu;
    double s;
    const std::function<void(const HPoint&, double*)>& F;
    int dim;
    const IntegrationConfig& cfg;

    double weight(const HPoint& z) const {
        const double k2 = std::hypot(z.h.squaredNorm(), z.t);
        return std::exp(-s * k2 * k2);
    }

    QuadOptions outer_opts() const { return {cfg.rel_tol, cfg.abs_tol, 40000}; }
    QuadOptions inner_opts() const {
        return {cfg.rel_tol / 50.0, cfg.abs_tol / 50.0, 40000};
    }

    std::vector<double> run() const {
        std::vector<double> total(dim, 0.0);
        switch (mu.kind()) {
            case MeasureModel::Kind::HorizontalLine: {
                const double sc = std::pow(s, -0.25);
                const double R = std::pow(kTailLog, 0.25);
                auto f = [&](double xh, double* out) {
                    HPoint z(HVec(sc * xh * mu.line_direction()), 0.0);
                    F(z, out);
                    const double w = weight(z);
                    for (int c = 0; c < dim; ++c) out[c] *= w;
                };
                auto res = gk_adaptive_vec(f, dim, -R, R, outer_opts());
                for (int c = 0; c < dim; ++c) total[c] = 0.5 * sc * res.value[c];
                return total;
            }
            case MeasureModel::Kind::VerticalAxis: {
                const double sc = std::pow(s, -0.5);
                const double R = std::sqrt(kTailLog);
                auto f = [&](double th, double* out) {
                    HPoint z(HVec::Zero(2 * mu.n()), sc * th);
                    F(z, out);
                    const double w = weight(z);
                    for (int c = 0; c < dim; ++c) out[c] *= w;
                };
                auto res = gk_adaptive_vec(f, dim, -R, R, outer_opts());
                for (int c = 0; c < dim; ++c) total[c] = 0.5 * sc * res.value[c];
                return total;
            }
            case MeasureModel::Kind::FlatPlane:
            case MeasureModel::Kind::VerticalCone: {
                for (const auto& chart : mu.plane_charts()) plane_chart(chart, total);
                return total;
            }
            case MeasureModel::Kind::HorizontalGraph: {
                graph_chart(total);
                return total;
            }
        }
        return total;
    }

    void plane_chart(const MeasureModel::PlaneChart& c, std::vector<double>& total) const {
        const int n = mu.n();
        const double cn = cn_gamma_formula(n);
        const double sy = std::pow(s, -0.25), st = std::pow(s, -0.5);
        const double Ry = std::pow(kTailLog, 0.25) + std::pow(s, 0.25) * c.base.norm();
        const double Rt = std::sqrt(kTailLog);

        if (n == 1) {
            const double jac = sy * st;
            double xlo = -Ry, xhi = Ry;
            if (c.half_sign != 0) {
                const double slope = (c.basis.transpose() * c.half_dir)(0);
                if (c.half_sign * slope > 0)
                    xlo = 0.0;
                else
                    xhi = 0.0;
            }
            auto outer = [&](double xh, double* out) {
                const HVec y = c.base + c.basis.col(0) * (sy * xh);
                auto inner = [&](double th, double* o2) {
                    HPoint z(y, st * th);
                    F(z, o2);
                    const double w = weight(z);
                    for (int cc = 0; cc < dim; ++cc) o2[cc] *= w;
                };
                auto res = gk_adaptive_vec(inner, dim, -Rt, Rt, inner_opts());
                for (int cc = 0; cc < dim; ++cc) out[cc] = res.value[cc];
            };
            auto res = gk_adaptive_vec(outer, dim, xlo, xhi, outer_opts());
            for (int cc = 0; cc < dim; ++cc) total[cc] += jac * res.value[cc] / cn;
            return;
        }

        // n >= 2: stratified MC in scaled chart coordinates
        const int d = 2 * n;  // (2n-1) chart dims + t
        double lo[8], hi[8];
        for (int i = 0; i + 1 < d; ++i) {
            lo[i] = -Ry;
            hi[i] = Ry;
        }
        lo[d - 1] = -Rt;
        hi[d - 1] = Rt;
        const double jac = std::pow(sy, d - 1) * st;
        for (int comp = 0; comp < dim; ++comp) {
            auto fmc = [&](const double* x) {
                Eigen::VectorXd xi(d - 1);
                for (int i = 0; i + 1 < d; ++i) xi(i) = sy * x[i];
                HVec y = c.base + c.basis * xi;
                if (c.half_sign != 0 && c.half_sign * c.half_dir.dot(y - c.base) < 0.0)
                    return 0.0;
                HPoint z(y, st * x[d - 1]);
                std::vector<double> tmp(dim);
                F(z, tmp.data());
                return tmp[comp] * weight(z);
            };
            McResult mc = mc_stratified(fmc, d, lo, hi, cfg.mc_samples, cfg.seed + comp);
            total[comp] += jac * mc.value / cn;
        }
    }

    void graph_chart(std::vector<double>& total) const {
        const int n = mu.n();
        const double cn = cn_gamma_formula(n);
        const double sh = std::pow(s, -0.25);
        const double R = std::pow(kTailLog, 0.25) * 1.2;

        auto eval = [&](const HVec& h, double* out) {
            HPoint z(h, mu.graph_f(h));
            F(z, out);
            const double w = weight(z) * mu.graph_density(h);
            for (int cc = 0; cc < dim; ++cc) out[cc] *= w;
        };
        auto in_domain = [&](const HVec& h) {
            return mu.graph_domain() == MeasureModel::Domain::Full ||
                   mu.half_normal().dot(h) >= 0.0;
        };

        if (n == 1) {
            auto outer = [&](double x1, double* out) {
                auto inner = [&](double x2, double* o2) {
                    HVec h(2);
                    h << sh * x1, sh * x2;
                    if (!in_domain(h)) {
                        std::fill(o2, o2 + dim, 0.0);
                        return;
                    }
                    eval(h, o2);
                };
                auto res = gk_adaptive_vec(inner, dim, -R, R, inner_opts());
                for (int cc = 0; cc < dim; ++cc) out[cc] = res.value[cc];
            };
            auto res = gk_adaptive_vec(outer, dim, -R, R, outer_opts());
            const double jac = sh * sh;
            for (int cc = 0; cc < dim; ++cc) total[cc] += jac * res.value[cc] / cn;
            return;
        }

        const int d = 2 * n;
        double lo[8], hi[8];
        for (int i = 0; i < d; ++i) {
            lo[i] = -R;
            hi[i] = R;
        }
        const double jac = std::pow(sh, d);
        for (int comp = 0; comp < dim; ++comp) {
            auto fmc = [&](const double* x) {
                HVec h(d);
                for (int i = 0; i < d; ++i) h(i) = sh * x[i];
                if (!in_domain(h)) return 0.0;
                std::vector<double> tmp(dim);
                eval(h, tmp.data());
                return tmp[comp];
            };
            McResult mc = mc_stratified(fmc, d, lo, hi, cfg.mc_samples, cfg.seed + comp);
            total[comp] += jac * mc.value / cn;
        }
    }
};

}  // namespace

std::vector<double> integrate_gauss_vec(const MeasureModel& mu, double s,
                                        const std::function<void(const HPoint&, double*)>& F,
                                        int dim, const IntegrationConfig& cfg) {
    if (!(s > 0.0)) throw DomainError("integrate_gauss: s must be positive");
    GaussEngine eng{mu, s, F, dim, cfg};
    return eng.run();
}

double integrate_gauss(const MeasureModel& mu, double s,
                       const std::function<double(const HPoint&)>& F,
                       const IntegrationConfig& cfg) {
    auto wrap = [&](const HPoint& z, double* out) { out[0] = F(z); };
    return integrate_gauss_vec(mu, s, wrap, 1, cfg)[0];
}

IntegralResult ball_mass(const MeasureModel& mu, const HPoint& center, double r,
                         const IntegrationConfig& cfg) {
    if (!mu.on_support(center, 1e-7))
        throw SupportError("ball_mass: center is not on the support");
    Integrand one{[](const HPoint&) { return 1.0; }, true};
    return integrate(mu, one, BallRegion{center, r}, cfg);
}

IntegralResult cn_constant(int n, CnMethod method, const IntegrationConfig& cfg) {
    check_group_index(n);
    IntegralResult out;
    out.seed = cfg.seed;
    if (method == CnMethod::GammaFormula) {
        out.value = cn_gamma_formula(n);
        return out;
    }
    // Euclidean area of the unit-ball slice of a vertical hyperplane,
    // computed from the slab geometry: thickness 2 sqrt(1-|y|^4) over the
    // (2n-1)-dimensional unit ball of the horizontal footprint.
    if (n == 1) {
        auto f = [](double x) { return std::sqrt(std::max(0.0, 1.0 - x * x * x * x)); };
        QuadResult qr = gk_adaptive(f, 0.0, 1.0, QuadOptions{1e-12, 1e-15, 20000});
        out.value = 4.0 * qr.value;
        out.abs_error_est = 4.0 * qr.abs_error;
        out.samples = static_cast<std::uint64_t>(qr.evals);
        return out;
    }
    const int d = 2 * n - 1;
    double lo[7], hi[7];
    for (int i = 0; i < d; ++i) {
        lo[i] = -1.0;
        hi[i] = 1.0;
    }
    auto f = [&](const double* x) {
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
        const double r4 = r2 * r2;
        if (r4 >= 1.0) return 0.0;
        return 2.0 * std::sqrt(1.0 - r4);
    };
    McResult mc = mc_stratified(f, d, lo, hi, cfg.mc_samples, cfg.seed);
    out.value = mc.value;
    out.abs_error_est = mc.abs_error;
    out.samples = mc.samples;
    return out;
}

// ---------------- omega measures ----------------

OmegaMeasure OmegaMeasure::full_slice(int n, HVec e) {
    check_group_index(n);
    OmegaMeasure om;
    om.kind_ = Kind::FullSlice;
    om.n_ = n;
    om.e_ = normalized(std::move(e), "full_slice");
    return om;
}

OmegaMeasure OmegaMeasure::plane_pair(int n, HVec n_dir, HVec m_dir, int half_n,
                                      int half_m) {
    check_group_index(n);
    OmegaMeasure om;
    om.kind_ = Kind::PlanePair;
    om.n_ = n;
    om.n_dir_ = normalized(std::move(n_dir), "plane_pair");
    om.m_dir_ = normalized(std::move(m_dir), "plane_pair");
    if (std::abs(om.n_dir_.dot(om.m_dir_)) > 1.0 - 1e-12)
        throw DegenerateOmega("plane_pair: directions must be distinct");
    om.half_n_ = half_n;
    om.half_m_ = half_m;
    return om;
}

OmegaMeasure OmegaMeasure::sampler(int n, std::vector<HVec> dirs,
                                   std::vector<double> weights) {
    check_group_index(n);
    if (dirs.size() != weights.size() || dirs.empty())
        throw DegenerateOmega("sampler: dirs/weights mismatch");
    OmegaMeasure om;
    om.kind_ = Kind::Sampler;
    om.n_ = n;
    for (auto& d : dirs) om.dirs_.push_back(normalized(std::move(d), "sampler"));
    om.weights_ = std::move(weights);
    double mass = 0.0;
    for (double w : om.weights_) {
        if (w < 0.0) throw DegenerateOmega("sampler: negative weight");
        mass += w;
    }
    if (mass <= 0.0) throw DegenerateOmega("sampler: zero mass");
    return om;
}

namespace {

// integral of g over the slice sphere S^{2n-1} cap e^perp, optionally the
// hemisphere sign<href, v> >= 0
double slice_integral(int n, const HVec& e, const std::function<double(const HVec&)>& g,
                      int gl_order, const HVec* href = nullptr, int half = 0) {
    if (n == 1) {
        HVec u = apply_J(e);
        double acc = 0.0;
        for (int sgn : {+1, -1}) {
            HVec v = sgn * u;
            if (half != 0 && href && half * href->dot(v) < 0.0) continue;
            acc += g(v);
        }
        return acc;
    }
    if (n == 2) {
        HMat basis = orthonormal_complement(e);  // 4 x 3
        HVec f1 = basis.col(0), f2 = basis.col(1), f3 = basis.col(2);
        if (half != 0 && href) {
            // align the polar axis with the hemisphere reference
            HVec p = *href - href->dot(e) * e;
            if (p.norm() > 1e-13) {
                f1 = p / p.norm();
                HMat rest = orthonormal_complement(f1);
                // pick two columns orthogonal to e
                std::vector<HVec> cols;
                for (int i = 0; i < rest.cols(); ++i) {
                    HVec c = rest.col(i) - rest.col(i).dot(e) * e;
                    for (const auto& prev : cols) c -= c.dot(prev) * prev;
                    if (c.norm() > 1e-8) cols.push_back(HVec(c / c.norm()));
                }
                f2 = cols.at(0);
                f3 = cols.at(1);
            }
        }
        const double clo = (half != 0) ? 0.0 : -1.0;
        auto fc = [&](double c) {
            const double sfac = std::sqrt(std::max(0.0, 1.0 - c * c));
            auto fphi = [&](double phi) {
                HVec v = c * f1 + sfac * (std::cos(phi) * f2 + std::sin(phi) * f3);
                return g(v);
            };
            return gl_integrate(fphi, 0.0, 2.0 * M_PI, gl_order);
        };
        return gl_integrate(fc, clo, 1.0, gl_order);
    }
    throw IntegrationError("slice sphere quadrature implemented for n <= 2");
}

}  // namespace

double OmegaMeasure::integral(const std::function<double(const HVec&)>& g,
                              int gl_order) const {
    switch (kind_) {
        case Kind::FullSlice:
            return slice_integral(n_, e_, g, gl_order);
        case Kind::PlanePair: {
            double acc = slice_integral(n_, n_dir_, g, gl_order, &m_dir_, half_n_);
            acc += slice_integral(n_, m_dir_, g, gl_order, &n_dir_, half_m_);
            return acc;
        }
        case Kind::Sampler: {
            double acc = 0.0;
            for (std::size_t i = 0; i < dirs_.size(); ++i) acc += weights_[i] * g(dirs_[i]);
            return acc;
        }
    }
    return 0.0;
}

double omega_mass(const OmegaMeasure& om) {
    switch (om.kind()) {
        case OmegaMeasure::Kind::FullSlice:
            return slice_sphere_area(om.n());
        case OmegaMeasure::Kind::PlanePair: {
            const double s = slice_sphere_area(om.n());
            return (om.half_n() ? 0.5 : 1.0) * s + (om.half_m() ? 0.5 : 1.0) * s;
        }
        case OmegaMeasure::Kind::Sampler: {
            double mass = 0.0;
            for (double w : om.weights()) mass += w;
            return mass;
        }
    }
    return 0.0;
}

MomentMatrix second_moment(const OmegaMeasure& om) {
    const int d = 2 * om.n();
    const double mass = omega_mass(om);
    if (mass <= 0.0) throw DegenerateOmega("second_moment: zero mass");
    HMat M = HMat::Zero(d, d);
    const double denom = 2.0 * om.n() - 1.0;
    switch (om.kind()) {
        case OmegaMeasure::Kind::FullSlice:
            M = (HMat::Identity(d, d) - om.e() * om.e().transpose()) / denom;
            break;
        case OmegaMeasure::Kind::PlanePair: {
            // The second moment of a (hemi)sphere slice is the same as the
            // full slice: the integrand is even.
            const double s = slice_sphere_area(om.n());
            const double a = (om.half_n() ? 0.5 : 1.0) * s;
            const double b = (om.half_m() ? 0.5 : 1.0) * s;
            HMat Mn = (HMat::Identity(d, d) - om.n_dir() * om.n_dir().transpose()) / denom;
            HMat Mm = (HMat::Identity(d, d) - om.m_dir() * om.m_dir().transpose()) / denom;
            M = (a * Mn + b * Mm) / (a + b);
            break;
        }
        case OmegaMeasure::Kind::Sampler: {
            for (std::size_t i = 0; i < om.dirs().size(); ++i)
                M += om.weights()[i] * om.dirs()[i] * om.dirs()[i].transpose();
            M /= mass;
            break;
        }
    }
    MomentMatrix out;
    out.M = M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(M)};
    out.eigenvectors = HMat(d, d);
    for (int i = 0; i < d; ++i) {
        out.eigenvalues.push_back(es.eigenvalues()(d - 1 - i));
        out.eigenvectors.col(i) = es.eigenvectors().col(d - 1 - i);
    }
    double tr = 0.0;
    for (double a : out.eigenvalues) tr += a;
    if (std::abs(tr - 1.0) > 1e-8)
        throw DegenerateOmega("second_moment: trace deviates from 1");
    return out;
}

double rapp2_integral(const OmegaMeasure& om, const std::function<double(double)>& f,
                      const std::function<double(const HVec&)>& g, Rapp2Form form,
                      const IntegrationConfig& cfg) {
    const int n = om.n();
    const double cn = cn_gamma_formula(n);
    auto sphere = [&](double r) {
        return om.integral([&](const HVec& v) { return g(HVec(r * v)); }, cfg.gl_order);
    };
    if (form == Rapp2Form::BallRestricted) {
        auto fr = [&](double r) {
            return std::pow(r, 2 * n - 2) * std::sqrt(std::max(0.0, 1.0 - std::pow(r, 4))) *
                   sphere(r);
        };
        QuadResult qr = gk_adaptive(fr, 0.0, 1.0, QuadOptions{cfg.rel_tol, cfg.abs_tol, 20000});
        return 2.0 / cn * qr.value;
    }
    // FullWeighted: f and g must decay
    auto fr = [&](double r) { return std::pow(r, 2 * n - 2) * sphere(r); };
    double radial = 0.0, prev = -1.0, R = 2.0;
    for (int k = 0; k < 12 && std::abs(radial - prev) >
                                  std::max(cfg.abs_tol, cfg.rel_tol * std::abs(radial));
         ++k) {
        prev = radial;
        radial = gk_adaptive(fr, 0.0, R, QuadOptions{cfg.rel_tol, cfg.abs_tol, 20000}).value;
        R *= 2.0;
    }
    double tint = 0.0;
    prev = -1.0;
    double T = 4.0;
    for (int k = 0; k < 12 && std::abs(tint - prev) >
                                  std::max(cfg.abs_tol, cfg.rel_tol * std::abs(tint));
         ++k) {
        prev = tint;
        tint = gk_adaptive(f, -T, T, QuadOptions{cfg.rel_tol, cfg.abs_tol, 20000}).value;
        T *= 2.0;
    }
    return tint * radial / cn;
}

}  // namespace heis
