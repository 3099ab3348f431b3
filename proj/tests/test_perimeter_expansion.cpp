#include <doctest.h>

#include <cmath>

#include "heis/perimeter_expansion.hpp"
#include "heis/quadrature.hpp"
#include "heis/special.hpp"
#include "test_util.hpp"

using namespace heis;
using namespace heis::test;

namespace {

ExpansionFrame frame_id() {
    return ExpansionFrame::make(HMat(HMat::Identity(2, 2)), hvec2(1, 0));
}

ExpansionFrame frame_saddle() {
    HMat D(2, 2);
    D << 1, 0, 0, -1;
    return ExpansionFrame::make(D, hvec2(1, 0));
}

SplitMix64 make_rng(std::uint64_t s) { return SplitMix64(s); }

HVec random_slice_dir(SplitMix64& rng, const ExpansionFrame& fr) {
    if (fr.n == 1) return (rng.uniform() < 0.5 ? 1.0 : -1.0) * apply_J(fr.normal);
    HVec v(2 * fr.n);
    do {
        for (int i = 0; i < 2 * fr.n; ++i) v(i) = rng.normal();
        v -= v.dot(fr.normal) * fr.normal;
    } while (v.norm() < 1e-8);
    return v / v.norm();
}

}  // namespace

TEST_SUITE("perimeter_expansion") {

TEST_CASE("frame construction") {
    auto fr = frame_id();
    CHECK(fr.c == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(fr.alpha_n == doctest::Approx(1.0));
    CHECK(fr.dist_sigma == doctest::Approx(1.0));
    CHECK(fr.r_max == doctest::Approx(0.1));
    CHECK(std::abs(fr.normal.dot(hvec2(1, -1)) / std::sqrt(2.0)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(ExpansionFrame::make(HMat(HMat::Identity(2, 2)), hvec2(0, 0)),
                    CharacteristicPointError);
}

TEST_CASE("polar coordinates") {
    auto fr = frame_id();
    SUBCASE("theta = 0 is the straight ray") {
        HVec v = apply_J(fr.normal);
        HVec w = polar_map(fr, 0.0, 0.7, v);
        CHECK((w - (fr.x + 0.7 * v)).norm() <= 1e-14);
        // unit step orthogonal to the normal inverts to theta=0, rho=1
        auto pc = polar_inverse(fr, HVec(fr.x + v));
        CHECK(pc.theta == doctest::Approx(0.0));
        CHECK(pc.rho == doctest::Approx(1.0));
    }
    SUBCASE("round trips") {
        auto rng = make_rng(41);
        for (int i = 0; i < 1000; ++i) {
            const double theta = rng.uniform(-0.5 * M_PI + 1e-6, 0.5 * M_PI - 1e-6);
            const double rho = std::exp(rng.uniform(-2.0, 0.5));
            HVec v = random_slice_dir(rng, fr);
            HVec w = polar_map(fr, theta, rho, v);
            auto pc = polar_inverse(fr, w);
            CHECK(pc.theta == doctest::Approx(theta).epsilon(1e-10));
            CHECK(pc.rho == doctest::Approx(rho).epsilon(1e-10));
            CHECK((pc.v - v).norm() <= 1e-10);
        }
    }
    SUBCASE("axis points are rejected") {
        CHECK_THROWS_AS(polar_inverse(fr, HVec(fr.x + 0.3 * fr.normal)), AxisError);
    }
}

TEST_CASE("polynomial coefficients of the ball criterion") {
    auto fr = frame_id();
    HVec v = apply_J(fr.normal);
    SUBCASE("theta = 0 leaves only the quartic term") {
        auto h = h_coefficients(fr, 0.0, v);
        const double g = fr.gamma(v);
        CHECK(h.A == doctest::Approx(1.0 + g * g));
        CHECK(h.Bbar == doctest::Approx(0.0));
        CHECK(h.Cbar == doctest::Approx(0.0));
        CHECK(h.Dbar == doctest::Approx(0.0));
        CHECK(h.Ebar == doctest::Approx(0.0));
        CHECK(h_eval(fr, 0.0, 0.5, v) ==
              doctest::Approx((1.0 + g * g) * 0.0625).epsilon(1e-13));
    }
    SUBCASE("matches the Cartesian criterion") {
        auto rng = make_rng(42);
        for (const ExpansionFrame& fr2 : {frame_id(), frame_saddle()}) {
            for (int i = 0; i < 1000; ++i) {
                const double theta = rng.uniform(-0.5 * M_PI, 0.5 * M_PI);
                const double rho = std::exp(rng.uniform(-2.0, 0.3));
                HVec v2 = random_slice_dir(rng, fr2);
                const double lhs = h_eval(fr2, theta, rho, v2);
                const double rhs =
                    ball_criterion(fr2, HVec(polar_map(fr2, theta, rho, v2) - fr2.x));
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
            }
        }
    }
    SUBCASE("leading coefficient bounded away from zero") {
        CHECK(frame_id().min_A() > 0.0);
        CHECK(frame_saddle().min_A() > 0.0);
    }
    SUBCASE("parity in the slice direction") {
        // A, C are even and B, D odd in v; E does not depend on v.  These
        // cancellations are what remove the r^{2n+2} term of the expansion.
        // (B is not odd under theta alone: at gamma(v) = 0 it is even.)
        auto rng = make_rng(43);
        for (int i = 0; i < 100; ++i) {
            const double th = rng.uniform(-1.4, 1.4);
            HVec v = random_slice_dir(rng, frame_saddle());
            auto fr2 = frame_saddle();
            auto a = h_coefficients(fr2, th, v);
            auto b = h_coefficients(fr2, th, HVec(-v));
            auto c = h_coefficients(fr2, -th, v);
            CHECK(a.A == doctest::Approx(b.A).epsilon(1e-12));
            CHECK(a.Cbar == doctest::Approx(b.Cbar).epsilon(1e-12));
            CHECK(a.Bbar == doctest::Approx(-b.Bbar).epsilon(1e-12));
            CHECK(a.Dbar == doctest::Approx(-b.Dbar).epsilon(1e-12));
            CHECK(a.Dbar == doctest::Approx(-c.Dbar).epsilon(1e-12));
            CHECK(a.Ebar == doctest::Approx(c.Ebar).epsilon(1e-12));
        }
    }
}

TEST_CASE("radius expansion against the root solver") {
    auto rng = make_rng(44);
    for (const ExpansionFrame& fr : {frame_id(), frame_saddle()}) {
        SUBCASE("leading slope") {
            HVec v = apply_J(fr.normal);
            const double r = 1e-3;
            const double slope = rho_expansion(fr, 0.0, v, r) / r;
            CHECK(slope ==
                  doctest::Approx(std::pow(h_coefficients(fr, 0.0, v).A, -0.25))
                      .epsilon(1e-5));
        }
        SUBCASE("agreement at r = 1e-2") {
            for (int i = 0; i < 100; ++i) {
                const double theta = rng.uniform(-1.5, 1.5);
                HVec v = random_slice_dir(rng, fr);
                const double r = 1e-2;
                const double pred = rho_expansion(fr, theta, v, r);
                const double root = rho_root(fr, theta, v, r);
                CHECK(std::abs(pred - root) <= 1e-7);
            }
        }
    }
    CHECK_THROWS_AS(rho_expansion(frame_id(), 0.0, apply_J(frame_id().normal), 0.5),
                    DomainError);
}

TEST_CASE("density expansion") {
    auto rng = make_rng(45);
    for (const ExpansionFrame& fr : {frame_id(), frame_saddle()}) {
        SUBCASE("finite differences") {
            for (int i = 0; i < 40; ++i) {
                const double theta = rng.uniform(-1.5, 1.5);
                HVec v = random_slice_dir(rng, fr);
                auto de = density_expansion(fr, theta, v);
                auto f = [&](double rho) {
                    const HVec w = polar_map(fr, theta, rho, v) - fr.x;
                    const HVec p = fr.x + w;
                    return 2.0 * (fr.D * p + apply_J(p)).norm();
                };
                const double h = 1e-4;
                CHECK(f(0.0) == doctest::Approx(fr.c).epsilon(1e-12));
                const double d1 = (f(h) - f(-h)) / (2 * h);
                const double d2 = (f(h) - 2 * f(0.0) + f(-h)) / (h * h);
                CHECK(std::abs(d1 - de.lin) <= 1e-6 * (1 + std::abs(de.lin)));
                CHECK(std::abs(0.5 * d2 - de.quad) <= 1e-6 * (1 + std::abs(de.quad)));
            }
        }
        SUBCASE("oddness of the linear part") {
            for (int i = 0; i < 100; ++i) {
                const double theta = rng.uniform(-1.5, 1.5);
                HVec v = random_slice_dir(rng, fr);
                auto a = density_expansion(fr, theta, v);
                auto b = density_expansion(fr, theta, HVec(-v));
                CHECK(a.lin == doctest::Approx(-b.lin).epsilon(1e-12));
                CHECK(a.quad == doctest::Approx(b.quad).epsilon(1e-12));
            }
        }
    }
    // the linear coefficient carries a cos factor
    auto de = density_expansion(frame_id(), 0.5 * M_PI - 1e-12,
                                HVec(apply_J(frame_id().normal)));
    CHECK(std::abs(de.lin) <= 1e-10);
}

TEST_CASE("perimeter ball") {
    auto fr = frame_id();
    SUBCASE("polar and Cartesian routes agree") {
        for (double r : {0.02, 0.05}) {
            const double a = perimeter_ball(fr, r).value;
            const double b = perimeter_ball_cartesian(fr, r).value;
            CHECK(std::abs(a - b) / a <= 1e-6);
        }
    }
    SUBCASE("leading behaviour") {
        const double cn = cn_gamma_formula(1);
        double prev_gap = 1e9;
        for (double r : {0.2, 0.1, 0.05}) {
            const double lead = perimeter_ball(fr, r).value / std::pow(r, 3);
            const double gap = std::abs(lead - cn);
            CHECK(gap < 0.01 * cn);
            CHECK(gap <= prev_gap * 1.0001);
            prev_gap = gap;
        }
    }
    SUBCASE("monotone in r") {
        double prev = 0.0;
        for (double r : {0.02, 0.04, 0.06, 0.08, 0.10, 0.15}) {
            const double v = perimeter_ball(fr, r).value;
            CHECK(v > prev);
            prev = v;
        }
    }
    SUBCASE("n = 2 leading and third coefficients") {
        HMat D4 = HMat::Identity(4, 4);
        HVec x4(4);
        x4 << 1, 0, 0, 0;
        auto fr2 = ExpansionFrame::make(D4, x4);
        IntegrationConfig cfg{1e-7, 1e-10, 100000, 1, 32};
        const double c2 = cn_gamma_formula(2);
        const double lead1 = perimeter_ball(fr2, 0.10, cfg).value / std::pow(0.10, 5);
        const double lead2 = perimeter_ball(fr2, 0.05, cfg).value / std::pow(0.05, 5);
        CHECK(std::abs(lead1 - c2) <= 0.01 * c2);
        CHECK(std::abs(lead2 - c2) <= 0.01 * c2);
        // the slope of lead(r) against r^2 recovers the third coefficient
        const double slope = (lead1 - lead2) / (0.01 - 0.0025);
        CHECK(slope == doctest::Approx(coeff_e_full(fr2)).epsilon(0.05));
    }
}

TEST_CASE("slice integrals") {
    SUBCASE("closed forms") {
        CHECK(conto1(0, 1.0) == doctest::Approx(M_PI).epsilon(1e-14));
        CHECK(conto1(1, 2.0) == 0.0);
        CHECK(conto1(3, 9.0) == 0.0);
        CHECK(conto1(2, 2.25) ==
              doctest::Approx(gamma_fn(1.5) * gamma_fn(0.75) / gamma_fn(2.25))
                  .epsilon(1e-14));
        CHECK(conto1(2, 2.25) == doctest::Approx(0.95853).epsilon(1e-4));
        CHECK_THROWS_AS(conto1(2, 1.5), DomainError);
        CHECK_THROWS_AS(conto1(-1, 3.0), DomainError);
    }
    SUBCASE("conto1 against quadrature") {
        for (int k : {0, 2, 4})
            for (double alpha : {2.25, 2.75, 3.25}) {
                if (!(alpha > 0.5 * (k + 1))) continue;
                auto f = [&](double tau) {
                    const double x = std::sinh(tau);
                    return std::pow(x, k) * std::pow(std::cosh(tau), 1.0 - 2.0 * alpha);
                };
                const double T = 45.0 / (2.0 * alpha - k - 1.0) + 5.0;
                const double quad =
                    gk_adaptive(f, -T, T, QuadOptions{1e-13, 1e-16, 20000}).value;
                CHECK(std::abs(quad - conto1(k, alpha)) <= 1e-10);
            }
    }
    SUBCASE("theta substitution identity") {
        for (int k : {0, 2, 4})
            for (double alpha : {2.25, 2.75, 3.25}) {
                if (!(alpha > 0.5 * (k + 1))) continue;
                for (double gamma : {-1.0, 0.0, 1.0}) {
                    auto f = [k](double x) { return std::pow(x, k); };
                    CHECK(conto2_check(f, alpha, gamma, 1) <= 1e-10);
                }
            }
    }
}

TEST_CASE("closed third coefficient") {
    auto fr = frame_id();
    CHECK(coeff_e_closed(fr) == doctest::Approx(-0.125).epsilon(1e-14));
    CHECK(coeff_e_full(fr) == doctest::Approx(-0.0599070).epsilon(1e-5));

    SUBCASE("integral form oracle") {
        // assemble the theta-integral form of the third coefficient and
        // compare with the closed bracket; the dense frame activates every
        // term (alpha, beta, gamma and the J-coupling all nonzero)
        HMat dense(2, 2);
        dense << 0.8, -0.45, -0.45, -0.3;
        auto frame_dense = ExpansionFrame::make(dense, hvec2(0.7, 0.4));
        for (const ExpansionFrame& fr2 : {frame_id(), frame_saddle(), frame_dense}) {
            double total = 0.0;
            for (int sgn : {+1, -1}) {
                HVec v = sgn * apply_J(fr2.normal);
                auto f = [&](double th) {
                    auto h = h_coefficients(fr2, th, v);
                    auto de = density_expansion(fr2, th, v);
                    const double ct = std::cos(th), st = std::sin(th);
                    const double dd = ct * ct + 2.0 * st * st;  // n = 1
                    const double n = 1.0;
                    const double term =
                        (7.0 / 32.0 + n / 16.0) * h.Bbar * h.Bbar / (h.A * h.A) -
                        h.Cbar / (4.0 * h.A) - de.lin * h.Bbar / (4.0 * h.A) +
                        fr2.c * de.quad / (2.0 * n + 3.0);
                    return dd * term / std::pow(h.A, 0.25 * (2.0 * n + 3.0));
                };
                total += gk_adaptive(f, -0.5 * M_PI, 0.5 * M_PI,
                                     QuadOptions{1e-12, 1e-15, 20000})
                             .value;
            }
            total /= fr2.c * fr2.c;
            CHECK(total == doctest::Approx(coeff_e_full(fr2)).epsilon(1e-8));
        }
    }
    SUBCASE("even in the normal") {
        auto rng = make_rng(46);
        for (int i = 0; i < 50; ++i) {
            HMat D = random_symmetric(rng, 2);
            HVec nn = hvec2(std::cos(rng.uniform(0, 2 * M_PI)),
                            std::sin(rng.uniform(0, 2 * M_PI)));
            CHECK(admissibility_residual(1, D, nn) ==
                  doctest::Approx(admissibility_residual(1, D, HVec(-nn)))
                      .epsilon(1e-13));
        }
    }
}

TEST_CASE("coefficient fit") {
    auto fr = frame_id();
    std::vector<double> grid;
    for (int i = 0; i < 9; ++i) grid.push_back(0.02 + 0.01 * i);
    auto rep = coeff_fit(fr, grid);
    CHECK(std::abs(rep.c_fit - rep.c_closed) <= 0.01 * rep.c_closed);
    CHECK(std::abs(rep.d_fit) <= 0.01 * rep.c_fit);
    CHECK(std::abs(rep.e_fit - rep.e_closed) <= 0.05 * std::abs(rep.e_closed));

    SUBCASE("residual shrinks with the grid") {
        std::vector<double> half;
        for (double r : grid) half.push_back(0.5 * r);
        auto rep2 = coeff_fit(fr, half);
        CHECK(rep2.residual_norm <= rep.residual_norm);
    }
    SUBCASE("degenerate grids") {
        CHECK_THROWS_AS(coeff_fit(fr, {0.02, 0.04}), FitError);
    }
}

TEST_CASE("constraint residual") {
    HMat I2 = HMat::Identity(2, 2);
    CHECK(constraint_residual(1, I2, hvec2(1, 0)) == doctest::Approx(-0.125).epsilon(1e-14));
    CHECK(constraint_residual(1, I2, hvec2(0, 1)) == doctest::Approx(-0.125).epsilon(1e-14));
    // scale invariance and evenness
    auto rng = make_rng(47);
    for (int i = 0; i < 100; ++i) {
        HMat D = random_symmetric(rng, 2);
        HVec h = hvec2(rng.normal(), rng.normal());
        double base;
        try {
            base = constraint_residual(1, D, h);
        } catch (const CharacteristicPointError&) {
            continue;
        }
        CHECK(constraint_residual(1, D, HVec(2.7 * h)) ==
              doctest::Approx(base).epsilon(1e-12));
        CHECK(constraint_residual(1, D, HVec(-h)) == doctest::Approx(base).epsilon(1e-12));
    }
    HMat Dj(2, 2);
    Dj << 0, 1, 1, 0;  // (D+J)e1 = (0,1)+(0,-1) = 0
    CHECK_THROWS_AS(constraint_residual(1, Dj, hvec2(1, 0)), CharacteristicPointError);
}

}  // TEST_SUITE
