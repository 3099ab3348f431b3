#include <doctest.h>

#include "heis/core.hpp"
#include "test_util.hpp"

using namespace heis;
using namespace heis::test;

TEST_SUITE("heis_core") {

TEST_CASE("product formula") {
    CHECK(mul(hp(0, 0, 0), hp(0.3, -1.2, 0.7)).h(0) == doctest::Approx(0.3));
    CHECK(mul(hp(0, 0, 0), hp(0.3, -1.2, 0.7)).t == doctest::Approx(0.7));

    // no twist along a common horizontal direction
    HPoint p = mul(hp(1, 0, 0), hp(1, 0, 0));
    CHECK(p.h(0) == doctest::Approx(2.0));
    CHECK(p.h(1) == doctest::Approx(0.0));
    CHECK(p.t == doctest::Approx(0.0));

    // twist 2<(1,0), J(0,1)> = 2
    HPoint q = mul(hp(1, 0, 0), hp(0, 1, 0));
    CHECK(q.h(0) == doctest::Approx(1.0));
    CHECK(q.h(1) == doctest::Approx(1.0));
    CHECK(q.t == doctest::Approx(2.0));

    HVec big(4);
    big << 1, 0, 0, 0;
    CHECK_THROWS_AS(mul(hp(1, 0, 0), HPoint(big, 0.0)), DimensionError);
}

TEST_CASE("inverse") {
    HPoint z = inv(hp(1, 2, 3));
    CHECK(z.h(0) == -1.0);
    CHECK(z.h(1) == -2.0);
    CHECK(z.t == -3.0);
    CHECK(knorm(inv(hp(0, 0, 0))) == 0.0);

    SplitMix64 rng(1);
    for (int i = 0; i < 100; ++i) {
        for (int n : {1, 2}) {
            HPoint x = random_point(rng, n);
            HPoint e = mul(x, inv(x));
            CHECK(e.h.norm() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(e.t == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("group axioms") {
    SplitMix64 rng(2);
    for (int i = 0; i < 1000; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 2);
        HPoint x = random_point(rng, n), y = random_point(rng, n), z = random_point(rng, n);
        HPoint a = mul(mul(x, y), z), b = mul(x, mul(y, z));
        CHECK((a.h - b.h).norm() < 1e-12 * (1 + a.h.norm()));
        CHECK(std::abs(a.t - b.t) < 1e-11 * (1 + std::abs(a.t)));
        // identity and inverse
        HPoint id = HPoint::zero(n);
        CHECK(kdist(mul(id, x), x) < 1e-12);
        CHECK(kdist(mul(x, id), x) < 1e-12);
        CHECK(knorm(mul(x, inv(x))) < 1e-12);
        CHECK(knorm(mul(inv(x), x)) < 1e-12);
    }
}

TEST_CASE("dilations and homogeneity") {
    HPoint x = hp(1, 0, 1);
    CHECK((dilate(1.0, x).h - x.h).norm() == 0.0);
    HPoint y = dilate(2.0, x);
    CHECK(y.h(0) == doctest::Approx(2.0));
    CHECK(y.t == doctest::Approx(4.0));
    CHECK_THROWS_AS(dilate(0.0, x), DomainError);
    CHECK_THROWS_AS(dilate(-1.0, x), DomainError);

    SplitMix64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 2);
        HPoint z = random_point(rng, n);
        const double lam = std::exp(rng.uniform(-2, 2));
        CHECK(knorm(dilate(lam, z)) ==
              doctest::Approx(lam * knorm(z)).epsilon(1e-12));
    }
}

TEST_CASE("Koranyi norm and distance") {
    CHECK(knorm(hp(0, 0, 4.0)) == doctest::Approx(2.0));
    CHECK(knorm(hp(0, 0, -4.0)) == doctest::Approx(2.0));
    CHECK(knorm(hp(3, 4, 0)) == doctest::Approx(5.0));

    SplitMix64 rng(4);
    SUBCASE("closed distance formula") {
        for (int i = 0; i < 100; ++i) {
            const int n = 1 + static_cast<int>(rng.next() % 2);
            HPoint x = random_point(rng, n), y = random_point(rng, n);
            const double twist = y.t - x.t - 2.0 * x.h.dot(apply_J(y.h));
            const double closed =
                std::pow(std::pow((y.h - x.h).norm(), 4) + twist * twist, 0.25);
            CHECK(kdist(x, y) == doctest::Approx(closed).epsilon(1e-12));
        }
    }
    SUBCASE("left invariance") {
        for (int i = 0; i < 100; ++i) {
            const int n = 1 + static_cast<int>(rng.next() % 2);
            HPoint x = random_point(rng, n), y = random_point(rng, n),
                   z = random_point(rng, n);
            CHECK(kdist(mul(z, x), mul(z, y)) ==
                  doctest::Approx(kdist(x, y)).epsilon(1e-12));
        }
    }
    SUBCASE("triangle inequality") {
        for (int i = 0; i < 1000; ++i) {
            const int n = 1 + static_cast<int>(rng.next() % 2);
            HPoint x = random_point(rng, n), y = random_point(rng, n),
                   z = random_point(rng, n);
            CHECK(kdist(x, z) <= kdist(x, y) + kdist(y, z) + 1e-12);
        }
    }
}

TEST_CASE("polarization decomposition") {
    HPoint u = hp(0.4, -0.9, 1.3);
    PolarizationParts self = polarize(u, u);
    CHECK(self.V == doctest::Approx(std::pow(knorm(u), 4)).epsilon(1e-12));

    PolarizationParts zero = polarize(hp(0, 0, 0), hp(1, 2, 3));
    CHECK(zero.V == doctest::Approx(0.0));
    CHECK(zero.L == doctest::Approx(0.0));
    CHECK(zero.Q == doctest::Approx(0.0));
    CHECK(zero.T == doctest::Approx(0.0));

    SplitMix64 rng(5);
    SUBCASE("L + Q + T = 2V") {
        for (int i = 0; i < 1000; ++i) {
            const int n = 1 + static_cast<int>(rng.next() % 2);
            PolarizationParts p = polarize(random_point(rng, n), random_point(rng, n));
            const double scale = std::abs(p.V) + std::abs(p.L) + std::abs(p.Q) +
                                 std::abs(p.T) + 1e-30;
            CHECK(std::abs(p.L + p.Q + p.T - 2.0 * p.V) <= 1e-10 * scale);
        }
    }
    SUBCASE("Cauchy-Schwarz style bound") {
        for (int i = 0; i < 1000; ++i) {
            const int n = 1 + static_cast<int>(rng.next() % 2);
            HPoint a = random_point(rng, n), b = random_point(rng, n);
            const double na = knorm(a), nb = knorm(b);
            CHECK(std::abs(polarize(a, b).V) <=
                  2.0 * na * nb * (na + nb) * (na + nb) + 1e-12);
        }
    }
    SUBCASE("part bounds") {
        for (int i = 0; i < 1000; ++i) {
            const int n = 1 + static_cast<int>(rng.next() % 2);
            HPoint a = random_point(rng, n), b = random_point(rng, n);
            const double na = knorm(a), nb = knorm(b);
            PolarizationParts p = polarize(a, b);
            CHECK(std::abs(p.L) <= 4.0 * na * nb * nb * nb + 1e-12);
            CHECK(std::abs(p.Q) <= 12.0 * nb * nb * na * na + 1e-12);
            CHECK(std::abs(p.T) <= 4.0 * nb * na * na * na + 1e-12);
        }
    }
}

TEST_CASE("symplectic matrix invariants") {
    for (int n : {1, 2, 3}) {
        HMat J = SymplecticJ(n).matrix();
        CHECK((J.transpose() + J).cwiseAbs().maxCoeff() == 0.0);
        CHECK((J * J + HMat::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() == 0.0);
        SplitMix64 rng(6);
        HVec v(2 * n);
        for (int i = 0; i < 2 * n; ++i) v(i) = rng.normal();
        CHECK((apply_J(v) - J * v).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("isometries") {
    // identity
    IsometryU id{HMat(HMat::Identity(2, 2))};
    CHECK(id.sign == 1);
    HPoint x = hp(1, 0, 5);
    HPoint y = isometry_apply(id, x);
    CHECK(y.h(0) == 1.0);
    CHECK(y.t == 5.0);

    // J itself normalizes with sign +1 and rotates the plane by -90 degrees
    IsometryU rot{SymplecticJ(1).matrix()};
    CHECK(rot.sign == 1);
    HPoint z = isometry_apply(rot, hp(1, 0, 5));
    CHECK(z.h(0) == doctest::Approx(0.0));
    CHECK(z.h(1) == doctest::Approx(-1.0));
    CHECK(z.t == doctest::Approx(5.0));

    HMat bad(2, 2);
    bad << 1, 1, 0, 1;
    CHECK_THROWS_AS(IsometryU{bad}, InvalidIsometry);

    SplitMix64 rng(7);
    for (int n : {1, 2}) {
        for (int k = 0; k < 10; ++k) {
            const bool flip = (k % 2 == 1);
            IsometryU iso{random_isometry_matrix(rng, n, flip)};
            CHECK(iso.sign == (flip ? -1 : 1));
            for (int i = 0; i < 10; ++i) {
                HPoint a = random_point(rng, n), b = random_point(rng, n);
                CHECK(kdist(isometry_apply(iso, a), isometry_apply(iso, b)) ==
                      doctest::Approx(kdist(a, b)).epsilon(1e-10));
            }
        }
    }
}

}  // TEST_SUITE
