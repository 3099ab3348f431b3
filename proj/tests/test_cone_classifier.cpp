#include <doctest.h>

#include <cmath>

#include "heis/cone_classifier.hpp"
#include "heis/special.hpp"
#include "test_util.hpp"

using namespace heis;
using namespace heis::test;

namespace {

MeasureModel pair_orth() {
    HMat Q(2, 2);
    Q << -1, 0, 0, 1;
    return MeasureModel::vertical_cone(1, Q, HVec::Zero(2));
}

MeasureModel pair_angle(double phi) {
    // planes V(n1) u V(n2) whose in-plane directions meet at angle phi;
    // <h, Q h> = <h, n1><h, n2> factors the union
    HVec n1 = hvec2(0, 1), n2 = hvec2(-std::sin(phi), std::cos(phi));
    HMat Q = 0.5 * (n1 * n2.transpose() + n2 * n1.transpose());
    return MeasureModel::vertical_cone(1, Q, HVec::Zero(2));
}

}  // namespace

TEST_SUITE("cone_classifier") {

TEST_CASE("admissibility scan") {
    HMat I2 = HMat::Identity(2, 2);
    SUBCASE("identity matrix has constant residual -1/8") {
        auto field = admissibility_scan(1, I2, 64, 7);
        CHECK(field.samples.size() == 64);
        CHECK(field.sup_abs >= 0.125 - 1e-14);
        CHECK(field.sup_abs <= 0.125 + 1e-14);
    }
    SUBCASE("evenness under direction flip") {
        SplitMix64 rng(51);
        HMat D = random_symmetric(rng, 2);
        for (int i = 0; i < 50; ++i) {
            HVec h = hvec2(rng.normal(), rng.normal());
            try {
                CHECK(constraint_residual(1, D, h) ==
                      doctest::Approx(constraint_residual(1, D, HVec(-h)))
                          .epsilon(1e-13));
            } catch (const CharacteristicPointError&) {
            }
        }
    }
    SUBCASE("conjugation covariance under the isometry family") {
        SplitMix64 rng(52);
        for (int k = 0; k < 10; ++k) {
            const int n = (k % 2) + 1;
            HMat D = random_symmetric(rng, 2 * n);
            HMat U = random_isometry_matrix(rng, n, false);  // s(U) = +1
            for (int i = 0; i < 5; ++i) {
                HVec h(2 * n);
                for (int j = 0; j < 2 * n; ++j) h(j) = rng.normal();
                try {
                    const double a = constraint_residual(n, D, h);
                    const double b =
                        constraint_residual(n, HMat(U * D * U.transpose()), HVec(U * h));
                    CHECK(a == doctest::Approx(b).epsilon(1e-11));
                } catch (const CharacteristicPointError&) {
                }
            }
        }
    }
    SUBCASE("degenerate scans") {
        CHECK_THROWS_AS(admissibility_scan(1, HMat(HMat::Zero(2, 2)), 16, 1),
                        DomainError);
        // an absurd tube width excludes every direction
        CHECK_THROWS_AS(admissibility_scan(1, I2, 16, 1, /*tube_tol=*/1e9),
                        DegenerateScan);
    }
}

TEST_CASE("eigen constraint") {
    SUBCASE("rank one projector passes") {
        HVec e = hvec2(1, 0);
        auto rep = eigen_constraint(HMat(e * e.transpose()));
        REQUIRE(rep.entries.size() == 1);
        CHECK(rep.entries[0].lambda == doctest::Approx(1.0));
        CHECK(rep.entries[0].residual == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("identity fails with residual 1") {
        auto rep = eigen_constraint(HMat(HMat::Identity(2, 2)));
        REQUIRE(rep.entries.size() == 2);
        for (const auto& en : rep.entries)
            CHECK(en.residual == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("trace-3 branch") {
        HMat Q = HMat::Zero(4, 4);
        Q.diagonal() << 1, 1, 1, 0;
        auto rep = eigen_constraint(Q);
        REQUIRE(rep.lambda2.has_value());
        CHECK(*rep.lambda2 == doctest::Approx(1.0));
    }
    SUBCASE("invariance under orthogonal conjugation") {
        SplitMix64 rng(53);
        for (int k = 0; k < 20; ++k) {
            HMat Q = random_symmetric(rng, 4);
            HMat U = random_isometry_matrix(rng, 2, k % 2 == 1);
            auto a = eigen_constraint(Q);
            auto b = eigen_constraint(HMat(U * Q * U.transpose()));
            REQUIRE(a.entries.size() == b.entries.size());
            for (std::size_t i = 0; i < a.entries.size(); ++i)
                CHECK(a.entries[i].residual ==
                      doctest::Approx(b.entries[i].residual).epsilon(1e-9));
        }
    }
}

TEST_CASE("norm bounds") {
    auto rep1 = norm_bounds(1, 40, 32, 9);
    CHECK(rep1.lower == doctest::Approx(1.0 / std::sqrt(19.0)).epsilon(1e-14));
    CHECK(rep1.lower == doctest::Approx(0.229416).epsilon(1e-5));
    auto rep2 = norm_bounds(2, 4, 16, 9);
    CHECK(rep2.lower == doctest::Approx(1.0 / std::sqrt(39.0)).epsilon(1e-14));
    CHECK(rep2.lower == doctest::Approx(0.160128).epsilon(1e-5));
    // any candidate below the tightest threshold must respect the lower bound
    for (const auto& env : rep1.envelopes)
        if (env.threshold <= 1e-6 && env.count > 0) CHECK(env.max_norm >= rep1.lower);
}

TEST_CASE("ball moment of graph cones") {
    HMat I2 = HMat::Identity(2, 2);
    SUBCASE("positivity and rotational symmetry for D = I") {
        SplitMix64 rng(54);
        double ref = bellalei_integral(1, I2, hvec2(1, 0));
        CHECK(ref > 0.0);
        for (int i = 0; i < 5; ++i) {
            const double phi = rng.uniform(0, 2 * M_PI);
            const double v = bellalei_integral(1, I2, hvec2(std::cos(phi), std::sin(phi)));
            CHECK(v == doctest::Approx(ref).epsilon(1e-4));
        }
    }
    SUBCASE("sphere reduction agrees with the representation density") {
        SplitMix64 rng(55);
        for (int i = 0; i < 3; ++i) {
            HMat D = random_symmetric(rng, 2);
            const double phi = rng.uniform(0, 2 * M_PI);
            HVec m = hvec2(std::cos(phi), std::sin(phi));
            const double a = bellalei_integral(1, D, m);
            const double b = bellalei_sphere_form(1, D, m);
            CHECK(a == doctest::Approx(b).epsilon(1e-3));
        }
    }
}

TEST_CASE("flatness pipeline") {
    SUBCASE("full slice is flat") {
        for (int n : {1, 2}) {
            HVec e = HVec::Zero(2 * n);
            e(0) = 1.0;
            auto verdict = flatness_decision(second_moment(OmegaMeasure::full_slice(n, e)));
            CHECK(verdict.verdict == Flatness::Flat);
            CHECK(std::abs(std::abs(verdict.normal.dot(e)) - 1.0) <= 1e-10);
        }
    }
    SUBCASE("orthogonal pair is not flat") {
        auto M = second_moment(OmegaMeasure::plane_pair(1, hvec2(1, 0), hvec2(0, 1)));
        auto verdict = flatness_decision(M);
        CHECK(verdict.verdict == Flatness::NotFlat);
        CHECK(verdict.min_eigenvalue == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("tilted pairs stay away from flat") {
        for (double phi : {0.3, 0.8, 1.2}) {
            HVec n1 = hvec2(0, 1), n2 = hvec2(-std::sin(phi), std::cos(phi));
            auto M = second_moment(OmegaMeasure::plane_pair(1, n1, n2));
            auto verdict = flatness_decision(M);
            // in-plane directions meet at angle phi: alpha_2 = (1-|cos phi|)/2
            CHECK(verdict.min_eigenvalue ==
                  doctest::Approx(0.5 * (1.0 - std::abs(std::cos(phi)))).epsilon(1e-10));
            CHECK(verdict.verdict == Flatness::NotFlat);
        }
    }
}

TEST_CASE("cutoff functional") {
    auto flat = MeasureModel::flat_plane(1, hvec2(1, 0));
    SUBCASE("cutoff profile") {
        CHECK(eta_cutoff(hp(0, 0.5, 0)) == 1.0);
        CHECK(eta_cutoff(hp(0, 2.5, 0)) == 0.0);
        CHECK(eta_cutoff(hp(0, 1.5, 0)) == doctest::Approx(0.5));
    }
    SUBCASE("flat models are null") {
        CHECK(F_functional(flat) <= 1e-10);
    }
    SUBCASE("plane pairs are strictly positive") {
        CHECK(F_functional(pair_orth()) > 0.05);
        CHECK(F_functional(pair_angle(0.9)) > 0.01);
    }
    SUBCASE("graph cone is strictly positive") {
        auto cone = MeasureModel::horizontal_graph(1, HVec::Zero(2),
                                                   HMat(HMat::Identity(2, 2)));
        CHECK(F_functional(cone) > 0.01);
    }
    SUBCASE("dilation continuity for cones") {
        const double base = F_functional(pair_orth());
        for (double lam : {0.5, 2.0}) {
            const double v = F_functional_dilated(pair_orth(), lam);
            CHECK(v == doctest::Approx(base).epsilon(1e-6));
        }
    }
}

TEST_CASE("H1 classification") {
    CHECK(classify_h1(MeasureModel::horizontal_line(hvec2(0.8, 0.6))).label ==
          H1Class::HorizontalLine);
    CHECK(classify_h1(MeasureModel::vertical_axis(1)).label == H1Class::VerticalAxis);
    CHECK(classify_h1(MeasureModel::flat_plane(1, hvec2(0, 1))).label ==
          H1Class::VerticalPlane);
    CHECK(classify_h1(pair_orth()).label == H1Class::NotUniform);
    CHECK_THROWS_AS(classify_h1(MeasureModel::vertical_axis(2)), DomainError);
}

TEST_CASE("consistency triangle with the expansion bracket") {
    SplitMix64 rng(56);
    int done = 0;
    while (done < 100) {
        HMat D = random_symmetric(rng, 2);
        HVec h = hvec2(rng.normal(), rng.normal());
        try {
            const double a = constraint_residual(1, D, h);
            auto fr = ExpansionFrame::make(D, h);
            const double b = coeff_e_closed(fr);
            CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
            ++done;
        } catch (const CharacteristicPointError&) {
        }
    }
}

}  // TEST_SUITE
