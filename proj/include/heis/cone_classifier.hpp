#pragma once

#include <optional>
#include <vector>

#include "heis/measure_models.hpp"
#include "heis/perimeter_expansion.hpp"

namespace heis {

/// Admissibility residuals E(D, n(h)) sampled over quasi-uniform sphere
/// directions, excluding the characteristic tube.
struct ResidualField {
    HMat D;
    struct Sample {
        HVec dir;
        double residual = 0.0;
    };
    std::vector<Sample> samples;
    double sup_abs = 0.0;
    HVec argmax_dir;
};

ResidualField admissibility_scan(int n, const HMat& D, int n_dirs, std::uint64_t seed,
                                 double tube_tol = 1e-6);

struct EigenConstraintReport {
    struct Entry {
        double lambda = 0.0;
        double residual = 0.0;  // -3 l^2 + 2 Tr(Q) l + (2 Tr(Q^2) - Tr(Q)^2)
    };
    std::vector<Entry> entries;
    /// 2 Tr(Q)/3 - 1, reported when 1 is an eigenvalue
    std::optional<double> lambda2;
};
EigenConstraintReport eigen_constraint(const HMat& Q, double tol = 1e-10);

struct NormBoundsReport {
    double lower = 0.0;  // 1/sqrt(4n^2+8n+7)
    struct Envelope {
        double threshold = 0.0;
        double max_norm = 0.0;  // largest |||D||| with sup_abs below threshold
        int count = 0;          // candidates below threshold
    };
    std::vector<Envelope> envelopes;
    int scanned = 0;
};
NormBoundsReport norm_bounds(int n, int scan_count = 200, int n_dirs = 64,
                             std::uint64_t seed = 20240808ULL,
                             double norm_lo = 0.1, double norm_hi = 3.0);

/// int_{B_1} <m, z_H>^2 dmu for the graph cone K(0,D,-1); ground truth via the
/// Cartesian representation density, plus the reduced sphere form.
double bellalei_integral(int n, const HMat& D, const HVec& m,
                         const IntegrationConfig& cfg = {});
double bellalei_sphere_form(int n, const HMat& D, const HVec& m,
                            const IntegrationConfig& cfg = {});

enum class Flatness { Flat, NotFlat, Inconclusive };

struct FlatnessVerdict {
    Flatness verdict = Flatness::Inconclusive;
    HVec normal;               // meaningful when Flat
    double min_eigenvalue = 0.0;
    std::vector<double> spectrum;  // descending
};
FlatnessVerdict flatness_decision(const MomentMatrix& M, double tol = 1e-8,
                                  double flat_gap = 1e-2);

/// Smoothstep cutoff: 1 on B_1, 0 outside B_2.
double eta_cutoff(const HPoint& z);

/// min over unit m of int eta(z) <z_H, m>^2 dmu: the least eigenvalue of the
/// eta-weighted horizontal second-moment matrix.
double F_functional(const MeasureModel& mu, const IntegrationConfig& cfg = {});
/// Same functional evaluated on the dilated measure lambda^{-m} mu_{0,lambda}.
double F_functional_dilated(const MeasureModel& mu, double lambda,
                            const IntegrationConfig& cfg = {});

enum class H1Class { HorizontalLine, VerticalAxis, VerticalPlane, NotUniform };

struct H1Report {
    H1Class label = H1Class::NotUniform;
    double worst_rel_err = 0.0;  // of the uniformity grid
};
H1Report classify_h1(const MeasureModel& mu, double tol = 1e-3,
                     std::uint64_t seed = 20240808ULL,
                     const IntegrationConfig& cfg = {});

const char* to_string(H1Class c);
const char* to_string(Flatness f);

}  // namespace heis
