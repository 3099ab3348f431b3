#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "heis/core.hpp"
#include "heis/quadric.hpp"

namespace heis {

struct IntegralResult {
    double value = 0.0;
    double abs_error_est = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

struct IntegrationConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    std::uint64_t mc_samples = 2'000'000;
    std::uint64_t seed = 20240808ULL;
    int gl_order = 64;
};

/// Ball region in the Koranyi metric; All means the whole group (the
/// integrand must decay).
struct BallRegion {
    HPoint center;
    double r = 1.0;
};
struct AllRegion {};
using Region = std::variant<AllRegion, BallRegion>;

/// Candidate measures with explicit supports and representation-formula
/// densities.  Vertical surfaces carry Euclidean H^{2n}/c_n, the line and the
/// axis carry half their Euclidean length, graphs carry |b + 2(D+J)h|/c_n.
class MeasureModel {
  public:
    enum class Kind { FlatPlane, HorizontalLine, VerticalAxis, VerticalCone, HorizontalGraph };
    enum class Domain { Full, HalfSpace };

    static MeasureModel flat_plane(int n, HVec e);
    static MeasureModel horizontal_line(HVec v);  // n = 1 only
    static MeasureModel vertical_axis(int n);
    /// Vertical quadric K(b,Q,0) of rank <= 2; selector picks half-plane
    /// components (empty = whole quadric).  Components of an indefinite
    /// rank-2 pair: 0,1 = halves of V(pair_n) split by sign of <pair_m, .>,
    /// 2,3 = halves of V(pair_m).
    static MeasureModel vertical_cone(int n, HMat Q, HVec b,
                                      std::vector<int> selector = {});
    static MeasureModel horizontal_graph(int n, HVec b, HMat D,
                                         Domain domain = Domain::Full,
                                         HVec half_normal = {});

    Kind kind() const { return kind_; }
    int n() const { return n_; }
    /// Hausdorff exponent: mass of B_r around support points is r^m for the
    /// uniform members of the family.
    int m() const { return m_; }

    const HVec& plane_normal() const { return e_; }
    const HVec& line_direction() const { return e_; }
    const HMat& graph_D() const { return D_; }
    const HVec& graph_b() const { return b_; }
    const HMat& cone_Q() const { return Q_; }
    const HVec& cone_b() const { return b_; }
    const std::vector<int>& cone_selector() const { return selector_; }
    Domain graph_domain() const { return domain_; }
    const HVec& half_normal() const { return half_normal_; }

    /// Flat chart of a vertical surface: points p + basis*xi + t e_{2n+1}.
    struct PlaneChart {
        HVec normal;   // unit
        HVec base;     // point of the plane (horizontal part)
        HMat basis;    // 2n x (2n-1), orthonormal columns spanning normal^perp
        int half_sign = 0;   // 0 full; +-1 keep sign of <half_dir, y - base>
        HVec half_dir;
    };
    const std::vector<PlaneChart>& plane_charts() const { return charts_; }

    bool on_support(const HPoint& z, double tol = 1e-9) const;

    /// Graph height and density helpers (HorizontalGraph only).
    double graph_f(const HVec& h) const;
    double graph_density(const HVec& h) const;  // |b + 2(D+J)h|, before 1/c_n

  private:
    Kind kind_;
    int n_ = 1;
    int m_ = 3;
    HVec e_;          // plane normal or line direction
    HMat Q_;          // cone
    HVec b_;          // cone / graph linear part
    HMat D_;          // graph
    std::vector<int> selector_;
    Domain domain_ = Domain::Full;
    HVec half_normal_;
    std::vector<PlaneChart> charts_;
    friend struct ModelIntegrator;
};

/// Scalar integrand with an optional promise that it only reads z_H (and so
/// the vertical direction of ball slices can be integrated exactly).
struct Integrand {
    std::function<double(const HPoint&)> f;
    bool horizontal_only = false;
};

IntegralResult integrate(const MeasureModel& mu, const Integrand& g, const Region& region,
                         const IntegrationConfig& cfg = {});

/// int F(z) e^{-s ||z||^4} dmu(z), componentwise, with the truncation radius
/// chosen from the Gaussian tail.  Workhorse of the moments module.
std::vector<double> integrate_gauss_vec(const MeasureModel& mu, double s,
                                        const std::function<void(const HPoint&, double*)>& F,
                                        int dim, const IntegrationConfig& cfg = {});
double integrate_gauss(const MeasureModel& mu, double s,
                       const std::function<double(const HPoint&)>& F,
                       const IntegrationConfig& cfg = {});

IntegralResult ball_mass(const MeasureModel& mu, const HPoint& center, double r,
                         const IntegrationConfig& cfg = {});

enum class CnMethod { GammaFormula, GeometricQuadrature };
IntegralResult cn_constant(int n, CnMethod method, const IntegrationConfig& cfg = {});

/// Slice measure of a vertical cone's horizontal footprint on the unit sphere.
class OmegaMeasure {
  public:
    enum class Kind { FullSlice, PlanePair, Sampler };

    static OmegaMeasure full_slice(int n, HVec e);
    static OmegaMeasure plane_pair(int n, HVec n_dir, HVec m_dir, int half_n = 0,
                                   int half_m = 0);
    static OmegaMeasure sampler(int n, std::vector<HVec> dirs, std::vector<double> weights);

    Kind kind() const { return kind_; }
    int n() const { return n_; }
    const HVec& e() const { return e_; }
    const HVec& n_dir() const { return n_dir_; }
    const HVec& m_dir() const { return m_dir_; }
    int half_n() const { return half_n_; }
    int half_m() const { return half_m_; }
    const std::vector<HVec>& dirs() const { return dirs_; }
    const std::vector<double>& weights() const { return weights_; }

    /// integral of a function of the direction against omega
    double integral(const std::function<double(const HVec&)>& g, int gl_order = 64) const;

  private:
    Kind kind_;
    int n_ = 1;
    HVec e_, n_dir_, m_dir_;
    int half_n_ = 0, half_m_ = 0;
    std::vector<HVec> dirs_;
    std::vector<double> weights_;
};

double omega_mass(const OmegaMeasure& om);

struct MomentMatrix {
    HMat M;
    std::vector<double> eigenvalues;  // descending
    HMat eigenvectors;                // columns, same order
};

MomentMatrix second_moment(const OmegaMeasure& om);

enum class Rapp2Form { BallRestricted, FullWeighted };

/// Closed reduction of vertical-cone integrals to the slice measure:
/// BallRestricted evaluates (2/c_n) int_0^1 r^{2n-2} sqrt(1-r^4) int g(rv) dw dr,
/// FullWeighted evaluates (1/c_n) int f dt * int_0^inf r^{2n-2} int g(rv) dw dr.
double rapp2_integral(const OmegaMeasure& om, const std::function<double(double)>& f,
                      const std::function<double(const HVec&)>& g, Rapp2Form form,
                      const IntegrationConfig& cfg = {});

}  // namespace heis
