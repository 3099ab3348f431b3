#include "heis/quadric.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "heis/special.hpp"

namespace heis {

Quadric::Quadric(int n_, HVec b_, HMat Q_, double T_, double sym_tol)
    : n(n_), b(std::move(b_)), Q(std::move(Q_)), T(T_) {
    check_group_index(n);
    if (b.size() != 2 * n || Q.rows() != 2 * n || Q.cols() != 2 * n)
        throw DimensionError("Quadric: b or Q has wrong size");
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > sym_tol)
        throw DomainError("Quadric: Q must be symmetric");
    Q = 0.5 * (Q + Q.transpose());
    if (Q.cwiseAbs().maxCoeff() == 0.0 && T == 0.0)
        throw DegenerateQuadric("Quadric: Q and T cannot both vanish");
}

double eval_F(const Quadric& q, const HPoint& z) {
    if (z.h.size() != 2 * q.n) throw DimensionError("eval_F: dimension mismatch");
    return q.b.dot(z.h) + z.h.dot(q.Q * z.h) + q.T * z.t;
}

bool contains(const Quadric& q, const HPoint& z, double tol) {
    const double scale = 1.0 + z.h.squaredNorm() + std::abs(z.t);
    return std::abs(eval_F(q, z)) <= tol * scale;
}

static HMat gradient_matrix(const Quadric& q) {
    // d/dh of F along horizontal directions: b + 2(Q - T J) h
    return 2.0 * (q.Q - q.T * SymplecticJ(q.n).matrix());
}

std::optional<AffineSubspace> singular_set(const Quadric& q, double tol) {
    const HMat M = gradient_matrix(q);
    const int d = 2 * q.n;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(M),
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    const double cut = std::max(tol * std::max(smax, 1.0), 1e-300);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > cut) ++rank;

    // consistency: -b must lie in range(M)
    Eigen::VectorXd rhs = -Eigen::VectorXd(q.b);
    Eigen::VectorXd coeffs = svd.matrixU().transpose() * rhs;
    for (int i = rank; i < d; ++i)
        if (std::abs(coeffs(i)) > tol * std::max(1.0, rhs.norm())) return std::nullopt;

    Eigen::VectorXd sol = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < rank; ++i)
        sol += (coeffs(i) / svd.singularValues()(i)) * svd.matrixV().col(i);

    AffineSubspace aff;
    aff.base = sol;
    aff.dim = d - rank;
    for (int i = rank; i < d; ++i) aff.basis.emplace_back(svd.matrixV().col(i));

    // Solutions must also lie on the quadric.  F is constant along the
    // solution set, so its value at the base point decides membership.
    HPoint probe(aff.base, 0.0);
    if (q.T == 0.0) {
        if (!contains(q, probe, tol)) return std::nullopt;
    }
    return aff;
}

HVec horizontal_normal_at(const Quadric& q, const HVec& zH, double tol) {
    HVec g = q.b + gradient_matrix(q) * zH;
    const double norm = g.norm();
    const double scale =
        std::max(1.0, q.b.norm() + gradient_matrix(q).norm() * zH.norm());
    if (norm <= tol * scale)
        throw CharacteristicPointError("horizontal_normal: gradient vanishes");
    return g / norm;
}

HVec horizontal_normal(const Quadric& q, const HPoint& z, double tol) {
    return horizontal_normal_at(q, z.h, tol);
}

HPoint graph_eval(const Quadric& q, const HVec& h) {
    if (q.T == 0.0) throw NotAGraph("graph_eval: quadric is vertically ruled");
    if (h.size() != 2 * q.n) throw DimensionError("graph_eval: dimension mismatch");
    const double f = -(h.dot(q.Q * h) + q.b.dot(h)) / q.T;
    return HPoint(h, f);
}

Quadric blowdown(const Quadric& q) {
    return Quadric(q.n, HVec::Zero(2 * q.n), q.Q, q.T);
}

VerticalRankReport classify_vertical_rank(const Quadric& q, double ratio_tol) {
    if (q.T != 0.0)
        throw DomainError("classify_vertical_rank: requires T = 0");
    if (q.Q.cwiseAbs().maxCoeff() == 0.0)
        throw DegenerateQuadric("classify_vertical_rank: Q = 0");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(q.Q)};
    const Eigen::VectorXd ev = es.eigenvalues();
    const double emax = ev.cwiseAbs().maxCoeff();

    VerticalRankReport rep;
    std::vector<int> nonzero;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > ratio_tol * emax) nonzero.push_back(i);
    rep.rank = static_cast<int>(nonzero.size());

    // b in range(Q)?
    Eigen::VectorXd proj = Eigen::VectorXd(q.b);
    for (int i : nonzero) proj -= es.eigenvectors().col(i).dot(q.b) * es.eigenvectors().col(i);
    rep.b_in_range = proj.norm() <= 1e-10 * std::max(1.0, q.b.norm());

    if (rep.rank == 1) {
        rep.kind = VerticalRank::Rank1Flat;
        rep.normal = es.eigenvectors().col(nonzero[0]);
        return rep;
    }
    if (rep.rank == 2) {
        rep.kind = VerticalRank::Rank2;
        int ineg = -1, ipos = -1;
        for (int i : nonzero) (ev(i) < 0 ? ineg : ipos) = i;
        rep.indefinite = (ineg >= 0 && ipos >= 0);
        if (rep.indefinite) {
            // <h,Qh> = -(l1 <h,e1>)^2 + (l2 <h,e2>)^2 factors into the pair
            // of planes V(-l1 e1 + l2 e2) u V(l1 e1 + l2 e2).
            const double l1 = std::sqrt(-ev(ineg));
            const double l2 = std::sqrt(ev(ipos));
            HVec e1 = es.eigenvectors().col(ineg);
            HVec e2 = es.eigenvectors().col(ipos);
            HVec fn = -l1 * e1 + l2 * e2;
            HVec fm = l1 * e1 + l2 * e2;
            rep.pair_n = fn / fn.norm();
            rep.pair_m = fm / fm.norm();
        }
        return rep;
    }
    rep.kind = VerticalRank::HigherRank;
    return rep;
}

}  // namespace heis
