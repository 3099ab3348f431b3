#pragma once

#include <optional>
#include <vector>

#include "heis/core.hpp"

namespace heis {

/// The quadric K(b,Q,T) = { z : <b, z_H> + <z_H, Q z_H> + T z_T = 0 }.
/// Stored unnormalized; all predicates are invariant under rescaling of
/// (b, Q, T) by a nonzero constant.
struct Quadric {
    int n = 1;
    HVec b;
    HMat Q;
    double T = 0.0;

    Quadric(int n_, HVec b_, HMat Q_, double T_, double sym_tol = 1e-12);
};

double eval_F(const Quadric& q, const HPoint& z);
bool contains(const Quadric& q, const HPoint& z, double tol = 1e-9);

/// Affine subspace of R^{2n} given by a base point and an orthonormal basis
/// of its direction space.
struct AffineSubspace {
    HVec base;
    std::vector<HVec> basis;
    int dim = 0;
};

/// Horizontal footprint of the characteristic/singular set: solutions of
/// b + 2(Q - T J) h = 0 that lie on the quadric.  Empty optional when the
/// system is inconsistent or the solutions miss the quadric.  For T = 0 the
/// actual singular set is the footprint times the vertical line.
std::optional<AffineSubspace> singular_set(const Quadric& q, double tol = 1e-10);

/// Unit horizontal normal b + 2(Q - T J) z_H, normalized.  Throws
/// CharacteristicPointError where the gradient vanishes.
HVec horizontal_normal(const Quadric& q, const HPoint& z, double tol = 1e-12);
HVec horizontal_normal_at(const Quadric& q, const HVec& zH, double tol = 1e-12);

/// For T != 0 the quadric is the t-graph of f(h) = -(<h,Qh> + <b,h>)/T.
HPoint graph_eval(const Quadric& q, const HVec& h);

/// Quadric containing every tangent at infinity of a measure supported on q.
Quadric blowdown(const Quadric& q);

enum class VerticalRank { Rank1Flat, Rank2, HigherRank };

struct VerticalRankReport {
    VerticalRank kind = VerticalRank::HigherRank;
    int rank = 0;
    /// Rank1Flat: unit normal of the single vertical hyperplane.
    HVec normal;
    /// Rank2 (indefinite): unit normals of the two vertical hyperplanes
    /// K(0,Q,0) = V(pair_n) u V(pair_m).
    HVec pair_n, pair_m;
    bool indefinite = false;
    bool b_in_range = false;
};

/// Rank classification of a vertical quadric (T = 0).  Singular values below
/// ratio_tol times the largest count as zero.
VerticalRankReport classify_vertical_rank(const Quadric& q, double ratio_tol = 1e-8);

}  // namespace heis
