#include "heis/core.hpp"

#include <cmath>

#include "heis/special.hpp"

namespace heis {

HPoint::HPoint(HVec h_, double t_) : h(std::move(h_)), t(t_) {
    if (h.size() % 2 != 0 || h.size() == 0)
        throw DimensionError("HPoint: horizontal part must have 2n coordinates");
    check_group_index(static_cast<int>(h.size()) / 2);
    if (!h.allFinite() || !std::isfinite(t))
        throw DomainError("HPoint: coordinates must be finite");
}

HPoint HPoint::zero(int n) {
    check_group_index(n);
    return HPoint(HVec::Zero(2 * n), 0.0);
}

SymplecticJ::SymplecticJ(int n_) : n(n_) { check_group_index(n); }

HMat SymplecticJ::matrix() const {
    HMat J = HMat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        J(i, n + i) = 1.0;
        J(n + i, i) = -1.0;
    }
    return J;
}

HVec apply_J(const HVec& v) {
    const int n = static_cast<int>(v.size()) / 2;
    HVec out(v.size());
    out.head(n) = v.tail(n);
    out.tail(n) = -v.head(n);
    return out;
}

IsometryU::IsometryU(HMat U_, double tol) : U(std::move(U_)) {
    if (U.rows() != U.cols() || U.rows() % 2 != 0)
        throw InvalidIsometry("IsometryU: matrix must be 2n x 2n");
    const int n2 = static_cast<int>(U.rows());
    check_group_index(n2 / 2);
    if ((U.transpose() * U - HMat::Identity(n2, n2)).cwiseAbs().maxCoeff() > tol)
        throw InvalidIsometry("IsometryU: not orthogonal");
    const HMat J = SymplecticJ(n2 / 2).matrix();
    const HMat UJU = U.transpose() * J * U;
    if ((UJU - J).cwiseAbs().maxCoeff() <= tol)
        sign = 1;
    else if ((UJU + J).cwiseAbs().maxCoeff() <= tol)
        sign = -1;
    else
        throw InvalidIsometry("IsometryU: does not normalize the symplectic form");
}

static void check_same_n(const HPoint& x, const HPoint& y) {
    if (x.h.size() != y.h.size())
        throw DimensionError("HPoint operands have different group index");
}

HPoint mul(const HPoint& x, const HPoint& y) {
    check_same_n(x, y);
    HPoint out;
    out.h = x.h + y.h;
    out.t = x.t + y.t + 2.0 * x.h.dot(apply_J(y.h));
    return out;
}

HPoint inv(const HPoint& x) {
    HPoint out;
    out.h = -x.h;
    out.t = -x.t;
    return out;
}

HPoint dilate(double lambda, const HPoint& x) {
    if (!(lambda > 0.0)) throw DomainError("dilate: lambda must be positive");
    HPoint out;
    out.h = lambda * x.h;
    out.t = lambda * lambda * x.t;
    return out;
}

double knorm(const HPoint& x) {
    const double a = x.h.squaredNorm();
    return std::sqrt(std::hypot(a, x.t));
}

double kdist(const HPoint& x, const HPoint& y) { return knorm(mul(inv(x), y)); }

HPoint isometry_apply(const IsometryU& iso, const HPoint& x) {
    if (iso.U.rows() != x.h.size())
        throw DimensionError("isometry_apply: dimension mismatch");
    HPoint out;
    out.h = iso.U * x.h;
    out.t = iso.sign * x.t;
    return out;
}

PolarizationParts polarize(const HPoint& u, const HPoint& z) {
    check_same_n(u, z);
    PolarizationParts p;
    const double nu = knorm(u), nz = knorm(z), nuz = knorm(mul(inv(u), z));
    const double nu2 = nu * nu, nz2 = nz * nz, nuz2 = nuz * nuz;
    p.V = 0.5 * (nu2 * nu2 + nz2 * nz2 - nuz2 * nuz2);

    const HVec Jzh = apply_J(z.h);
    const double zh2 = z.h.squaredNorm();
    p.L = u.h.dot(4.0 * zh2 * z.h + 4.0 * z.t * Jzh);
    const double uz = z.h.dot(u.h);
    const double uJz = Jzh.dot(u.h);
    p.Q = -4.0 * uz * uz - 2.0 * zh2 * u.h.squaredNorm() - 4.0 * uJz * uJz +
          2.0 * z.t * u.t;
    const HVec Juh = apply_J(u.h);
    p.T = z.h.dot(4.0 * u.h.squaredNorm() * u.h + 4.0 * u.t * Juh);
    return p;
}

}  // namespace heis
