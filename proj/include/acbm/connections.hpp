#pragma once

#include "acbm/fundamental.hpp"

namespace acbm {

// Potential of the phiB connection relative to Levi-Civita, lowered with g:
//   Q0(x,y,z) = 1/2 { F(x,phi y,z) + eta(z) F(x,phi y,xi) - 2 eta(y) F(x,phi z,xi) }
inline Tensor3 q0_phiB(const FTensor& ft, const Structure& s) {
    const Tensor3& f = ft.tensor();
    const Tensor3 f_phi2 = compose2(f, s.phi);
    const Mat m1 = contract3(f_phi2, s.xi);  // F(x, phi y, xi)
    return Tensor3::from_fn(s.d, [&](int i, int j, int k) {
        return 0.5 * (f_phi2(i, j, k) + s.eta[k] * m1(i, j) - 2.0 * s.eta[j] * m1(i, k));
    });
}

// Torsion of the phiB connection:
//   T0(x,y,z) = 1/2 { F(x,phi y,z) + eta(z) F(x,phi y,xi) + 2 eta(x) F(y,phi z,xi) }_[x<->y]
inline Tensor3 t0_phiB(const FTensor& ft, const Structure& s) {
    const Tensor3& f = ft.tensor();
    const Tensor3 f_phi2 = compose2(f, s.phi);
    const Mat m1 = contract3(f_phi2, s.xi);
    Tensor3 a = Tensor3::from_fn(s.d, [&](int i, int j, int k) {
        return 0.5 * (f_phi2(i, j, k) + s.eta[k] * m1(i, j) + 2.0 * s.eta[i] * m1(j, k));
    });
    return antisym_first_pair(a);
}

namespace detail {

// The Nijenhuis correction shared by the canonical potential and torsion:
//   C(x,y,z) = 1/8 { N(phi^2 z, phi^2 y, phi^2 x) + 2 N(phi z, phi y, xi) eta(x) }
inline Tensor3 canonical_correction(const Tensor3& n, const Structure& s) {
    const Tensor3 rev = permuted(compose_all(n, s.phi2()), 2, 1, 0);
    // m(a,b) = N(phi a, phi b, xi)
    const Mat m = contract3(compose2(compose1(n, s.phi), s.phi), s.xi);
    Tensor3 c = Tensor3::from_fn(
        s.d, [&](int i, int j, int k) { return rev(i, j, k) + 2.0 * s.eta[i] * m(k, j); });
    return 0.125 * c;
}

}  // namespace detail

// Potential of the phi-canonical connection:
//   Q'(x,y,z) = Q0(x,y,z) - 1/8 { N(phi^2 z,phi^2 y,phi^2 x) + 2 N(phi z,phi y,xi) eta(x) }
inline Tensor3 q_canonical(const FTensor& ft, const Structure& s) {
    const Tensor3 n = nijenhuis_from_F(ft, s);
    return q0_phiB(ft, s) - detail::canonical_correction(n, s);
}

// Torsion of the phi-canonical connection; the same correction, antisymmetrized.
inline Tensor3 t_canonical(const FTensor& ft, const Structure& s) {
    const Tensor3 n = nijenhuis_from_F(ft, s);
    return t0_phiB(ft, s) - antisym_first_pair(detail::canonical_correction(n, s));
}

// A potential Q defines a natural connection for (phi,xi,eta,g) iff
//   Q(x,y,phi z) - Q(x,phi y,z) = F(x,y,z)   and   Q(x,y,z) = -Q(x,z,y).
inline ValidationReport natural_connection_check(const Tensor3& q, const FTensor& ft,
                                                 const Structure& s, double tol = kDefaultTol) {
    const double scale = norm_scale(q.max_abs(), ft.tensor().max_abs());
    ValidationReport r;
    r.tolerance = tol;
    r.entries.push_back(
        {"reproduces_F",
         (compose3(q, s.phi) - compose2(q, s.phi) - ft.tensor()).max_abs() / scale});
    r.entries.push_back({"metric_skew", sym_last_pair(q).max_abs() / scale});
    r.pass = r.max_residual() < tol;
    return r;
}

// Characteristic torsion identity of the phi-canonical connection:
//   { T(x,y,z) - T(x,phi y,phi z) - eta(x) [ T(xi,y,z) - T(xi,phi y,phi z) ]
//     - eta(y) [ T(x,xi,z) - T(x,z,xi) - eta(x) T(z,xi,xi) ] }_[y<->z] = 0
inline double phi_canonical_identity_residual(const Tensor3& t, const Structure& s) {
    const Mat t_xi1 = contract1(t, s.xi);  // T(xi,y,z)
    const Mat t_xi2 = contract2(t, s.xi);  // T(x,xi,z)
    const Mat t_xi3 = contract3(t, s.xi);  // T(x,y,xi)
    const Mat phi_pull = s.phi.transpose() * t_xi1 * s.phi;
    const Tensor3 t_phiphi = compose23(t, s.phi);
    Vec that(s.d);  // T(z,xi,xi)
    for (int k = 0; k < s.d; ++k) that[k] = t_xi2.row(k).dot(s.xi);

    Tensor3 e = Tensor3::from_fn(s.d, [&](int i, int j, int k) {
        return t(i, j, k) - t_phiphi(i, j, k) -
               s.eta[i] * (t_xi1(j, k) - phi_pull(j, k)) -
               s.eta[j] * (t_xi2(i, k) - t_xi3(i, k) - s.eta[i] * that[k]);
    });
    return antisym_last_pair(e).max_abs() / norm_scale(t.max_abs());
}

// Recover a metric connection's potential from its torsion:
//   Q(x,y,z) = 1/2 { T(x,y,z) - T(y,z,x) + T(z,x,y) }
inline Tensor3 hayden_potential(const Tensor3& t) {
    return Tensor3::from_fn(t.dim(), [&](int i, int j, int k) {
        return 0.5 * (t(i, j, k) - t(j, k, i) + t(k, i, j));
    });
}

// Torsion 1-forms of a torsion tensor. As with the theta forms, the plain
// trace runs over ker eta, so the full-basis contraction is corrected by
// the xi,xi term; the starred trace needs none (phi xi = 0):
//   t(x) = g^{ij} T(x,e_i,e_j) - T(x,xi,xi),  t*(x) = g^{ij} T(x,e_i,phi e_j),
//   that(x) = T(x,xi,xi)
struct TorsionForms {
    Covec t;
    Covec t_star;
    Covec t_hat;
};

inline TorsionForms torsion_forms(const Tensor3& torsion, const Structure& s) {
    const Mat& gi = s.g.inverse();
    const Mat gp = gi * s.phi.transpose();
    TorsionForms out{Covec::Zero(s.d), Covec::Zero(s.d), Covec::Zero(s.d)};
    for (int i = 0; i < s.d; ++i)
        for (int j = 0; j < s.d; ++j)
            for (int k = 0; k < s.d; ++k) {
                out.t[i] += gi(j, k) * torsion(i, j, k);
                out.t_star[i] += gp(j, k) * torsion(i, j, k);
                out.t_hat[i] += s.xi[j] * s.xi[k] * torsion(i, j, k);
            }
    out.t -= out.t_hat;
    return out;
}

}  // namespace acbm
