#pragma once

#include "acbm/connections.hpp"

namespace acbm {

// Pointwise data of a contact conformal transformation: the scalars u,v,w and
// their differentials at the point under study.  alpha, beta, gamma and their
// differentials follow by the chain rule:
//   alpha = e^{2u} cos 2v,  beta = e^{2u} sin 2v,  gamma = e^{2w}
struct ConformalPointData {
    double u = 0, v = 0, w = 0;
    Covec du, dv, dw;

    double alpha() const { return std::exp(2 * u) * std::cos(2 * v); }
    double beta() const { return std::exp(2 * u) * std::sin(2 * v); }
    double gamma() const { return std::exp(2 * w); }

    Covec dalpha() const { return 2 * std::exp(2 * u) * (std::cos(2 * v) * du - std::sin(2 * v) * dv); }
    Covec dbeta() const { return 2 * std::exp(2 * u) * (std::sin(2 * v) * du + std::cos(2 * v) * dv); }
    Covec dgamma() const { return 2 * std::exp(2 * w) * dw; }
};

inline ConformalPointData make_conformal(int d, double u, double v, double w, Covec du,
                                         Covec dv, Covec dw) {
    if (du.size() != d || dv.size() != d || dw.size() != d)
        throw ShapeMismatch("make_conformal: covector length");
    return ConformalPointData{u, v, w, std::move(du), std::move(dv), std::move(dw)};
}

inline ConformalPointData identity_conformal(int d) {
    return ConformalPointData{0, 0, 0, Covec::Zero(d), Covec::Zero(d), Covec::Zero(d)};
}

// The transformed structure: phi is untouched,
//   xi_bar = e^{-w} xi,  eta_bar = e^{w} eta,
//   g_bar  = alpha g + beta g(.,phi.) + (gamma - alpha) eta (x) eta
inline Structure transform_structure(const Structure& s, const ConformalPointData& c) {
    const double a = c.alpha(), b = c.beta(), g = c.gamma();
    Mat gbar = a * s.g.matrix() + b * (s.g.matrix() * s.phi) +
               (g - a) * (s.eta * s.eta.transpose());
    return Structure{s.n, s.d, s.phi, std::exp(-c.w) * s.xi, std::exp(c.w) * s.eta,
                     Metric(gbar)};
}

// Group membership residuals for the subgroup preserving the canonical torsion:
//   du o phi^2 + dv o phi = 0,  du o phi - dv o phi^2 = 0,
//   du(xi) = dv(xi) = 0,  dw o phi = 0
inline ValidationReport g0_check(const Structure& s, const ConformalPointData& c,
                                 double tol = kDefaultTol) {
    const Mat phit = s.phi.transpose();
    const Mat phi2t = s.phi2().transpose();
    const double scale =
        norm_scale(c.du.cwiseAbs().maxCoeff(), c.dv.cwiseAbs().maxCoeff(),
                   c.dw.cwiseAbs().maxCoeff());
    ValidationReport r;
    r.tolerance = tol;
    r.entries.push_back({"du_phi2_plus_dv_phi",
                         (phi2t * c.du + phit * c.dv).cwiseAbs().maxCoeff() / scale});
    r.entries.push_back({"du_phi_minus_dv_phi2",
                         (phit * c.du - phi2t * c.dv).cwiseAbs().maxCoeff() / scale});
    r.entries.push_back({"du_xi", std::abs(c.du.dot(s.xi)) / scale});
    r.entries.push_back({"dv_xi", std::abs(c.dv.dot(s.xi)) / scale});
    r.entries.push_back({"dw_phi", (phit * c.dw).cwiseAbs().maxCoeff() / scale});
    r.pass = r.max_residual() < tol;
    return r;
}

inline bool g0_predicate(const Structure& s, const ConformalPointData& c,
                         double tol = kDefaultTol) {
    return g0_check(s, c, tol).pass;
}

// Random element of the torsion-preserving subgroup: dv free on the horizontal
// distribution, du = dv o phi, dw proportional to eta.
inline ConformalPointData g0_generator(const Structure& s, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 0.3);
    Covec r(s.d);
    for (int i = 0; i < s.d; ++i) r[i] = nd(rng);
    Covec dv = r - r.dot(s.xi) * s.eta;
    Covec du = s.phi.transpose() * dv;
    Covec dw = nd(rng) * s.eta;
    return ConformalPointData{nd(rng), nd(rng), nd(rng), du, dv, dw};
}

// General group element with moderate magnitudes (well away from G0 almost surely).
inline ConformalPointData random_conformal(const Structure& s, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 0.3);
    Covec du(s.d), dv(s.d), dw(s.d);
    for (int i = 0; i < s.d; ++i) {
        du[i] = nd(rng);
        dv[i] = nd(rng);
        dw[i] = nd(rng);
    }
    return ConformalPointData{nd(rng), nd(rng), nd(rng), du, dv, dw};
}

// How the fundamental tensor transforms:
//   2 F_bar(x,y,z) = 2 alpha F(x,y,z)
//     + { beta [ F(phi y,z,x) - F(y,phi z,x) + F(x,phi y,xi) eta(z) ]
//       + (gamma - alpha) [ (F(x,y,xi) + F(phi y,phi x,xi)) eta(z)
//                         + (F(y,z,xi) + F(phi z,phi y,xi)) eta(x) ]
//       - ( dalpha(phi y) + dbeta(y) ) g(phi x,phi z)
//       - ( dalpha(y) - dbeta(phi y) ) g(x,phi z)
//       + eta(x) eta(y) dgamma(phi z) }_(y<->z)
inline Tensor3 transform_F_raw(const Tensor3& f, const Structure& s,
                               const ConformalPointData& c) {
    const double al = c.alpha(), be = c.beta(), ga = c.gamma();
    const Covec da = c.dalpha(), db = c.dbeta(), dg = c.dgamma();
    const Mat& G = s.g.matrix();
    const Mat g_phi = G * s.phi;                          // g(x, phi z) over (x,z)
    const Mat pgp = s.phi.transpose() * G * s.phi;        // g(phi x, phi z)
    const Mat fm = contract3(f, s.xi);                    // F(x,y,xi)
    const Mat pfp = s.phi.transpose() * fm * s.phi;       // F(phi a, phi b, xi) at (a,b)
    const Tensor3 f1 = compose1(f, s.phi);                // F(phi x, y, z)
    const Tensor3 f2 = compose2(f, s.phi);                // F(x, phi y, z)
    const Tensor3 fy_zx = permuted(f1, 1, 2, 0);          // F(phi y, z, x)
    const Tensor3 fyz_x = permuted(f2, 1, 2, 0);          // F(y, phi z, x)
    const Mat m1 = contract3(f2, s.xi);                   // F(x, phi y, xi)
    const Covec da_phi = s.phi.transpose() * da;
    const Covec db_phi = s.phi.transpose() * db;
    const Covec dg_phi = s.phi.transpose() * dg;

    Tensor3 brace = Tensor3::from_fn(s.d, [&](int i, int j, int k) {
        double v = be * (fy_zx(i, j, k) - fyz_x(i, j, k) + m1(i, j) * s.eta[k]);
        v += (ga - al) * ((fm(i, j) + pfp(j, i)) * s.eta[k] +
                          (fm(j, k) + pfp(k, j)) * s.eta[i]);
        v -= (da_phi[j] + db[j]) * pgp(i, k);
        v -= (da[j] - db_phi[j]) * g_phi(i, k);
        v += s.eta[i] * s.eta[j] * dg_phi[k];
        return v;
    });
    return al * f + 0.5 * sym_last_pair(brace);
}

// transform_F with the postcondition that the result is admissible for the
// transformed structure.
inline FTensor transform_F(const FTensor& f, const Structure& s, const ConformalPointData& c,
                           double tol = kDefaultTol) {
    return FTensor::checked(transform_F_raw(f.tensor(), s, c), transform_structure(s, c), tol);
}

// How the Nijenhuis tensor restricted to phi-images transforms:
//   N_bar(phi x,phi y,z) = alpha N(phi x,phi y,z) + beta N(phi x,phi y,phi z)
//                          + (gamma - alpha) N(phi x,phi y,xi) eta(z)
inline Tensor3 transform_N_phiphi(const Tensor3& n, const Structure& s,
                                  const ConformalPointData& c) {
    const Tensor3 npp = nijenhuis_phiphi(n, s);
    const Mat npp_xi = contract3(npp, s.xi);
    return c.alpha() * npp + c.beta() * compose3(npp, s.phi) +
           (c.gamma() - c.alpha()) * outer3(s.eta, npp_xi);
}

// Difference of the Levi-Civita connections of g_bar and g, lowered with g.
// Transcribed term by term; the overall (x<->y) symmetrization and the
// 1/(2(alpha^2+beta^2)) prefactor close the displayed equation.
inline Tensor3 levi_civita_difference(const FTensor& ft, const Structure& s,
                                      const ConformalPointData& c) {
    const Tensor3& f = ft.tensor();
    const int d = s.d;
    const double al = c.alpha(), be = c.beta(), ga = c.gamma();
    const double ab2 = al * al + be * be;
    const Covec da = c.dalpha(), db = c.dbeta(), dg = c.dgamma();
    const Mat& G = s.g.matrix();
    const Mat phi2 = s.phi2();
    const Mat g_phi = G * s.phi;
    const Mat pgp = s.phi.transpose() * G * s.phi;

    const Tensor3 f3_phi2 = compose3(f, phi2);            // F(x,y,phi^2 z)
    const Tensor3 f3_phi = compose3(f, s.phi);            // F(x,y,phi z)
    const Tensor3 fz_phi2 = permuted(compose1(f, phi2), 2, 0, 1);  // F(phi^2 z,x,y)
    const Tensor3 fz_phi = permuted(compose1(f, s.phi), 2, 0, 1);  // F(phi z,x,y)
    const Mat fm = contract3(f, s.xi);                    // F(x,y,xi)
    const Mat s1 = contract1(f, s.xi);                    // F(xi,x,y)
    const Mat m1 = fm * s.phi;                            // F(x,phi y,xi)
    const Mat p2m1 = phi2.transpose() * m1;               // F(phi^2 a,phi b,xi) at (a,b)
    const Mat pfp = s.phi.transpose() * fm * s.phi;       // F(phi a,phi b,xi)
    const Mat m2 = fm * phi2;                             // F(x,phi^2 z,xi) at (x,z)
    const Covec da_phi = s.phi.transpose() * da, da_phi2 = phi2.transpose() * da;
    const Covec db_phi = s.phi.transpose() * db, db_phi2 = phi2.transpose() * db;
    const Covec dg_phi = s.phi.transpose() * dg, dg_phi2 = phi2.transpose() * dg;
    const double da_xi = da.dot(s.xi), db_xi = db.dot(s.xi), dg_xi = dg.dot(s.xi);

    Tensor3 brace = Tensor3::from_fn(d, [&](int i, int j, int k) {
        double v = -al * be * (2.0 * f3_phi2(i, j, k) - fz_phi2(i, j, k));
        v -= be * be * (2.0 * f3_phi(i, j, k) - fz_phi(i, j, k));
        v += (be / ga) * ab2 * (2.0 * fm(i, j) - s1(i, j)) * s.eta[k];
        v += 2.0 * (al / ga - 1.0) * ab2 * p2m1(i, j) * s.eta[k];
        v += 2.0 * al * (ga - al) * (m1(i, k) + p2m1(k, i)) * s.eta[j];
        v -= 2.0 * be * (ga - al) * (m2(i, k) - pfp(k, i)) * s.eta[j];
        v -= 2.0 * (al * da[i] + be * db[i]) * pgp(j, k);
        v += 2.0 * (al * db[i] - be * da[i]) * g_phi(j, k);
        v -= (al * da_phi2[k] + be * da_phi[k]) * pgp(i, j);
        v += (al * db_phi2[k] + be * db_phi[k]) * g_phi(i, j);
        v += (al * dg_phi2[k] + be * dg_phi[k]) * s.eta[i] * s.eta[j];
        v += (ab2 / ga) * (da_xi * pgp(i, j) - db_xi * g_phi(i, j)) * s.eta[k];
        v += (ab2 / ga) * (2.0 * dg[i] * s.eta[j] - dg_xi * s.eta[i] * s.eta[j]) * s.eta[k];
        return v;
    });
    return (1.0 / (4.0 * ab2)) * sym_first_pair(brace);
}

inline Tensor3 levi_civita_difference_vec(const FTensor& ft, const Structure& s,
                                          const ConformalPointData& c) {
    return raise_last(levi_civita_difference(ft, s, c), s.g);
}

// Difference of the phiB connections before and after the transformation,
// lowered with g:
inline Tensor3 phiB_difference(const FTensor& ft, const Structure& s,
                               const ConformalPointData& c) {
    const Tensor3 n = nijenhuis_from_F(ft, s);
    const int d = s.d;
    const Mat phi2 = s.phi2();
    const Mat& G = s.g.matrix();
    const Mat g_phi = G * s.phi;
    const Mat pgp = s.phi.transpose() * G * s.phi;

    const Tensor3 n_phi_rev = permuted(compose_all(n, s.phi), 2, 1, 0);    // N(phi z,phi y,phi x)
    const Tensor3 n_phi2_rev = permuted(compose_all(n, phi2), 2, 1, 0);    // N(phi^2 z,...x)
    const Mat a1 = contract3(compose2(compose1(n, phi2), s.phi), s.xi);    // N(phi^2 a,phi b,xi)
    const Mat a2 = contract3(compose2(compose1(n, s.phi), s.phi), s.xi);   // N(phi a,phi b,xi)
    const Covec du_phi = s.phi.transpose() * c.du, du_phi2 = phi2.transpose() * c.du;
    const Covec dv_phi = s.phi.transpose() * c.dv, dv_phi2 = phi2.transpose() * c.dv;

    const double s4v = std::sin(4 * c.v);
    const double s2v = std::sin(2 * c.v), c2v = std::cos(2 * c.v);
    const double ewu = std::exp(2 * (c.w - c.u));

    return Tensor3::from_fn(d, [&](int i, int j, int k) {
        double v = 0.125 * s4v * n_phi_rev(i, j, k);
        v -= 0.25 * s2v * s2v * n_phi2_rev(i, j, k);
        v -= 0.25 * ewu * s2v * a1(k, j) * s.eta[i];
        v -= 0.25 * (1.0 - ewu * c2v) * a2(k, j) * s.eta[i];
        v -= c.du[i] * pgp(j, k);
        v += c.dv[i] * g_phi(j, k);
        v += c.dw[i] * s.eta[j] * s.eta[k];
        v += 0.5 * (du_phi2[j] - dv_phi[j]) * pgp(i, k);
        v -= 0.5 * (du_phi[j] + dv_phi2[j]) * g_phi(i, k);
        v -= 0.5 * (du_phi2[k] - dv_phi[k]) * pgp(i, j);
        v += 0.5 * (du_phi[k] + dv_phi2[k]) * g_phi(i, j);
        return v;
    });
}

// Difference of the phi-canonical connections, as a vector-valued map:
//   D(x,y) = -du(x) phi^2 y + dv(x) phi y + dw(x) eta(y) xi
//     + 1/2 { (du(phi^2 y) - dv(phi y)) phi^2 x - (du(phi y) + dv(phi^2 y)) phi x
//             - g(phi x,phi y) (phi^2 p - phi q) + g(x,phi y) (phi p + phi^2 q) }
// with p, q the g-gradients of u and v.  Notably independent of F.
inline Tensor3 canonical_difference(const Structure& s, const ConformalPointData& c) {
    const Mat phi2 = s.phi2();
    const Mat& G = s.g.matrix();
    const Mat g_phi = G * s.phi;
    const Mat pgp = s.phi.transpose() * G * s.phi;
    const Vec p = raise_covec(c.du, s.g);
    const Vec q = raise_covec(c.dv, s.g);
    const Vec w1 = phi2 * p - s.phi * q;  // phi^2 p - phi q
    const Vec w2 = s.phi * p + phi2 * q;  // phi p + phi^2 q
    const Covec du_phi = s.phi.transpose() * c.du, du_phi2 = phi2.transpose() * c.du;
    const Covec dv_phi = s.phi.transpose() * c.dv, dv_phi2 = phi2.transpose() * c.dv;

    return Tensor3::from_fn(s.d, [&](int i, int j, int a) {
        double v = -c.du[i] * phi2(a, j) + c.dv[i] * s.phi(a, j) +
                   c.dw[i] * s.eta[j] * s.xi[a];
        v += 0.5 * ((du_phi2[j] - dv_phi[j]) * phi2(a, i) -
                    (du_phi[j] + dv_phi2[j]) * s.phi(a, i) - pgp(i, j) * w1[a] +
                    g_phi(i, j) * w2[a]);
        return v;
    });
}

// How the canonical torsion transforms, as a vector-valued map:
//   T_bar(x,y) = T(x,y) + 1/2 { 2 dw(x) eta(y) xi
//       + ( du(phi^2 x) + dv(phi x) - 2 du(xi) eta(x) ) phi^2 y
//       + ( du(phi x) - dv(phi^2 x) + 2 dv(xi) eta(x) ) phi y }_[x<->y]
inline Tensor3 transform_torsion(const FTensor& ft, const Structure& s,
                                 const ConformalPointData& c) {
    const Tensor3 t_vec = raise_last(t_canonical(ft, s), s.g);
    const Mat phi2 = s.phi2();
    const Covec du_phi = s.phi.transpose() * c.du, du_phi2 = phi2.transpose() * c.du;
    const Covec dv_phi = s.phi.transpose() * c.dv, dv_phi2 = phi2.transpose() * c.dv;
    const double du_xi = c.du.dot(s.xi), dv_xi = c.dv.dot(s.xi);

    Tensor3 corr = Tensor3::from_fn(s.d, [&](int i, int j, int a) {
        double v = 2.0 * c.dw[i] * s.eta[j] * s.xi[a];
        v += (du_phi2[i] + dv_phi[i] - 2.0 * du_xi * s.eta[i]) * phi2(a, j);
        v += (du_phi[i] - dv_phi2[i] + 2.0 * dv_xi * s.eta[i]) * s.phi(a, j);
        return v;
    });
    return t_vec + 0.5 * antisym_first_pair(corr);
}

}  // namespace acbm
