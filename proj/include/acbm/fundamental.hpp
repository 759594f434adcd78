#pragma once

#include <random>

#include "acbm/structure.hpp"

namespace acbm {

// Residuals of the two identities every fundamental tensor satisfies:
//   F(x,y,z) = F(x,z,y)
//   F(x,y,z) = F(x,phi y, phi z) + eta(y) F(x,xi,z) + eta(z) F(x,y,xi)
inline ValidationReport check_admissible(const Tensor3& f, const Structure& s,
                                         double tol = kDefaultTol) {
    if (f.dim() != s.d) throw ShapeMismatch("check_admissible: tensor dimension");
    const double scale = norm_scale(f.max_abs());

    const Tensor3 sym = antisym_last_pair(f);
    const Mat f_xi_2 = contract2(f, s.xi);  // F(x, xi, z)
    const Mat f_xi_3 = contract3(f, s.xi);  // F(x, y, xi)
    const Tensor3 rhs = compose23(f, s.phi) + outer2(s.eta, f_xi_2) + outer3(s.eta, f_xi_3);

    ValidationReport r;
    r.tolerance = tol;
    r.entries.push_back({"last_pair_symmetry", sym.max_abs() / scale});
    r.entries.push_back({"phi_compatibility", (f - rhs).max_abs() / scale});
    r.pass = r.max_residual() < tol;
    return r;
}

// Fundamental tensor F(x,y,z) = g((nabla_x phi) y, z), admissibility enforced
// at construction.
class FTensor {
public:
    static FTensor checked(Tensor3 f, const Structure& s, double tol = kDefaultTol) {
        auto rep = check_admissible(f, s, tol);
        if (!rep.pass)
            throw InadmissibleF("FTensor: admissibility residual " +
                                std::to_string(rep.max_residual()));
        return FTensor(std::move(f));
    }

    const Tensor3& tensor() const { return t_; }
    int dim() const { return t_.dim(); }

private:
    explicit FTensor(Tensor3 t) : t_(std::move(t)) {}
    Tensor3 t_;
};

// theta, theta*, omega from contractions of F. The theta trace runs over
// the contact distribution ker eta; since g splits that distribution off
// from xi, the full-basis trace overshoots it by exactly omega, while
// theta* picks up no such term (phi xi = 0):
//   theta(z)  = g^{ij} F(e_i, e_j, z) - F(xi, xi, z)
//   theta*(z) = g^{ij} F(e_i, phi e_j, z)
//   omega(z)  = F(xi, xi, z)
struct AssociatedForms {
    Covec theta;
    Covec theta_star;
    Covec omega;
};

inline AssociatedForms associated_forms(const FTensor& f, const Structure& s) {
    const int d = s.d;
    const Tensor3& t = f.tensor();
    const Mat& gi = s.g.inverse();
    const Mat gi_phit = gi * s.phi.transpose();  // (i,a) = g^{ij} phi^a_j

    Covec theta = Covec::Zero(d), theta_star = Covec::Zero(d), omega = Covec::Zero(d);
    for (int k = 0; k < d; ++k) {
        double th = 0.0, ts = 0.0, om = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                th += gi(i, j) * t(i, j, k);
                ts += gi_phit(i, j) * t(i, j, k);
                om += s.xi[i] * s.xi[j] * t(i, j, k);
            }
        theta[k] = th - om;
        theta_star[k] = ts;
        omega[k] = om;
    }
    return {theta, theta_star, omega};
}

// Nijenhuis tensor of the structure, expressed through F:
//   N(x,y,z) = { F(phi x,y,z) - F(x,y,phi z) + F(x,phi y,xi) eta(z) }_[x<->y]
inline Tensor3 nijenhuis_from_F(const FTensor& f, const Structure& s) {
    const Tensor3& t = f.tensor();
    const Mat f_phi2_xi = contract3(compose2(t, s.phi), s.xi);  // F(x, phi y, xi)
    const Tensor3 k = compose1(t, s.phi) - compose3(t, s.phi) + outer3(s.eta, f_phi2_xi);
    return antisym_first_pair(k);
}

// Restriction N(phi ., phi ., .) whose vanishing characterizes the classes
// with coinciding phiB and phi-canonical connections.
inline Tensor3 nijenhuis_phiphi(const Tensor3& n, const Structure& s) {
    return compose1(compose2(n, s.phi), s.phi);
}

inline double u0_residual(const FTensor& f, const Structure& s) {
    const Tensor3 n = nijenhuis_from_F(f, s);
    return nijenhuis_phiphi(n, s).max_abs() / norm_scale(n.max_abs());
}

inline bool u0_predicate(const FTensor& f, const Structure& s, double tol = kDefaultTol) {
    return u0_residual(f, s) < tol;
}

// Random admissible tensor built from free data: a symmetric phi-compatible
// bilinear part b_x on the horizontal distribution plus a mixed part c_x,
//   F(x,y,z) = b_x(hy, hz) + eta(y) c_x(hz) + eta(z) c_x(hy).
inline Tensor3 random_admissible(const Structure& s, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int d = s.d;

    Tensor3 raw = Tensor3::from_fn(d, [&](int, int, int) { return nd(rng); });
    Tensor3 craw = Tensor3::from_fn(d, [&](int, int, int) { return nd(rng); });

    const Mat h = s.hproj();
    // b_x := average of raw over last-pair swap and the phi,phi substitution,
    // projected onto H in both slots; phi-compatible and symmetric by design.
    Tensor3 b = 0.25 * (sym_last_pair(compose23(raw, h)) + sym_last_pair(compose23(raw, s.phi)));

    Tensor3 f(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double cj = 0.0, ck = 0.0;
                for (int a = 0; a < d; ++a) {
                    cj += craw(i, 0, a) * h(a, j);
                    ck += craw(i, 0, a) * h(a, k);
                }
                f(i, j, k) = b(i, j, k) + s.eta[j] * ck + s.eta[k] * cj;
            }
    return f;
}

}  // namespace acbm
