#pragma once

#include "acbm/class_taxonomy.hpp"
#include "acbm/connections.hpp"

namespace acbm {

// Basic torsion classes of a metric connection's torsion on an almost contact
// B-metric space.  Naming follows row/column position in the defining table.
enum class TorsionClassId {
    T11, T12, T13, T14, T21, T22, T31, T32, T33, T34, T41,
};

inline constexpr std::array<TorsionClassId, 11> kAllTorsionClasses = {
    TorsionClassId::T11, TorsionClassId::T12, TorsionClassId::T13, TorsionClassId::T14,
    TorsionClassId::T21, TorsionClassId::T22, TorsionClassId::T31, TorsionClassId::T32,
    TorsionClassId::T33, TorsionClassId::T34, TorsionClassId::T41,
};

inline std::string torsion_class_name(TorsionClassId c) {
    static const char* names[] = {"T11", "T12", "T13", "T14", "T21", "T22",
                                  "T31", "T32", "T33", "T34", "T41"};
    return names[static_cast<int>(c)];
}

// Max-abs violation of the characteristic conditions of one torsion class,
// normalized by the magnitude of T.
inline double torsion_membership_residual(const Tensor3& t, const Structure& s,
                                          TorsionClassId c) {
    if (t.dim() != s.d) throw ShapeMismatch("torsion_membership_residual: dimension");
    const double scale = norm_scale(t.max_abs());
    const Mat s1 = contract1(t, s.xi);   // T(xi,y,z)
    const Mat k3 = contract3(t, s.xi);   // T(x,y,xi)
    const Mat& phi = s.phi;
    const Mat phi2 = s.phi2();

    auto mr = [&](const Mat& m) { return m.cwiseAbs().maxCoeff() / scale; };
    auto tr = [&](const Tensor3& x) { return x.max_abs() / scale; };

    switch (c) {
        case TorsionClassId::T11:
        case TorsionClassId::T12: {
            double r = std::max(mr(s1), mr(k3));
            r = std::max(r, tr(t + compose2(compose1(t, phi), phi)));
            const Tensor3 t23 = compose23(t, phi);
            r = std::max(r, tr(c == TorsionClassId::T11 ? t + t23 : t - t23));
            return r;
        }
        case TorsionClassId::T13: {
            double r = std::max(mr(s1), mr(k3));
            r = std::max(r, tr(t - compose2(compose1(t, phi), phi)));
            return std::max(r, tr(cyclic_sum(t)));
        }
        case TorsionClassId::T14: {
            double r = std::max(mr(s1), mr(k3));
            r = std::max(r, tr(t - compose2(compose1(t, phi), phi)));
            return std::max(r, tr(cyclic_sum(compose1(t, phi))));
        }
        case TorsionClassId::T21:
        case TorsionClassId::T22: {
            const Mat m = phi2.transpose() * k3 * phi2;  // T(phi^2 x, phi^2 y, xi)
            double r = tr(t - outer3(s.eta, m));
            const Mat pk = phi.transpose() * k3 * phi;
            return std::max(r, mr(c == TorsionClassId::T21 ? Mat(k3 + pk) : Mat(k3 - pk)));
        }
        case TorsionClassId::T31:
        case TorsionClassId::T32:
        case TorsionClassId::T33:
        case TorsionClassId::T34: {
            const Mat sp = phi2.transpose() * s1 * phi2;  // T(xi, phi^2 y, phi^2 z)
            double r = tr(t - outer1(s.eta, sp) + outer2(s.eta, sp));
            const bool sym = (c == TorsionClassId::T31 || c == TorsionClassId::T33);
            r = std::max(r, mr(sym ? Mat(s1 - s1.transpose()) : Mat(s1 + s1.transpose())));
            const Mat ps = phi.transpose() * s1 * phi;
            const bool anti = (c == TorsionClassId::T31 || c == TorsionClassId::T32);
            return std::max(r, mr(anti ? Mat(s1 + ps) : Mat(s1 - ps)));
        }
        case TorsionClassId::T41: {
            Vec that(s.d);
            for (int i = 0; i < s.d; ++i) that[i] = k3.row(i).dot(s.xi);
            Tensor3 pure = Tensor3::from_fn(s.d, [&](int i, int j, int k) {
                return s.eta[k] * (s.eta[j] * that[i] - s.eta[i] * that[j]);
            });
            return tr(t - pure);
        }
    }
    throw InvalidParams("torsion_membership_residual: bad class id");
}

// Split of a torsion tensor by vertical content; the four parts always add
// back to T when T is antisymmetric in its first two slots.
struct TorsionSplit {
    Tensor3 horizontal;   // T(hx, hy, hz)
    Tensor3 ends_in_xi;   // eta(z) T(hx, hy, xi)
    Tensor3 starts_xi;    // eta(x) T(xi,hy,hz) - eta(y) T(xi,hx,hz)
    Tensor3 double_xi;    // eta(z) { eta(x) T(xi,hy,xi) - eta(y) T(xi,hx,xi) }
};

inline TorsionSplit split_torsion(const Tensor3& t, const Structure& s) {
    const Mat h = s.hproj();
    const Mat s1 = contract1(t, s.xi);
    const Mat k3 = contract3(t, s.xi);
    const Mat sh = h.transpose() * s1 * h;          // T(xi, hy, hz)
    const Mat kh = h.transpose() * k3 * h;          // T(hx, hy, xi)
    Covec lam = h.transpose() * (s1 * s.xi);        // T(xi, h., xi)

    TorsionSplit out;
    out.horizontal = compose_all(t, h);
    out.ends_in_xi = outer3(s.eta, kh);
    out.starts_xi = outer1(s.eta, sh) - outer2(s.eta, sh);
    out.double_xi = Tensor3::from_fn(s.d, [&](int i, int j, int k) {
        return s.eta[k] * (s.eta[i] * lam[j] - s.eta[j] * lam[i]);
    });
    return out;
}

struct CorrespondenceResult {
    ClassId input_class;
    std::vector<std::pair<TorsionClassId, double>> residuals;  // asserted conditions
    std::vector<std::string> flags;                            // informational
    Covec t_form;       // t'
    Covec t_star_form;  // t'*
    bool pass = false;
};

// Checks that the canonical torsion of a tensor lying in one basic class lands
// in the torsion class(es) paired with it, including the trace side conditions
// that separate F1/F2 and F4/F5/F6.  Throws AmbiguousClass when the input does
// not sit in a single basic class.
inline CorrespondenceResult correspondence_check(const FTensor& ft, const Structure& s,
                                                 const Taxonomy& tax,
                                                 double tol = kDefaultTol) {
    const Classification cl = tax.classify(ft, tol);
    int found = -1;
    for (ClassId c : kAllClasses)
        if (cl.present[class_index(c)]) {
            if (found >= 0) throw AmbiguousClass("input spans " + cl.label());
            found = class_index(c);
        }
    if (found < 0) throw AmbiguousClass("input is identically zero (F0)");

    const ClassId c = kAllClasses[static_cast<size_t>(found)];
    const Tensor3 torsion = t_canonical(ft, s);
    const TorsionForms forms = torsion_forms(torsion, s);
    const double vanish = 1e-7 * norm_scale(torsion.max_abs());
    const double t_norm = forms.t.cwiseAbs().maxCoeff();
    const double ts_norm = forms.t_star.cwiseAbs().maxCoeff();

    CorrespondenceResult out;
    out.input_class = c;
    out.t_form = forms.t;
    out.t_star_form = forms.t_star;

    auto add = [&](TorsionClassId tc, const Tensor3& part) {
        out.residuals.emplace_back(tc, torsion_membership_residual(part, s, tc));
    };
    auto expect_zero = [&](const char* name, double v) {
        if (v > vanish) out.flags.push_back(std::string(name) + " unexpectedly nonzero");
    };
    auto expect_nonzero = [&](const char* name, double v) {
        if (v <= vanish) out.flags.push_back(std::string(name) + " unexpectedly zero");
    };

    switch (c) {
        case ClassId::F1:
            add(TorsionClassId::T13, torsion);
            expect_nonzero("t'", t_norm);
            break;
        case ClassId::F2:
            add(TorsionClassId::T13, torsion);
            expect_zero("t'", t_norm);
            break;
        case ClassId::F3:
            add(TorsionClassId::T12, torsion);
            break;
        case ClassId::F4:
            add(TorsionClassId::T31, torsion);
            expect_zero("t'", t_norm);
            expect_nonzero("t'*", ts_norm);
            break;
        case ClassId::F5:
            add(TorsionClassId::T31, torsion);
            expect_nonzero("t'", t_norm);
            expect_zero("t'*", ts_norm);
            break;
        case ClassId::F6:
            add(TorsionClassId::T31, torsion);
            expect_zero("t'", t_norm);
            expect_zero("t'*", ts_norm);
            break;
        case ClassId::F7: {
            const TorsionSplit sp = split_torsion(torsion, s);
            expect_zero("horizontal part", sp.horizontal.max_abs());
            expect_zero("double-xi part", sp.double_xi.max_abs());
            add(TorsionClassId::T21, sp.ends_in_xi);
            add(TorsionClassId::T32, sp.starts_xi);
            break;
        }
        case ClassId::F8: {
            const TorsionSplit sp = split_torsion(torsion, s);
            expect_zero("horizontal part", sp.horizontal.max_abs());
            expect_zero("double-xi part", sp.double_xi.max_abs());
            add(TorsionClassId::T22, sp.ends_in_xi);
            add(TorsionClassId::T34, sp.starts_xi);
            break;
        }
        case ClassId::F9:
            add(TorsionClassId::T33, torsion);
            break;
        case ClassId::F10:
            add(TorsionClassId::T34, torsion);
            break;
        case ClassId::F11:
            add(TorsionClassId::T41, torsion);
            break;
    }

    out.pass = out.flags.empty();
    for (const auto& [tc, r] : out.residuals)
        if (r > tol * 10) out.pass = false;
    return out;
}

}  // namespace acbm
