// Acceptance gate: ten end-to-end checks, one verdict line each.  Exit status
// is the number of failed checks.  Tolerances are pinned next to each check.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "acbm/conformal.hpp"
#include "acbm/scene.hpp"
#include "acbm/torsion_taxonomy.hpp"

using namespace acbm;

namespace {

int g_failures = 0;

void verdict(int id, bool pass, const std::string& what, const std::string& detail) {
    if (!pass) ++g_failures;
    std::printf("%s %2d  %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                detail.c_str());
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double rel(const Tensor3& a, double scale) { return a.max_abs() / norm_scale(scale); }

// -- 1 -----------------------------------------------------------------------

void criterion_structures() {
    constexpr double kTol = 1e-9;
    double worst = 0;
    int count = 0;
    for (int n = 1; n <= 3; ++n)
        for (uint64_t seed = 0; count < 100 && seed < 34; ++seed, ++count) {
            Structure s = random_structure(n, 1000 * n + seed);
            worst = std::max(worst, validate_structure(s, kTol).max_residual());
        }
    verdict(1, worst < kTol, "structure axioms hold on 100 random structures",
            "worst " + num(worst) + " < " + num(kTol));
}

// -- 2 -----------------------------------------------------------------------

double lemma_chain_residual(const Tensor3& nj, const Structure& s) {
    const Mat phi2 = s.phi2();
    Tensor3 ppp = compose_all(nj, s.phi);
    Tensor3 p2p2p = compose3(compose1(compose2(nj, phi2), phi2), s.phi);
    Tensor3 pp2p2 = compose1(compose23(nj, phi2), s.phi);
    Tensor3 p2pp = compose1(compose23(nj, s.phi), phi2);
    Tensor3 pp2p = compose3(compose2(compose1(nj, s.phi), phi2), s.phi);
    Tensor3 ppp2 = compose3(compose2(compose1(nj, s.phi), s.phi), phi2);
    const double scale = norm_scale(nj.max_abs());
    double r = rel(ppp + p2p2p, scale);
    r = std::max(r, rel(ppp - pp2p2, scale));
    r = std::max(r, rel(p2pp - pp2p, scale));
    r = std::max(r, rel(p2pp + ppp2, scale));
    return r;
}

void criterion_nijenhuis_identities() {
    constexpr double kTol = 1e-8;
    double worst = 0;
    for (int k = 0; k < 50; ++k) {
        const int n = k < 25 ? 1 : 2;
        Structure s = random_structure(n, 2000 + k);
        FTensor f = FTensor::checked(random_admissible(s, 2100 + k), s);
        worst = std::max(worst, lemma_chain_residual(nijenhuis_from_F(f, s), s));

        AssociatedForms af = associated_forms(f, s);
        Covec lock = s.phi.transpose() * af.theta_star + s.phi2().transpose() * af.theta;
        const double fscale = norm_scale(af.theta.cwiseAbs().maxCoeff(),
                                         af.theta_star.cwiseAbs().maxCoeff());
        worst = std::max(worst, lock.cwiseAbs().maxCoeff() / fscale);
    }
    verdict(2, worst < kTol,
            "Nijenhuis symmetry chains and the trace-form lock hold on 50 tensors",
            "worst " + num(worst) + " < " + num(kTol));
}

// -- 3 -----------------------------------------------------------------------

void criterion_integrable_type() {
    constexpr double kTol = 1e-8, kFloor = 1e-3;
    Structure s = canonical_structure(2);
    Taxonomy tax(s);
    double worst_flat = 0, least_obstructed = 1e300;
    for (ClassId c : kAllClasses) {
        for (uint64_t seed = 1; seed <= 3; ++seed) {
            FTensor f = FTensor::checked(tax.random_member(c, 3000 + seed), s);
            const double r = u0_residual(f, s);
            if (c == ClassId::F3 || c == ClassId::F7)
                least_obstructed = std::min(least_obstructed, r);
            else
                worst_flat = std::max(worst_flat, r);
        }
    }
    verdict(3, worst_flat < kTol && least_obstructed > kFloor,
            "restricted Nijenhuis vanishes exactly on the nine integrable-type classes",
            "worst " + num(worst_flat) + " < " + num(kTol) + ", obstructed classes >= " +
                num(least_obstructed) + " > " + num(kFloor));
}

// -- 4 -----------------------------------------------------------------------

void criterion_canonical_connection() {
    constexpr double kTol = 1e-9, kFloor = 1e-3;
    double worst = 0;
    for (int k = 0; k < 50; ++k) {
        const int n = k < 25 ? 1 : 2;
        Structure s = random_structure(n, 4000 + k);
        FTensor f = FTensor::checked(random_admissible(s, 4100 + k), s);
        worst = std::max(worst, natural_connection_check(q_canonical(f, s), f, s, kTol)
                                    .max_residual());
        worst = std::max(worst, phi_canonical_identity_residual(t_canonical(f, s), s));
    }

    Structure s2 = canonical_structure(2);
    Taxonomy tax(s2);
    double agree = 0, split = 1e300;
    for (uint64_t seed = 1; seed <= 3; ++seed) {
        for (ClassId c : kAllClasses) {
            if (c == ClassId::F3 || c == ClassId::F7) continue;
            FTensor f = FTensor::checked(tax.random_member(c, 4200 + seed), s2);
            Tensor3 d = q_canonical(f, s2) - q0_phiB(f, s2);
            agree = std::max(agree, rel(d, q0_phiB(f, s2).max_abs()));
        }
        FTensor f3 = FTensor::checked(tax.random_member(ClassId::F3, 4300 + seed), s2);
        split = std::min(split, rel(q_canonical(f3, s2) - q0_phiB(f3, s2),
                                    q0_phiB(f3, s2).max_abs()));
    }
    verdict(4, worst < kTol && agree < 1e-10 && split > kFloor,
            "canonical connection is natural; correction active exactly off the "
            "integrable-type classes",
            "worst " + num(worst) + " < " + num(kTol) + ", agreement " + num(agree) +
                ", obstructed split " + num(split) + " > " + num(kFloor));
}

// -- 5 -----------------------------------------------------------------------

void criterion_torsion_traces() {
    constexpr double kTol = 1e-8;
    double worst = 0;
    for (int k = 0; k < 50; ++k) {
        const int n = k < 25 ? 1 : 2;
        Structure s = random_structure(n, 5000 + k);
        FTensor f = FTensor::checked(random_admissible(s, 5100 + k), s);
        AssociatedForms af = associated_forms(f, s);
        TorsionForms tf = torsion_forms(t_canonical(f, s), s);
        const double fscale = norm_scale(af.theta.cwiseAbs().maxCoeff(),
                                         af.theta_star.cwiseAbs().maxCoeff(),
                                         af.omega.cwiseAbs().maxCoeff());
        Covec r1 = tf.t - 0.5 * (af.theta_star + af.theta_star.dot(s.xi) * s.eta);
        Covec r2 = tf.t_star + 0.5 * (af.theta + af.theta.dot(s.xi) * s.eta);
        Covec r3 = tf.t_hat + s.phi.transpose() * af.omega;
        Covec r4 = s.phi.transpose() * tf.t_star + s.phi2().transpose() * tf.t;
        for (const Covec& r : {r1, r2, r3, r4})
            worst = std::max(worst, r.cwiseAbs().maxCoeff() / fscale);
    }
    verdict(5, worst < kTol,
            "torsion traces reduce to the trace forms and obey their mutual lock",
            "worst " + num(worst) + " < " + num(kTol));
}

// -- 6 -----------------------------------------------------------------------

void criterion_conformal_invariants() {
    constexpr double kTol = 1e-8, kFloor = 1e-3;
    double worst_n = 0, worst_t = 0;
    for (int k = 0; k < 50; ++k) {
        const int n = k < 25 ? 1 : 2;
        Structure s = random_structure(n, 6000 + k);
        FTensor f = FTensor::checked(random_admissible(s, 6100 + k), s);

        ConformalPointData cg = random_conformal(s, 6200 + k);
        Structure sb = transform_structure(s, cg);
        FTensor fb = transform_F(f, s, cg, 1e-7);
        Tensor3 before = raise_last(nijenhuis_phiphi(nijenhuis_from_F(f, s), s), s.g);
        Tensor3 after = raise_last(nijenhuis_phiphi(nijenhuis_from_F(fb, sb), sb), sb.g);
        worst_n = std::max(worst_n, rel(after - before, before.max_abs()));

        ConformalPointData c0 = g0_generator(s, 6300 + k);
        Structure s0 = transform_structure(s, c0);
        FTensor f0 = transform_F(f, s, c0, 1e-7);
        Tensor3 t_before = raise_last(t_canonical(f, s), s.g);
        Tensor3 t_after = raise_last(t_canonical(f0, s0), s0.g);
        worst_t = std::max(worst_t, rel(t_after - t_before, t_before.max_abs()));
    }

    // A du pointing along the Reeb direction leaves the subgroup and must move
    // the torsion.
    Structure s = random_structure(2, 6400);
    FTensor f = FTensor::checked(random_admissible(s, 6401), s);
    ConformalPointData witness = identity_conformal(s.d);
    witness.du = s.eta;
    Structure sw = transform_structure(s, witness);
    FTensor fw = transform_F(f, s, witness, 1e-7);
    Tensor3 t_before = raise_last(t_canonical(f, s), s.g);
    double moved = rel(raise_last(t_canonical(fw, sw), sw.g) - t_before, t_before.max_abs());

    verdict(6, worst_n < kTol && worst_t < kTol && moved > kFloor,
            "restricted Nijenhuis is group-invariant; canonical torsion is "
            "subgroup-invariant with a moving witness outside",
            "worst " + num(std::max(worst_n, worst_t)) + " < " + num(kTol) +
                ", witness shift " + num(moved) + " > " + num(kFloor));
}

// -- 7 -----------------------------------------------------------------------

void criterion_class_closure() {
    constexpr double kForeign = 1e-7;  // relative, matching the presence threshold
    Structure s = canonical_structure(2);
    Taxonomy tax(s);

    std::vector<Structure> sb;
    std::vector<Taxonomy> taxb;
    std::vector<ConformalPointData> elems;
    for (uint64_t k = 0; k < 5; ++k) {
        elems.push_back(g0_generator(s, 7000 + k));
        sb.push_back(transform_structure(s, elems.back()));
        taxb.emplace_back(sb.back());
    }

    std::string closed, migrated;
    double worst_closed = 0, worst_migrated = 0;
    for (ClassId c : kAllClasses) {
        const int ci = class_index(c);
        bool stays = true;
        double foreign = 0;
        for (int m = 0; m < 10; ++m) {
            Tensor3 member = tax.random_member(c, 7100 + 10 * ci + m);
            for (size_t k = 0; k < elems.size(); ++k) {
                Tensor3 moved = transform_F_raw(member, s, elems[k]);
                Classification cl = taxb[k].classify(
                    FTensor::checked(moved, sb[k], 1e-7));
                stays = stays && cl.label() == class_name(c);
                const double scale = norm_scale(moved.max_abs());
                for (ClassId o : kAllClasses)
                    if (o != c)
                        foreign = std::max(foreign,
                                           cl.component_norm[class_index(o)] / scale);
            }
        }
        std::string& bucket = (stays && foreign < kForeign) ? closed : migrated;
        double& worst = (stays && foreign < kForeign) ? worst_closed : worst_migrated;
        bucket += std::string(bucket.empty() ? "" : " ") + class_name(c);
        worst = std::max(worst, foreign);
    }
    verdict(7, migrated.empty(),
            "all eleven classes are closed under the subgroup (10 members x 5 elements)",
            migrated.empty()
                ? "labels preserved, worst foreign component " + num(worst_closed) +
                      " < " + num(kForeign)
                : "closed: " + closed + "; migrated: " + migrated + " (worst foreign " +
                      num(worst_migrated) + " >= " + num(kForeign) + ")");
}

// -- 8 -----------------------------------------------------------------------

// Closed forms of the canonical torsion on each basic class, measured as
// relative residuals.
double class_torsion_residual(ClassId c, const FTensor& f, const Structure& s) {
    const Tensor3 tc = t_canonical(f, s);
    const double scale = norm_scale(tc.max_abs());
    const int n = s.n;
    const Mat& G = s.g.matrix();
    const Mat gphi = G * s.phi;
    const Mat gphi2 = G * s.phi2();
    const Mat m = contract3(f.tensor(), s.xi);   // F(x,y,xi)
    const Mat b = contract1(f.tensor(), s.xi);   // F(xi,y,z)
    const TorsionForms tf = torsion_forms(tc, s);

    auto from = [&](auto&& fn) { return Tensor3::from_fn(s.d, fn); };
    switch (c) {
        case ClassId::F1: {
            Covec tp2 = s.phi2().transpose() * tf.t, tp = s.phi.transpose() * tf.t;
            return rel(tc - from([&](int i, int j, int k) {
                           return (tp2(i) * gphi2(j, k) - tp2(j) * gphi2(i, k) +
                                   tp(i) * gphi(j, k) - tp(j) * gphi(i, k)) /
                                  (2.0 * n);
                       }),
                       scale);
        }
        case ClassId::F2:
        case ClassId::F3: {
            double r = contract1(tc, s.xi).cwiseAbs().maxCoeff() / norm_scale(scale);
            r = std::max(r, contract3(tc, s.xi).cwiseAbs().maxCoeff() / norm_scale(scale));
            Tensor3 tpp = compose2(compose1(tc, s.phi), s.phi);  // T(phi x, phi y, z)
            Tensor3 t23 = compose23(tc, s.phi);                  // T(x, phi y, phi z)
            if (c == ClassId::F2) {
                r = std::max(r, rel(tc - tpp, scale));
                r = std::max(r, tf.t.cwiseAbs().maxCoeff() / norm_scale(scale));
            } else {
                r = std::max(r, rel(tc - t23, scale));
            }
            return r;
        }
        case ClassId::F4: {
            double tsx = tf.t_star.dot(s.xi);
            return rel(tc - from([&](int i, int j, int k) {
                           return tsx / (2.0 * n) *
                                  (s.eta(j) * gphi(i, k) - s.eta(i) * gphi(j, k));
                       }),
                       scale);
        }
        case ClassId::F5: {
            double tx = tf.t.dot(s.xi);
            return rel(tc - from([&](int i, int j, int k) {
                           return tx / (2.0 * n) *
                                  (s.eta(j) * gphi2(i, k) - s.eta(i) * gphi2(j, k));
                       }),
                       scale);
        }
        case ClassId::F6:
        case ClassId::F9: {
            Mat mphi = m * s.phi;  // M(x, phi z)
            return rel(tc - from([&](int i, int j, int k) {
                           return s.eta(i) * mphi(j, k) - s.eta(j) * mphi(i, k);
                       }),
                       scale);
        }
        case ClassId::F7: {
            Mat mphi = m * s.phi;
            return rel(tc - from([&](int i, int j, int k) {
                           return 2.0 * s.eta(k) * mphi(i, j);
                       }),
                       scale);
        }
        case ClassId::F8: {
            Mat mphi = m * s.phi;
            return rel(tc - from([&](int i, int j, int k) {
                           return 2.0 * s.eta(k) * mphi(i, j) + s.eta(i) * mphi(j, k) -
                                  s.eta(j) * mphi(i, k);
                       }),
                       scale);
        }
        case ClassId::F10: {
            Mat bphi = s.phi.transpose() * b;  // B(phi y, z)
            return rel(tc - from([&](int i, int j, int k) {
                           return 0.5 * (s.eta(i) * bphi(j, k) - s.eta(j) * bphi(i, k));
                       }),
                       scale);
        }
        case ClassId::F11: {
            return rel(tc - from([&](int i, int j, int k) {
                           return (tf.t_hat(i) * s.eta(j) - tf.t_hat(j) * s.eta(i)) *
                                  s.eta(k);
                       }),
                       scale);
        }
    }
    return 1e300;
}

void criterion_class_torsions() {
    constexpr double kTol = 1e-8;
    Structure s = canonical_structure(2);
    Taxonomy tax(s);
    double worst = 0;
    bool table_ok = true;
    for (ClassId c : kAllClasses) {
        FTensor f = FTensor::checked(tax.random_member(c, 8000 + class_index(c)), s);
        worst = std::max(worst, class_torsion_residual(c, f, s));
        CorrespondenceResult cr = correspondence_check(f, s, tax, kTol);
        table_ok = table_ok && cr.pass;
    }
    verdict(8, worst < kTol && table_ok,
            "closed-form torsion and torsion-class table verified for all eleven classes",
            "worst " + num(worst) + " < " + num(kTol) +
                (table_ok ? ", table matches" : ", TABLE MISMATCH"));
}

// -- 9 -----------------------------------------------------------------------

void criterion_golden_sphere() {
    constexpr double kTol = 1e-10;
    const double psi = std::numbers::pi / 6;
    Structure s = canonical_structure(2);
    const int n = s.n;
    FTensor f = FTensor::checked(construct_f4(s, 2 * n * std::cos(psi)) +
                                     construct_f5(s, 2 * n * std::sin(psi)),
                                 s);
    Tensor3 tc = t_canonical(f, s);
    const Mat gphi = s.g.matrix() * s.phi;
    const Mat pgp = s.phi.transpose() * s.g.matrix() * s.phi;
    Tensor3 want = Tensor3::from_fn(s.d, [&](int i, int j, int k) {
        double a = s.eta(i) * (std::cos(psi) * gphi(j, k) - std::sin(psi) * pgp(j, k));
        double b = s.eta(j) * (std::cos(psi) * gphi(i, k) - std::sin(psi) * pgp(i, k));
        return a - b;
    });
    TorsionForms tf = torsion_forms(tc, s);

    double worst = (tc - want).max_abs();
    worst = std::max(worst, (tf.t - 2.0 * s.eta).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (tf.t_star + 2.0 * std::sqrt(3.0) * s.eta).cwiseAbs().maxCoeff());
    worst = std::max(worst, tf.t_hat.cwiseAbs().maxCoeff());
    worst = std::max(worst, torsion_membership_residual(tc, s, TorsionClassId::T31));
    verdict(9, worst < kTol,
            "time-like sphere example reproduced: torsion, traces t'(xi)=2, "
            "t'*(xi)=-2*sqrt(3)",
            "worst " + num(worst) + " < " + num(kTol));
}

// -- 10 ----------------------------------------------------------------------

void criterion_decomposition() {
    constexpr double kTol = 1e-8;
    double worst = 0;
    bool dims_ok = true, mix_ok = true;

    for (int n : {1, 2, 3}) {
        Structure s = canonical_structure(n);
        Taxonomy tax(s);
        const int d = s.d;
        int expected[11] = {2 * n, 0, 0, 1, 1, n * n + n - 2, n * n - n,
                            n * n, n * n, n * n, 2 * n};
        int total = 0;
        for (ClassId c : kAllClasses) {
            int dim = tax.dim(c);
            total += dim;
            int want = expected[class_index(c)];
            if (want > 0 && dim != want) dims_ok = false;
        }
        dims_ok = dims_ok && total == tax.dim_admissible() &&
                  tax.dim_admissible() == d * (n * n + 2 * n);
        int pair = tax.dim(ClassId::F2) + tax.dim(ClassId::F3);
        dims_ok = dims_ok && pair == 2 * n * n * n - 2 * n;
    }

    for (int n : {1, 2}) {
        Structure s = random_structure(n, 9000 + n);
        Taxonomy tax(s);
        FTensor f = FTensor::checked(random_admissible(s, 9100 + n), s);
        worst = std::max(worst, tax.classify(f).reassembly_residual);

        Tensor3 a = construct_f4(s, 1.2);
        Tensor3 bb = construct_f11(s, s.phi.transpose() * Covec::LinSpaced(s.d, 0.2, 1.0));
        Decomposition dec = tax.decompose(FTensor::checked(a + bb, s));
        const double scale = norm_scale((a + bb).max_abs());
        mix_ok = mix_ok && rel(dec.component[class_index(ClassId::F4)] - a, scale) < kTol;
        mix_ok = mix_ok && rel(dec.component[class_index(ClassId::F11)] - bb, scale) < kTol;
        for (ClassId c : kAllClasses)
            if (c != ClassId::F4 && c != ClassId::F11)
                mix_ok = mix_ok && rel(dec.component[class_index(c)], scale) < kTol;
    }

    verdict(10, worst < kTol && dims_ok && mix_ok,
            "decomposition reassembles, recovers mixtures, and the dimension audit holds",
            "worst residual " + num(worst) + " < " + num(kTol) +
                (dims_ok ? ", dimensions check out" : ", DIMENSION MISMATCH") +
                (mix_ok ? "" : ", MIXTURE NOT RECOVERED"));
}

}  // namespace

int main() {
    criterion_structures();
    criterion_nijenhuis_identities();
    criterion_integrable_type();
    criterion_canonical_connection();
    criterion_torsion_traces();
    criterion_conformal_invariants();
    criterion_class_closure();
    criterion_class_torsions();
    criterion_golden_sphere();
    criterion_decomposition();
    if (g_failures == 0)
        std::printf("all 10 acceptance checks passed\n");
    else
        std::printf("%d acceptance check(s) FAILED\n", g_failures);
    return g_failures;
}
