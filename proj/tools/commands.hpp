#pragma once

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "acbm/scene.hpp"
#include "acbm/torsion_taxonomy.hpp"

// Drivers behind the CLI subcommands.  Each one turns a scene file into a
// machine-readable report plus human-readable lines, and picks the process
// exit code:
//   0  success
//   1  validation failure (axioms, admissibility, bad parameters)
//   2  unreadable input (file access or scene syntax)
//   3  violation of an identity the suite asserts unconditionally

namespace acbm::cli {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitParse = 2;
constexpr int kExitInvariant = 3;

// Asserted identities get this much slack over the reporting tolerance before
// they count as violations.
constexpr double kInvarianceSlack = 10.0;

struct Options {
    std::string scene_path;
    double tol = kDefaultTol;
    bool check_invariance = false;
    bool g0_only = false;
    int trials = 0;
    uint64_t seed = 1;
};

struct Outcome {
    int exit_code = kExitOk;
    json report;
    std::vector<std::string> lines;
};

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline json covec_json(const Covec& c) {
    json a = json::array();
    for (int i = 0; i < c.size(); ++i) a.push_back(c[i]);
    return a;
}

inline json report_json(const ValidationReport& r) {
    json out;
    out["tolerance"] = r.tolerance;
    out["pass"] = r.pass;
    json res = json::object();
    for (const auto& e : r.entries) res[e.name] = e.value;
    out["residuals"] = res;
    return out;
}

inline void report_lines(const ValidationReport& r, const std::string& what,
                         std::vector<std::string>& lines) {
    lines.push_back(what + ": " + (r.pass ? "ok" : "FAILED") +
                    " (max residual " + num(r.max_residual()) + ", tolerance " +
                    num(r.tolerance) + ")");
    if (!r.pass)
        for (const auto& e : r.entries)
            if (e.value >= r.tolerance)
                lines.push_back("  " + e.name + " = " + num(e.value));
}

inline double rel_diff(const Tensor3& a, const Tensor3& b) {
    return (a - b).max_abs() / norm_scale(a.max_abs(), b.max_abs());
}

struct Check {
    std::string name;
    double value = 0;
    double limit = 0;
    bool asserted = false;
    bool pass() const { return value <= limit; }
};

inline void push_checks(const std::vector<Check>& checks, json& report,
                        std::vector<std::string>& lines) {
    json arr = json::array();
    for (const Check& c : checks) {
        arr.push_back({{"name", c.name},
                       {"value", c.value},
                       {"limit", c.limit},
                       {"asserted", c.asserted},
                       {"pass", c.pass()}});
        std::string tag = c.pass() ? "  [ok] " : (c.asserted ? "  [VIOLATION] " : "  [off] ");
        lines.push_back(tag + c.name + ": " + num(c.value) + " (limit " + num(c.limit) + ")");
    }
    report["checks"] = arr;
}

}  // namespace detail

inline Scene load_scene(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scene(buf.str());
}

// ---- validate --------------------------------------------------------------

inline Outcome cmd_validate(const Options& opt) {
    using namespace detail;
    Outcome out;
    Scene sc = load_scene(opt.scene_path);
    out.report["command"] = "validate";
    out.report["scene"] = opt.scene_path;
    out.report["n"] = sc.n;

    bool ok = true;
    ValidationReport sr = validate_structure(sc.structure, opt.tol);
    out.report["structure"] = report_json(sr);
    report_lines(sr, "structure axioms", out.lines);
    ok = ok && sr.pass;

    if (sc.source == SceneSource::RawF) {
        ValidationReport ar = check_admissible(sc.f_raw, sc.structure, opt.tol);
        out.report["admissibility"] = report_json(ar);
        report_lines(ar, "tensor admissibility", out.lines);
        ok = ok && ar.pass;
    } else if (sc.source != SceneSource::None) {
        try {
            FTensor ft = realize_scene_F(sc, opt.tol);
            ValidationReport ar = check_admissible(ft.tensor(), sc.structure, opt.tol);
            out.report["admissibility"] = report_json(ar);
            report_lines(ar, "tensor admissibility", out.lines);
            ok = ok && ar.pass;
        } catch (const Error& e) {
            out.report["admissibility"] = {{"pass", false}, {"error", e.what()}};
            out.lines.push_back(std::string("tensor source: FAILED (") + e.what() + ")");
            ok = false;
        }
    }

    if (sc.conformal) {
        ValidationReport gr = g0_check(sc.structure, *sc.conformal, opt.tol);
        out.report["conformal_g0"] = report_json(gr);
        out.lines.push_back(std::string("conformal data: ") +
                            (gr.pass ? "torsion-preserving (G0)" : "general group element"));
        if (opt.g0_only && !gr.pass) {
            report_lines(gr, "G0 membership", out.lines);
            ok = false;
        }
    }

    out.report["pass"] = ok;
    out.lines.push_back(ok ? "VALID" : "INVALID");
    out.exit_code = ok ? kExitOk : kExitValidation;
    return out;
}

// ---- classify --------------------------------------------------------------

inline Outcome cmd_classify(const Options& opt) {
    using namespace detail;
    Outcome out;
    Scene sc = load_scene(opt.scene_path);
    out.report["command"] = "classify";
    out.report["scene"] = opt.scene_path;
    out.report["n"] = sc.n;

    ValidationReport sr = validate_structure(sc.structure, opt.tol);
    if (!sr.pass) {
        out.report["structure"] = report_json(sr);
        report_lines(sr, "structure axioms", out.lines);
        out.exit_code = kExitValidation;
        return out;
    }

    Taxonomy tax(sc.structure);
    FTensor ft = realize_scene_F(sc, tax, opt.tol);
    Classification cl = tax.classify(ft, opt.tol);
    AssociatedForms forms = associated_forms(ft, sc.structure);

    out.report["label"] = cl.label();
    out.report["reassembly_residual"] = cl.reassembly_residual;
    json comp = json::object(), dims = json::object();
    for (ClassId c : kAllClasses) {
        comp[class_name(c)] = cl.component_norm[class_index(c)];
        dims[class_name(c)] = tax.dim(c);
    }
    out.report["component_norms"] = comp;
    out.report["class_dimensions"] = dims;
    out.report["admissible_dimension"] = tax.dim_admissible();
    out.report["forms"] = {{"theta", covec_json(forms.theta)},
                           {"theta_star", covec_json(forms.theta_star)},
                           {"omega", covec_json(forms.omega)},
                           {"theta_xi", forms.theta.dot(sc.structure.xi)},
                           {"theta_star_xi", forms.theta_star.dot(sc.structure.xi)}};
    out.report["u0_residual"] = u0_residual(ft, sc.structure);

    out.lines.push_back("class: " + cl.label());
    for (ClassId c : kAllClasses)
        if (cl.present[class_index(c)])
            out.lines.push_back("  " + class_name(c) + " component norm " +
                                num(cl.component_norm[class_index(c)]));
    out.lines.push_back("reassembly residual: " + num(cl.reassembly_residual));
    out.lines.push_back("theta(xi) = " + num(forms.theta.dot(sc.structure.xi)) +
                        ", theta*(xi) = " + num(forms.theta_star.dot(sc.structure.xi)));
    out.lines.push_back(std::string("integrable-type condition (vanishing Nijenhuis on "
                                    "phi-images): ") +
                        (u0_predicate(ft, sc.structure) ? "holds" : "fails"));
    return out;
}

// ---- connection ------------------------------------------------------------

inline Outcome cmd_connection(const Options& opt) {
    using namespace detail;
    Outcome out;
    Scene sc = load_scene(opt.scene_path);
    const Structure& s = sc.structure;
    out.report["command"] = "connection";
    out.report["scene"] = opt.scene_path;
    out.report["n"] = sc.n;

    ValidationReport sr = validate_structure(s, opt.tol);
    if (!sr.pass) {
        out.report["structure"] = report_json(sr);
        report_lines(sr, "structure axioms", out.lines);
        out.exit_code = kExitValidation;
        return out;
    }

    Taxonomy tax(s);
    FTensor ft = realize_scene_F(sc, tax, opt.tol);
    const Tensor3 q0 = q0_phiB(ft, s);
    const Tensor3 qc = q_canonical(ft, s);
    const Tensor3 tc = t_canonical(ft, s);
    const AssociatedForms forms = associated_forms(ft, s);
    const TorsionForms tf = torsion_forms(tc, s);

    std::vector<Check> checks;
    const double lim = kInvarianceSlack * opt.tol;
    ValidationReport n0 = natural_connection_check(q0, ft, s, opt.tol);
    ValidationReport nc = natural_connection_check(qc, ft, s, opt.tol);
    checks.push_back({"base_connection_natural", n0.max_residual(), lim, true});
    checks.push_back({"canonical_connection_natural", nc.max_residual(), lim, true});
    checks.push_back(
        {"canonical_torsion_identity", phi_canonical_identity_residual(tc, s), lim, true});

    // Trace identities tying the torsion forms to theta, theta* and omega.
    const double fscale =
        norm_scale(tf.t.cwiseAbs().maxCoeff(), tf.t_star.cwiseAbs().maxCoeff(),
                   forms.theta.cwiseAbs().maxCoeff());
    const Covec t_pred = 0.5 * (forms.theta_star + forms.theta_star.dot(s.xi) * s.eta);
    const Covec ts_pred = -0.5 * (forms.theta + forms.theta.dot(s.xi) * s.eta);
    const Covec th_pred = -(s.phi.transpose() * forms.omega);
    checks.push_back(
        {"torsion_trace_t", (tf.t - t_pred).cwiseAbs().maxCoeff() / fscale, lim, true});
    checks.push_back(
        {"torsion_trace_t_star", (tf.t_star - ts_pred).cwiseAbs().maxCoeff() / fscale, lim, true});
    checks.push_back(
        {"torsion_trace_t_hat", (tf.t_hat - th_pred).cwiseAbs().maxCoeff() / fscale, lim, true});

    const double corr_norm = (qc - q0).max_abs() / norm_scale(q0.max_abs());
    const double u0r = u0_residual(ft, s);
    out.report["correction_norm"] = corr_norm;
    out.report["u0_residual"] = u0r;
    out.report["torsion_forms"] = {{"t", covec_json(tf.t)},
                                   {"t_star", covec_json(tf.t_star)},
                                   {"t_hat", covec_json(tf.t_hat)}};

    json tres = json::object();
    for (TorsionClassId c : kAllTorsionClasses)
        tres[torsion_class_name(c)] = torsion_membership_residual(tc, s, c);
    out.report["torsion_membership"] = tres;

    try {
        CorrespondenceResult cr = correspondence_check(ft, s, tax, opt.tol);
        json jr;
        jr["input_class"] = class_name(cr.input_class);
        json rr = json::array();
        for (const auto& [tc_id, r] : cr.residuals)
            rr.push_back({{"torsion_class", torsion_class_name(tc_id)}, {"residual", r}});
        jr["asserted"] = rr;
        jr["flags"] = cr.flags;
        jr["pass"] = cr.pass;
        out.report["correspondence"] = jr;
        checks.push_back({"torsion_class_correspondence", cr.pass ? 0.0 : 1.0, 0.5, true});
        out.lines.push_back("input class " + class_name(cr.input_class) +
                            ": torsion lands in the paired torsion class" +
                            std::string(cr.pass ? "" : " -- MISMATCH"));
    } catch (const AmbiguousClass&) {
        out.lines.push_back("mixed-class input; reporting raw torsion class residuals");
    }

    push_checks(checks, out.report, out.lines);
    out.lines.push_back("canonical correction norm: " + num(corr_norm) +
                        " (vanishes only for integrable-type tensors; Nijenhuis residual " +
                        num(u0r) + ")");

    bool ok = true;
    for (const Check& c : checks) ok = ok && (!c.asserted || c.pass());
    out.report["pass"] = ok;
    out.exit_code = ok ? kExitOk : kExitInvariant;
    return out;
}

// ---- conformal -------------------------------------------------------------

namespace detail {

// The identity checks run for one group element.  Transform-law checks are
// asserted for every element; preservation checks only inside G0.
inline void conformal_element_checks(const FTensor& ft, const Structure& s,
                                     const Taxonomy& tax, const ConformalPointData& c,
                                     bool in_g0, double tol, std::vector<Check>& checks,
                                     const std::string& prefix) {
    const double lim = kInvarianceSlack * tol;
    const Structure sb = transform_structure(s, c);
    const FTensor fb = transform_F(ft, s, c, lim);

    const Tensor3 n = nijenhuis_from_F(ft, s);
    const Tensor3 nb = nijenhuis_from_F(fb, sb);
    checks.push_back({prefix + "nijenhuis_transform",
                      rel_diff(nijenhuis_phiphi(nb, sb), transform_N_phiphi(n, s, c)), lim,
                      true});
    checks.push_back({prefix + "nijenhuis_invariance",
                      rel_diff(raise_last(nijenhuis_phiphi(nb, sb), sb.g),
                               raise_last(nijenhuis_phiphi(n, s), s.g)),
                      lim, true});

    const Tensor3 t_direct = raise_last(t_canonical(fb, sb), sb.g);
    checks.push_back({prefix + "torsion_transform",
                      rel_diff(t_direct, transform_torsion(ft, s, c)), lim, true});
    if (in_g0) {
        checks.push_back({prefix + "torsion_preserved",
                          rel_diff(t_direct, raise_last(t_canonical(ft, s), s.g)), lim, true});
        Taxonomy tax_after(sb);
        const bool same = tax.classify(ft, tol).label() == tax_after.classify(fb, tol).label();
        checks.push_back({prefix + "class_preserved", same ? 0.0 : 1.0, 0.5, true});
    }
}

}  // namespace detail

inline Outcome cmd_conformal(const Options& opt) {
    using namespace detail;
    Outcome out;
    Scene sc = load_scene(opt.scene_path);
    const Structure& s = sc.structure;
    out.report["command"] = "conformal";
    out.report["scene"] = opt.scene_path;
    out.report["n"] = sc.n;

    ValidationReport sr = validate_structure(s, opt.tol);
    if (!sr.pass) {
        out.report["structure"] = report_json(sr);
        report_lines(sr, "structure axioms", out.lines);
        out.exit_code = kExitValidation;
        return out;
    }
    if (!sc.conformal && opt.trials == 0)
        throw ValidationError("scene has no conformal block and no --trials requested");

    Taxonomy tax(s);
    FTensor ft = realize_scene_F(sc, tax, opt.tol);
    std::vector<Check> checks;

    if (sc.conformal) {
        const ConformalPointData& c = *sc.conformal;
        const bool in_g0 = g0_predicate(s, c, opt.tol);
        if (opt.g0_only && !in_g0) {
            out.lines.push_back("conformal data is not torsion-preserving (G0 required)");
            out.report["in_g0"] = false;
            out.exit_code = kExitValidation;
            return out;
        }
        out.report["in_g0"] = in_g0;
        out.report["alpha"] = c.alpha();
        out.report["beta"] = c.beta();
        out.report["gamma"] = c.gamma();
        out.lines.push_back(std::string("scene element: ") +
                            (in_g0 ? "torsion-preserving (G0)" : "general") +
                            ", alpha=" + num(c.alpha()) + " beta=" + num(c.beta()) +
                            " gamma=" + num(c.gamma()));

        const Structure sb = transform_structure(s, c);
        const FTensor fb = transform_F(ft, s, c, kInvarianceSlack * opt.tol);
        const AssociatedForms before = associated_forms(ft, s);
        const AssociatedForms after = associated_forms(fb, sb);
        out.report["forms"] = {{"theta_xi_before", before.theta.dot(s.xi)},
                               {"theta_xi_after", after.theta.dot(sb.xi)},
                               {"theta_star_xi_before", before.theta_star.dot(s.xi)},
                               {"theta_star_xi_after", after.theta_star.dot(sb.xi)}};
        const std::string label_before = tax.classify(ft, opt.tol).label();
        const std::string label_after = Taxonomy(sb).classify(fb, opt.tol).label();
        out.report["label_before"] = label_before;
        out.report["label_after"] = label_after;
        out.lines.push_back("class before: " + label_before + ", after: " + label_after);

        if (opt.check_invariance)
            conformal_element_checks(ft, s, tax, c, in_g0, opt.tol, checks, "");
    }

    if (opt.check_invariance && opt.trials > 0) {
        for (int k = 0; k < opt.trials; ++k) {
            const uint64_t seed = opt.seed + static_cast<uint64_t>(k);
            ConformalPointData c =
                opt.g0_only ? g0_generator(s, seed) : random_conformal(s, seed);
            const bool in_g0 = g0_predicate(s, c, opt.tol);
            conformal_element_checks(ft, s, tax, c, in_g0, opt.tol, checks,
                                     "trial" + std::to_string(k) + "_");
        }
        out.lines.push_back("ran " + std::to_string(opt.trials) + " random " +
                            (opt.g0_only ? "torsion-preserving" : "general") +
                            " group elements");
    }

    push_checks(checks, out.report, out.lines);
    bool ok = true;
    for (const Check& c : checks) ok = ok && (!c.asserted || c.pass());
    out.report["pass"] = ok;
    out.exit_code = ok ? kExitOk : kExitInvariant;
    return out;
}

}  // namespace acbm::cli
