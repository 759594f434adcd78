#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "acbm/class_taxonomy.hpp"
#include "acbm/conformal.hpp"

// Line-oriented scene files ("acbm-scene v1").  A scene carries one structure,
// at most one tensor source (raw F, a Weingarten map, or a list of class
// generators) and optionally the pointwise data of a conformal transformation.
//
//   acbm-scene v1
//   n 2
//   structure
//   phi <d numbers>      d rows
//   xi <d numbers>
//   eta <d numbers>
//   g <d numbers>        d rows
//   end
//   F                    d^2 rows of d numbers, outer slot slowest
//   ...
//   end
//   generator
//   class F4
//   theta_xi 2
//   end
//   conformal
//   u 0.1
//   du <d numbers>
//   end
//
// '#' starts a comment; blank lines are skipped.  Serialization uses 17
// significant digits so parse/serialize round-trips are byte-identical.

namespace acbm {

struct GeneratorEntry {
    ClassId cls = ClassId::F1;
    Covec theta;         // F1
    double scalar = 0;   // F4: theta_xi, F5: theta_star_xi
    Mat datum;           // F10
    Covec omega;         // F11
    bool has_seed = false;
    uint64_t seed = 0;   // constraint-defined classes
    double scale = 1.0;
};

enum class SceneSource { None, RawF, Weingarten, Generator };

struct Scene {
    int n = 0;
    Structure structure;
    SceneSource source = SceneSource::None;
    Tensor3 f_raw;
    Mat weingarten;
    std::vector<GeneratorEntry> generator;
    std::optional<ConformalPointData> conformal;
};

namespace detail {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        if (tok[0] == '#') break;
        out.push_back(tok);
    }
    return out;
}

inline double parse_num(const std::string& tok, int line) {
    double v;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw ParseError(line, "expected a number, got '" + tok + "'");
    return v;
}

inline Covec parse_row(const std::vector<std::string>& toks, size_t from, int d, int line) {
    if (toks.size() - from != static_cast<size_t>(d))
        throw ParseError(line, "expected " + std::to_string(d) + " numbers, got " +
                                   std::to_string(toks.size() - from));
    Covec r(d);
    for (int i = 0; i < d; ++i) r[i] = parse_num(toks[from + i], line);
    return r;
}

// Pulls lines out of the text one at a time, remembering the line number.
class LineReader {
public:
    explicit LineReader(const std::string& text) : is_(text) {}

    // Next line with content, tokenized; false at end of input.
    bool next(std::vector<std::string>& toks) {
        std::string line;
        while (std::getline(is_, line)) {
            ++lineno_;
            toks = tokenize(line);
            if (!toks.empty()) return true;
        }
        return false;
    }

    int lineno() const { return lineno_; }

private:
    std::istringstream is_;
    int lineno_ = 0;
};

}  // namespace detail

inline Scene parse_scene(const std::string& text) {
    using detail::parse_num;
    using detail::parse_row;
    detail::LineReader rd(text);
    std::vector<std::string> toks;

    if (!rd.next(toks) || toks.size() != 2 || toks[0] != "acbm-scene" || toks[1] != "v1")
        throw ParseError(rd.lineno() == 0 ? 1 : rd.lineno(), "missing 'acbm-scene v1' header");

    Scene sc;
    int d = 0;
    bool have_n = false, have_structure = false;

    auto need_n = [&](const std::string& what) {
        if (!have_n) throw ParseError(rd.lineno(), "'" + what + "' before 'n'");
    };
    auto matrix_rows = [&](const std::string& name, int rows) {
        Mat m(rows, d);
        for (int r = 0; r < rows; ++r) {
            if (!rd.next(toks))
                throw ParseError(rd.lineno() + 1, "unexpected end of input in '" + name + "'");
            if (toks[0] == "end")
                throw ParseError(rd.lineno(), "'" + name + "' needs " + std::to_string(rows) +
                                                  " rows, got " + std::to_string(r));
            m.row(r) = parse_row(toks, 0, d, rd.lineno()).transpose();
        }
        return m;
    };
    auto expect_end = [&](const std::string& name) {
        if (!rd.next(toks) || toks[0] != "end")
            throw ParseError(rd.lineno(), "expected 'end' of '" + name + "'");
    };
    auto require_no_source = [&] {
        if (sc.source != SceneSource::None)
            throw ParseError(rd.lineno(), "scene already has a tensor source");
    };
    auto one_val = [&](const std::vector<std::string>& t) {
        if (t.size() != 2) throw ParseError(rd.lineno(), "'" + t[0] + "' takes one value");
        return parse_num(t[1], rd.lineno());
    };

    while (rd.next(toks)) {
        const std::string& key = toks[0];
        if (key == "n") {
            if (toks.size() != 2) throw ParseError(rd.lineno(), "usage: n <positive integer>");
            int n = static_cast<int>(parse_num(toks[1], rd.lineno()));
            if (n < 1) throw ParseError(rd.lineno(), "n must be at least 1");
            sc.n = n;
            d = 2 * n + 1;
            have_n = true;
        } else if (key == "structure") {
            need_n("structure");
            Mat phi(d, d), g(d, d);
            Vec xi(d);
            Covec eta(d);
            int phi_rows = 0, g_rows = 0;
            bool have_xi = false, have_eta = false;
            while (rd.next(toks) && toks[0] != "end") {
                if (toks[0] == "phi" && phi_rows < d)
                    phi.row(phi_rows++) = parse_row(toks, 1, d, rd.lineno()).transpose();
                else if (toks[0] == "g" && g_rows < d)
                    g.row(g_rows++) = parse_row(toks, 1, d, rd.lineno()).transpose();
                else if (toks[0] == "xi" && !have_xi) {
                    xi = parse_row(toks, 1, d, rd.lineno());
                    have_xi = true;
                } else if (toks[0] == "eta" && !have_eta) {
                    eta = parse_row(toks, 1, d, rd.lineno());
                    have_eta = true;
                } else {
                    throw ParseError(rd.lineno(), "unexpected '" + toks[0] + "' in structure");
                }
            }
            if (phi_rows != d || g_rows != d || !have_xi || !have_eta)
                throw ParseError(rd.lineno(), "incomplete structure block");
            sc.structure = Structure{sc.n, d, phi, xi, eta, Metric(g)};
            have_structure = true;
        } else if (key == "F") {
            need_n("F");
            require_no_source();
            Mat rows = matrix_rows("F", d * d);
            sc.f_raw = Tensor3::from_fn(
                d, [&](int i, int j, int k) { return rows(i * d + j, k); });
            expect_end("F");
            sc.source = SceneSource::RawF;
        } else if (key == "weingarten") {
            need_n("weingarten");
            require_no_source();
            sc.weingarten = matrix_rows("weingarten", d);
            expect_end("weingarten");
            sc.source = SceneSource::Weingarten;
        } else if (key == "generator") {
            need_n("generator");
            require_no_source();
            bool have_line = rd.next(toks);
            while (have_line && toks[0] != "end") {
                if (toks[0] != "class" || toks.size() != 2)
                    throw ParseError(rd.lineno(), "expected 'class <Fk>'");
                GeneratorEntry e;
                try {
                    e.cls = parse_class(toks[1]);
                } catch (const InvalidParams& ex) {
                    throw ParseError(rd.lineno(), ex.what());
                }
                // Parameter lines belong to this entry until the next 'class' or 'end'.
                while ((have_line = rd.next(toks)) && toks[0] != "end" && toks[0] != "class") {
                    const std::string& p = toks[0];
                    if (p == "theta")
                        e.theta = parse_row(toks, 1, d, rd.lineno());
                    else if (p == "theta_xi" || p == "theta_star_xi")
                        e.scalar = one_val(toks);
                    else if (p == "omega")
                        e.omega = parse_row(toks, 1, d, rd.lineno());
                    else if (p == "datum")
                        e.datum = matrix_rows("datum", d);
                    else if (p == "seed") {
                        e.seed = static_cast<uint64_t>(one_val(toks));
                        e.has_seed = true;
                    } else if (p == "scale")
                        e.scale = one_val(toks);
                    else
                        throw ParseError(rd.lineno(), "unknown generator parameter '" + p + "'");
                }
                sc.generator.push_back(std::move(e));
            }
            if (!have_line) throw ParseError(rd.lineno() + 1, "unterminated generator block");
            if (sc.generator.empty())
                throw ParseError(rd.lineno(), "generator block has no class entries");
            sc.source = SceneSource::Generator;
        } else if (key == "conformal") {
            need_n("conformal");
            ConformalPointData cd = identity_conformal(d);
            while (rd.next(toks) && toks[0] != "end") {
                const std::string& p = toks[0];
                if (p == "u")
                    cd.u = one_val(toks);
                else if (p == "v")
                    cd.v = one_val(toks);
                else if (p == "w")
                    cd.w = one_val(toks);
                else if (p == "du")
                    cd.du = parse_row(toks, 1, d, rd.lineno());
                else if (p == "dv")
                    cd.dv = parse_row(toks, 1, d, rd.lineno());
                else if (p == "dw")
                    cd.dw = parse_row(toks, 1, d, rd.lineno());
                else
                    throw ParseError(rd.lineno(), "unknown conformal parameter '" + p + "'");
            }
            sc.conformal = std::move(cd);
        } else {
            throw ParseError(rd.lineno(), "unknown directive '" + key + "'");
        }
    }
    if (!have_n) throw ParseError(rd.lineno() + 1, "scene has no 'n'");
    if (!have_structure) throw ParseError(rd.lineno() + 1, "scene has no structure block");
    return sc;
}

inline std::string serialize_scene(const Scene& sc) {
    using detail::fmt_num;
    std::string out = "acbm-scene v1\n";
    const int d = 2 * sc.n + 1;
    out += "n " + std::to_string(sc.n) + "\n";

    auto row = [&](const char* key, const Covec& r) {
        out += key;
        for (int i = 0; i < r.size(); ++i) out += " " + fmt_num(r[i]);
        out += "\n";
    };
    auto bare_rows = [&](const Mat& m) {
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) out += (c ? " " : "") + fmt_num(m(r, c));
            out += "\n";
        }
    };

    out += "structure\n";
    for (int r = 0; r < d; ++r) row("phi", sc.structure.phi.row(r));
    row("xi", sc.structure.xi);
    row("eta", sc.structure.eta);
    for (int r = 0; r < d; ++r) row("g", sc.structure.g.matrix().row(r));
    out += "end\n";

    switch (sc.source) {
        case SceneSource::None:
            break;
        case SceneSource::RawF: {
            out += "F\n";
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    for (int k = 0; k < d; ++k)
                        out += (k ? " " : "") + fmt_num(sc.f_raw(i, j, k));
                    out += "\n";
                }
            out += "end\n";
            break;
        }
        case SceneSource::Weingarten:
            out += "weingarten\n";
            bare_rows(sc.weingarten);
            out += "end\n";
            break;
        case SceneSource::Generator:
            out += "generator\n";
            for (const GeneratorEntry& e : sc.generator) {
                out += "class " + class_name(e.cls) + "\n";
                switch (e.cls) {
                    case ClassId::F1:
                        row("theta", e.theta);
                        break;
                    case ClassId::F4:
                        out += "theta_xi " + fmt_num(e.scalar) + "\n";
                        break;
                    case ClassId::F5:
                        out += "theta_star_xi " + fmt_num(e.scalar) + "\n";
                        break;
                    case ClassId::F10:
                        out += "datum\n";
                        bare_rows(e.datum);
                        break;
                    case ClassId::F11:
                        row("omega", e.omega);
                        break;
                    default:
                        out += "seed " + std::to_string(e.seed) + "\n";
                        if (e.scale != 1.0) out += "scale " + fmt_num(e.scale) + "\n";
                        break;
                }
            }
            out += "end\n";
            break;
    }

    if (sc.conformal) {
        const ConformalPointData& cd = *sc.conformal;
        out += "conformal\n";
        out += "u " + fmt_num(cd.u) + "\n";
        out += "v " + fmt_num(cd.v) + "\n";
        out += "w " + fmt_num(cd.w) + "\n";
        row("du", cd.du);
        row("dv", cd.dv);
        row("dw", cd.dw);
        out += "end\n";
    }
    return out;
}

// Instantiates the scene's tensor source.  Generator entries for the
// constraint-defined classes draw from the given taxonomy (built on demand when
// the caller has none at hand).
inline FTensor realize_scene_F(const Scene& sc, const Taxonomy& tax, double tol = kDefaultTol) {
    const Structure& s = sc.structure;
    switch (sc.source) {
        case SceneSource::RawF:
            return FTensor::checked(sc.f_raw, s, tol);
        case SceneSource::Weingarten:
            return FTensor::checked(construct_from_weingarten(s, sc.weingarten), s, tol);
        case SceneSource::Generator: {
            Tensor3 acc(s.d);
            for (const GeneratorEntry& e : sc.generator) {
                switch (e.cls) {
                    case ClassId::F1:
                        acc += construct_f1(s, e.theta);
                        break;
                    case ClassId::F4:
                        acc += construct_f4(s, e.scalar);
                        break;
                    case ClassId::F5:
                        acc += construct_f5(s, e.scalar);
                        break;
                    case ClassId::F10:
                        acc += construct_f10(s, e.datum);
                        break;
                    case ClassId::F11:
                        acc += construct_f11(s, e.omega);
                        break;
                    default: {
                        if (!e.has_seed)
                            throw InvalidParams("generator entry for " + class_name(e.cls) +
                                                " needs a seed");
                        Tensor3 m = tax.random_member(e.cls, e.seed);
                        m *= e.scale;
                        acc += m;
                        break;
                    }
                }
            }
            return FTensor::checked(acc, s, tol);
        }
        case SceneSource::None:
            break;
    }
    throw InvalidParams("scene has no tensor source");
}

inline FTensor realize_scene_F(const Scene& sc, double tol = kDefaultTol) {
    return realize_scene_F(sc, Taxonomy(sc.structure), tol);
}

}  // namespace acbm
