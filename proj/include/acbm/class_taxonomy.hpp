#pragma once

#include <array>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "acbm/fundamental.hpp"

namespace acbm {

// The eleven basic classes; a general fundamental tensor splits into pairwise
// transversal components, one per class, with F0 the case where all vanish.
enum class ClassId {
    F1, F2, F3, F4, F5, F6, F7, F8, F9, F10, F11,
};

inline constexpr std::array<ClassId, 11> kAllClasses = {
    ClassId::F1, ClassId::F2, ClassId::F3, ClassId::F4,  ClassId::F5, ClassId::F6,
    ClassId::F7, ClassId::F8, ClassId::F9, ClassId::F10, ClassId::F11,
};

inline int class_index(ClassId c) { return static_cast<int>(c); }

inline std::string class_name(ClassId c) { return "F" + std::to_string(class_index(c) + 1); }

inline ClassId parse_class(const std::string& s) {
    for (ClassId c : kAllClasses)
        if (class_name(c) == s) return c;
    throw InvalidParams("unknown class id: " + s);
}

// ---- direct constructors ---------------------------------------------------

// F1 member from a 1-form with theta0(xi) = 0:
//   F(x,y,z) = 1/2n { g(x,phi y) theta0(phi z) + g(phi x,phi y) theta0(phi^2 z) }_(y<->z)
inline Tensor3 construct_f1(const Structure& s, const Covec& theta0) {
    if (theta0.size() != s.d) throw ShapeMismatch("construct_f1: covector length");
    if (std::abs(theta0.dot(s.xi)) > 1e-9 * norm_scale(theta0.cwiseAbs().maxCoeff()))
        throw InvalidParams("construct_f1: theta0(xi) must vanish");
    const Mat g_phi = s.g.matrix() * s.phi;
    const Mat phit_g_phi = s.phi.transpose() * s.g.matrix() * s.phi;
    const Covec th_phi = s.phi.transpose() * theta0;
    const Covec th_phi2 = s.phi2().transpose() * theta0;
    const double c = 1.0 / (2.0 * s.n);
    Tensor3 a = Tensor3::from_fn(s.d, [&](int i, int j, int k) {
        return c * (g_phi(i, j) * th_phi[k] + phit_g_phi(i, j) * th_phi2[k]);
    });
    return sym_last_pair(a);
}

// F4 member with vertical trace theta(xi) = p:
//   F(x,y,z) = -p/2n { g(phi x,phi y) eta(z) + g(phi x,phi z) eta(y) }
inline Tensor3 construct_f4(const Structure& s, double p) {
    const Mat phit_g_phi = s.phi.transpose() * s.g.matrix() * s.phi;
    const double c = -p / (2.0 * s.n);
    Tensor3 a = Tensor3::from_fn(
        s.d, [&](int i, int j, int k) { return c * phit_g_phi(i, j) * s.eta[k]; });
    return sym_last_pair(a);
}

// F5 member with theta*(xi) = q:
//   F(x,y,z) = -q/2n { g(x,phi y) eta(z) + g(x,phi z) eta(y) }
inline Tensor3 construct_f5(const Structure& s, double q) {
    const Mat g_phi = s.g.matrix() * s.phi;
    const double c = -q / (2.0 * s.n);
    Tensor3 a =
        Tensor3::from_fn(s.d, [&](int i, int j, int k) { return c * g_phi(i, j) * s.eta[k]; });
    return sym_last_pair(a);
}

// F10 member F = eta (x) S from a symmetric phi-compatible datum S = F(xi,phi.,phi.)
// with S(xi,.) = 0.
inline Tensor3 construct_f10(const Structure& s, const Mat& datum) {
    if (datum.rows() != s.d || datum.cols() != s.d)
        throw ShapeMismatch("construct_f10: datum size");
    const double scale = norm_scale(datum.cwiseAbs().maxCoeff());
    if ((datum - datum.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InvalidParams("construct_f10: datum must be symmetric");
    if ((datum * s.xi).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InvalidParams("construct_f10: datum must annihilate xi");
    const Mat h = s.hproj();
    if ((h.transpose() * datum * h - s.phi.transpose() * datum * s.phi).cwiseAbs().maxCoeff() >
        1e-9 * scale)
        throw InvalidParams("construct_f10: datum must be phi-compatible");
    return outer1(s.eta, datum);
}

// F11 member from omega0 with omega0(xi) = 0:
//   F(x,y,z) = eta(x) { eta(y) omega0(z) + eta(z) omega0(y) }
inline Tensor3 construct_f11(const Structure& s, const Covec& omega0) {
    if (omega0.size() != s.d) throw ShapeMismatch("construct_f11: covector length");
    if (std::abs(omega0.dot(s.xi)) > 1e-9 * norm_scale(omega0.cwiseAbs().maxCoeff()))
        throw InvalidParams("construct_f11: omega0(xi) must vanish");
    return Tensor3::from_fn(s.d, [&](int i, int j, int k) {
        return s.eta[i] * (s.eta[j] * omega0[k] + s.eta[k] * omega0[j]);
    });
}

// Fundamental tensor of a shape operator A commuting with phi, killing xi,
// horizontal-valued and g-symmetric:
//   F(x,y,z) = eta(y) g(Ax,z) + eta(z) g(Ax,y)
// The result always lies in the classes with symmetric anti-compatible
// vertical part (F4 + F5 + F6).
inline Tensor3 construct_from_weingarten(const Structure& s, const Mat& a) {
    if (a.rows() != s.d || a.cols() != s.d)
        throw ShapeMismatch("construct_from_weingarten: matrix size");
    const double scale = norm_scale(a.cwiseAbs().maxCoeff());
    const Mat& g = s.g.matrix();
    if ((s.phi * a - a * s.phi).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InvalidWeingarten("shape operator must commute with phi");
    if ((a * s.xi).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InvalidWeingarten("shape operator must kill xi");
    if ((a.transpose() * s.eta).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InvalidWeingarten("shape operator must be horizontal-valued");
    if ((g * a - a.transpose() * g).cwiseAbs().maxCoeff() >
        1e-9 * scale * norm_scale(g.cwiseAbs().maxCoeff()))
        throw InvalidWeingarten("shape operator must be g-symmetric");
    const Mat ga = g * a;  // g(Ax,y); symmetric once A is g-symmetric
    return Tensor3::from_fn(s.d, [&](int i, int j, int k) {
        return s.eta[j] * ga(i, k) + s.eta[k] * ga(i, j);
    });
}

// ---- class membership residuals -------------------------------------------

namespace detail {

// F(x,y,xi) as a matrix over the first two slots.
inline Mat vertical_part(const Tensor3& f, const Structure& s) { return contract3(f, s.xi); }

inline double matrix_resid(const Mat& m, double scale) {
    return m.cwiseAbs().maxCoeff() / scale;
}

}  // namespace detail

// Max-abs violation of the characteristic conditions of one basic class,
// normalized by the magnitude of F.  Formula classes compare F against the
// formula re-evaluated at parameters traced back out of F; constraint classes
// evaluate their conditions directly.
inline double membership_residual(const FTensor& ft, const Structure& s, ClassId c) {
    const Tensor3& f = ft.tensor();
    const double scale = norm_scale(f.max_abs());
    const AssociatedForms forms = associated_forms(ft, s);

    switch (c) {
        case ClassId::F1: {
            Covec th = forms.theta - forms.theta.dot(s.xi) * s.eta;
            return (f - construct_f1(s, th)).max_abs() / scale;
        }
        case ClassId::F2: {
            double r = detail::matrix_resid(contract1(f, s.xi), scale);
            r = std::max(r, detail::matrix_resid(contract2(f, s.xi), scale));
            r = std::max(r, cyclic_sum(compose3(f, s.phi)).max_abs() / scale);
            r = std::max(r, forms.theta.cwiseAbs().maxCoeff() / scale);
            return r;
        }
        case ClassId::F3: {
            double r = detail::matrix_resid(contract1(f, s.xi), scale);
            r = std::max(r, detail::matrix_resid(contract2(f, s.xi), scale));
            r = std::max(r, cyclic_sum(f).max_abs() / scale);
            return r;
        }
        case ClassId::F4:
            return (f - construct_f4(s, forms.theta.dot(s.xi))).max_abs() / scale;
        case ClassId::F5:
            return (f - construct_f5(s, forms.theta_star.dot(s.xi))).max_abs() / scale;
        case ClassId::F6:
        case ClassId::F7:
        case ClassId::F8:
        case ClassId::F9: {
            const Mat k3 = detail::vertical_part(f, s);
            const Tensor3 pure = outer3(s.eta, k3) + outer2(s.eta, k3);
            double r = (f - pure).max_abs() / scale;
            const bool sym = (c == ClassId::F6 || c == ClassId::F8);
            const Mat swap = sym ? Mat(k3 - k3.transpose()) : Mat(k3 + k3.transpose());
            r = std::max(r, detail::matrix_resid(swap, scale));
            const Mat phik = s.phi.transpose() * k3 * s.phi;
            const bool anti = (c == ClassId::F6 || c == ClassId::F7);
            r = std::max(r, detail::matrix_resid(anti ? Mat(k3 + phik) : Mat(k3 - phik), scale));
            if (c == ClassId::F6 || c == ClassId::F7) {
                r = std::max(r, forms.theta.cwiseAbs().maxCoeff() / scale);
                r = std::max(r, forms.theta_star.cwiseAbs().maxCoeff() / scale);
            }
            return r;
        }
        case ClassId::F10: {
            const Mat w = s.phi.transpose() * contract1(f, s.xi) * s.phi;
            return (f - outer1(s.eta, w)).max_abs() / scale;
        }
        case ClassId::F11: {
            Tensor3 pure = Tensor3::from_fn(s.d, [&](int i, int j, int k) {
                return s.eta[i] * (s.eta[j] * forms.omega[k] + s.eta[k] * forms.omega[j]);
            });
            return (f - pure).max_abs() / scale;
        }
    }
    throw InvalidParams("membership_residual: bad class id");
}

// ---- vectorization ----------------------------------------------------------

inline Eigen::VectorXd vec(const Tensor3& t) {
    return Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
}

inline Tensor3 unvec(const Eigen::VectorXd& v, int d) {
    Tensor3 t(d);
    Eigen::Map<Eigen::VectorXd>(t.data(), v.size()) = v;
    return t;
}

// ---- decomposition results --------------------------------------------------

struct Decomposition {
    std::array<Tensor3, 11> component;
    double reassembly_residual = 0.0;
};

struct Classification {
    std::array<double, 11> component_norm{};
    std::array<bool, 11> present{};
    double reassembly_residual = 0.0;

    bool is_f0() const {
        for (bool p : present)
            if (p) return false;
        return true;
    }

    // "F0", "F4", "F4+F5", ...
    std::string label() const {
        std::string out;
        for (ClassId c : kAllClasses)
            if (present[class_index(c)]) {
                if (!out.empty()) out += "+";
                out += class_name(c);
            }
        return out.empty() ? "F0" : out;
    }
};

// Immutable handle over the numerically realized class subspaces of one
// structure.  Construction runs one rank-revealing factorization per class;
// share the handle when classifying many tensors against the same structure.
class Taxonomy {
public:
    explicit Taxonomy(Structure s) : s_(std::move(s)) {
        const int D = s_.d * s_.d * s_.d;
        adm_basis_ = null_space(op_matrix(D, [&](const Tensor3& f) { return adm_ops(f); }));
        int total = 0;
        for (ClassId c : kAllClasses) {
            Mat rows = op_matrix(D, [&](const Tensor3& f) {
                auto r = adm_ops(f);
                append(r, class_ops(f, c));
                return r;
            });
            basis_[class_index(c)] = null_space(rows);
            total += dim(c);
        }
        concat_.resize(D, total);
        int col = 0;
        for (ClassId c : kAllClasses) {
            const Mat& b = basis_[class_index(c)];
            concat_.middleCols(col, b.cols()) = b;
            col += static_cast<int>(b.cols());
        }
        qr_.compute(concat_);
        if (qr_.rank() < total)
            throw DecompositionFailure("class subspaces are not linearly independent");
    }

    const Structure& structure() const { return s_; }
    int dim_admissible() const { return static_cast<int>(adm_basis_.cols()); }
    int dim(ClassId c) const { return static_cast<int>(basis_[class_index(c)].cols()); }
    const Mat& basis(ClassId c) const { return basis_[class_index(c)]; }

    Decomposition decompose(const FTensor& ft, double tol = kDefaultTol) const {
        const Eigen::VectorXd f = vec(ft.tensor());
        const Eigen::VectorXd coef = qr_.solve(f);
        Decomposition dec;
        int col = 0;
        for (ClassId c : kAllClasses) {
            const Mat& b = basis_[class_index(c)];
            const int m = static_cast<int>(b.cols());
            dec.component[class_index(c)] = unvec(b * coef.segment(col, m), s_.d);
            col += m;
        }
        const double scale = norm_scale(ft.tensor().max_abs());
        dec.reassembly_residual = (concat_ * coef - f).cwiseAbs().maxCoeff() / scale;
        if (dec.reassembly_residual > tol)
            throw DecompositionFailure("reassembly residual " +
                                       std::to_string(dec.reassembly_residual));
        return dec;
    }

    // A component counts as present when its norm exceeds 1e-7 relative to F.
    Classification classify(const FTensor& ft, double tol = kDefaultTol) const {
        const Decomposition dec = decompose(ft, tol);
        Classification cl;
        cl.reassembly_residual = dec.reassembly_residual;
        const double scale = norm_scale(ft.tensor().max_abs());
        for (ClassId c : kAllClasses) {
            const int i = class_index(c);
            cl.component_norm[i] = dec.component[i].max_abs();
            cl.present[i] = cl.component_norm[i] > 1e-7 * scale;
        }
        return cl;
    }

    // Random member of one class, scaled to unit max-abs; the zero tensor for
    // classes that are empty at this dimension.
    Tensor3 random_member(ClassId c, uint64_t seed) const {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        auto trimmed = [&](Covec r) { return Covec(r - r.dot(s_.xi) * s_.eta); };
        switch (c) {
            case ClassId::F1: {
                Covec r(s_.d);
                for (int i = 0; i < s_.d; ++i) r[i] = nd(rng);
                return normalized(construct_f1(s_, trimmed(r)));
            }
            case ClassId::F4:
                return normalized(construct_f4(s_, 1.0 + std::abs(nd(rng))));
            case ClassId::F5:
                return normalized(construct_f5(s_, 1.0 + std::abs(nd(rng))));
            case ClassId::F10: {
                Mat b(s_.d, s_.d);
                for (int i = 0; i < s_.d; ++i)
                    for (int j = 0; j < s_.d; ++j) b(i, j) = nd(rng);
                const Mat cmat = b + b.transpose();
                const Mat h = s_.hproj();
                const Mat datum =
                    0.25 * (h.transpose() * cmat * h + s_.phi.transpose() * cmat * s_.phi);
                return normalized(construct_f10(s_, datum));
            }
            case ClassId::F11: {
                Covec r(s_.d);
                for (int i = 0; i < s_.d; ++i) r[i] = nd(rng);
                return normalized(construct_f11(s_, trimmed(r)));
            }
            default: {
                const Mat& b = basis_[class_index(c)];
                if (b.cols() == 0) return Tensor3(s_.d);
                Eigen::VectorXd coef(b.cols());
                for (int i = 0; i < coef.size(); ++i) coef[i] = nd(rng);
                return normalized(unvec(b * coef, s_.d));
            }
        }
    }

private:
    static Tensor3 normalized(Tensor3 t) {
        const double m = t.max_abs();
        if (m > 0) t *= 1.0 / m;
        return t;
    }

    static void append(std::vector<double>& into, const std::vector<double>& more) {
        into.insert(into.end(), more.begin(), more.end());
    }

    static void append_tensor(std::vector<double>& into, const Tensor3& t) {
        into.insert(into.end(), t.data(), t.data() + t.size());
    }

    static void append_matrix(std::vector<double>& into, const Mat& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) into.push_back(m(i, j));
    }

    static void append_covec(std::vector<double>& into, const Covec& c) {
        into.insert(into.end(), c.data(), c.data() + c.size());
    }

    std::vector<double> adm_ops(const Tensor3& f) const {
        std::vector<double> out;
        append_tensor(out, antisym_last_pair(f));
        const Tensor3 rhs = compose23(f, s_.phi) + outer2(s_.eta, contract2(f, s_.xi)) +
                            outer3(s_.eta, contract3(f, s_.xi));
        append_tensor(out, f - rhs);
        return out;
    }

    // Characteristic conditions of each class as linear operators on F; the
    // class subspace is their joint null space inside the admissible space.
    std::vector<double> class_ops(const Tensor3& f, ClassId c) const {
        std::vector<double> out;
        auto forms = [&] {
            return associated_forms_raw(f);
        };
        switch (c) {
            case ClassId::F1: {
                auto [theta, theta_star, omega] = forms();
                Covec th = theta - theta.dot(s_.xi) * s_.eta;
                // construct_f1 without the parameter domain check (linear in F)
                const Mat g_phi = s_.g.matrix() * s_.phi;
                const Mat pgp = s_.phi.transpose() * s_.g.matrix() * s_.phi;
                const Covec t1 = s_.phi.transpose() * th;
                const Covec t2 = s_.phi2().transpose() * th;
                const double cc = 1.0 / (2.0 * s_.n);
                Tensor3 a = Tensor3::from_fn(s_.d, [&](int i, int j, int k) {
                    return cc * (g_phi(i, j) * t1[k] + pgp(i, j) * t2[k]);
                });
                append_tensor(out, f - sym_last_pair(a));
                break;
            }
            case ClassId::F2: {
                append_matrix(out, contract1(f, s_.xi));
                append_matrix(out, contract2(f, s_.xi));
                append_tensor(out, cyclic_sum(compose3(f, s_.phi)));
                append_covec(out, forms().theta);
                break;
            }
            case ClassId::F3: {
                append_matrix(out, contract1(f, s_.xi));
                append_matrix(out, contract2(f, s_.xi));
                append_tensor(out, cyclic_sum(f));
                break;
            }
            case ClassId::F4: {
                append_tensor(out, f - construct_f4(s_, forms().theta.dot(s_.xi)));
                break;
            }
            case ClassId::F5: {
                append_tensor(out, f - construct_f5(s_, forms().theta_star.dot(s_.xi)));
                break;
            }
            case ClassId::F6:
            case ClassId::F7:
            case ClassId::F8:
            case ClassId::F9: {
                const Mat k3 = contract3(f, s_.xi);
                append_tensor(out, f - outer3(s_.eta, k3) - outer2(s_.eta, k3));
                const bool sym = (c == ClassId::F6 || c == ClassId::F8);
                append_matrix(out, sym ? Mat(k3 - k3.transpose()) : Mat(k3 + k3.transpose()));
                const Mat phik = s_.phi.transpose() * k3 * s_.phi;
                const bool anti = (c == ClassId::F6 || c == ClassId::F7);
                append_matrix(out, anti ? Mat(k3 + phik) : Mat(k3 - phik));
                if (anti) {
                    auto [theta, theta_star, omega] = forms();
                    append_covec(out, theta);
                    append_covec(out, theta_star);
                }
                break;
            }
            case ClassId::F10: {
                const Mat w = s_.phi.transpose() * contract1(f, s_.xi) * s_.phi;
                append_tensor(out, f - outer1(s_.eta, w));
                break;
            }
            case ClassId::F11: {
                auto [theta, theta_star, omega] = forms();
                Tensor3 pure = Tensor3::from_fn(s_.d, [&](int i, int j, int k) {
                    return s_.eta[i] * (s_.eta[j] * omega[k] + s_.eta[k] * omega[j]);
                });
                append_tensor(out, f - pure);
                break;
            }
        }
        return out;
    }

    // Trace forms evaluated on a raw tensor (no admissibility gate).
    AssociatedForms associated_forms_raw(const Tensor3& t) const {
        const Mat& gi = s_.g.inverse();
        const Mat gp = gi * s_.phi.transpose();
        Covec theta = Covec::Zero(s_.d), theta_star = Covec::Zero(s_.d),
              omega = Covec::Zero(s_.d);
        for (int k = 0; k < s_.d; ++k)
            for (int i = 0; i < s_.d; ++i)
                for (int j = 0; j < s_.d; ++j) {
                    theta[k] += gi(i, j) * t(i, j, k);
                    theta_star[k] += gp(i, j) * t(i, j, k);
                    omega[k] += s_.xi[i] * s_.xi[j] * t(i, j, k);
                }
        theta -= omega;  // theta traces over ker eta only, as in associated_forms
        return {theta, theta_star, omega};
    }

    template <class Fn>
    Mat op_matrix(int D, Fn&& fn) const {
        std::vector<double> probe = fn(Tensor3(s_.d));
        Mat m(static_cast<int>(probe.size()), D);
        for (int col = 0; col < D; ++col) {
            Tensor3 e(s_.d);
            e.data()[col] = 1.0;
            std::vector<double> r = fn(e);
            for (size_t row = 0; row < r.size(); ++row)
                m(static_cast<int>(row), col) = r[row];
        }
        return m;
    }

    // JacobiSVD rather than BDCSVD: the divide-and-conquer kernel in Eigen
    // 3.4.0 reads a perm index of -1 on some of the larger constraint
    // matrices here (debug assert in perturbCol0), yielding bogus ranks in
    // release builds.
    static Mat null_space(const Mat& a) {
        Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double cutoff = kSvCutoff * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv[i] > cutoff) ++rank;
        return svd.matrixV().rightCols(svd.matrixV().cols() - rank);
    }

    Structure s_;
    Mat adm_basis_;
    std::array<Mat, 11> basis_;
    Mat concat_;
    Eigen::ColPivHouseholderQR<Mat> qr_;
};

}  // namespace acbm
