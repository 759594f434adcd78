#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "acbm/errors.hpp"

namespace acbm {

using Vec = Eigen::VectorXd;    // tangent vector, components against the working basis
using Covec = Eigen::VectorXd;  // 1-form; apply with covec.dot(x)
using Mat = Eigen::MatrixXd;

// |det g| below this means the bilinear form is treated as degenerate.
inline constexpr double kDegeneracyThreshold = 1e-12;

// Default comparison tolerance for residuals normalized by operand magnitude.
inline constexpr double kDefaultTol = 1e-9;

// Singular values below cutoff * max_sv count as zero in rank decisions.
inline constexpr double kSvCutoff = 1e-10;

inline double norm_scale(double a, double b = 0.0, double c = 0.0) {
    return std::max({1.0, a, b, c});
}

// Dense (0,3)-tensor over a d-dimensional space, stored row-major as T(i,j,k).
// The same container carries vector-valued bilinear maps, with the last index
// read as the value component; raise_last/lower_last convert between the two.
class Tensor3 {
public:
    Tensor3() : d_(0) {}
    explicit Tensor3(int d) : d_(d), v_(static_cast<size_t>(d) * d * d, 0.0) {}

    template <class Fn>
    static Tensor3 from_fn(int d, Fn&& f) {
        Tensor3 t(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) t(i, j, k) = f(i, j, k);
        return t;
    }

    int dim() const { return d_; }

    double& operator()(int i, int j, int k) { return v_[idx(i, j, k)]; }
    double operator()(int i, int j, int k) const { return v_[idx(i, j, k)]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    size_t size() const { return v_.size(); }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

    Tensor3& operator+=(const Tensor3& o) {
        check_same(o);
        for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    Tensor3& operator-=(const Tensor3& o) {
        check_same(o);
        for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Tensor3& operator*=(double s) {
        for (double& x : v_) x *= s;
        return *this;
    }

    friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
    friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
    friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

private:
    size_t idx(int i, int j, int k) const {
        return (static_cast<size_t>(i) * d_ + j) * d_ + k;
    }
    void check_same(const Tensor3& o) const {
        if (d_ != o.d_) throw ShapeMismatch("Tensor3 dimension mismatch");
    }

    int d_;
    std::vector<double> v_;
};

inline double eval(const Tensor3& t, const Vec& x, const Vec& y, const Vec& z) {
    const int d = t.dim();
    if (x.size() != d || y.size() != d || z.size() != d)
        throw ShapeMismatch("eval: vector length != tensor dimension");
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        if (x[i] == 0.0) continue;
        double si = 0.0;
        for (int j = 0; j < d; ++j) {
            if (y[j] == 0.0) continue;
            double sj = 0.0;
            for (int k = 0; k < d; ++k) sj += t(i, j, k) * z[k];
            si += y[j] * sj;
        }
        s += x[i] * si;
    }
    return s;
}

// ---- bracket operations ---------------------------------------------------

// {A}_[x<->y] : A(x,y,z) - A(y,x,z)
inline Tensor3 antisym_first_pair(const Tensor3& a) {
    return Tensor3::from_fn(a.dim(),
                            [&](int i, int j, int k) { return a(i, j, k) - a(j, i, k); });
}

// {A}_(x<->y) : A(x,y,z) + A(y,x,z)
inline Tensor3 sym_first_pair(const Tensor3& a) {
    return Tensor3::from_fn(a.dim(),
                            [&](int i, int j, int k) { return a(i, j, k) + a(j, i, k); });
}

// {A}_(y<->z) : A(x,y,z) + A(x,z,y)
inline Tensor3 sym_last_pair(const Tensor3& a) {
    return Tensor3::from_fn(a.dim(),
                            [&](int i, int j, int k) { return a(i, j, k) + a(i, k, j); });
}

// {A}_[y<->z] : A(x,y,z) - A(x,z,y)
inline Tensor3 antisym_last_pair(const Tensor3& a) {
    return Tensor3::from_fn(a.dim(),
                            [&](int i, int j, int k) { return a(i, j, k) - a(i, k, j); });
}

// cyclic sum over (x,y,z)
inline Tensor3 cyclic_sum(const Tensor3& a) {
    return Tensor3::from_fn(a.dim(), [&](int i, int j, int k) {
        return a(i, j, k) + a(j, k, i) + a(k, i, j);
    });
}

// ---- slot composition and permutation -------------------------------------

// R(x,y,z) = A(Mx,y,z)
inline Tensor3 compose1(const Tensor3& a, const Mat& m) {
    const int d = a.dim();
    if (m.rows() != d || m.cols() != d) throw ShapeMismatch("compose1: matrix size");
    return Tensor3::from_fn(d, [&](int i, int j, int k) {
        double s = 0.0;
        for (int p = 0; p < d; ++p) s += m(p, i) * a(p, j, k);
        return s;
    });
}

// R(x,y,z) = A(x,My,z)
inline Tensor3 compose2(const Tensor3& a, const Mat& m) {
    const int d = a.dim();
    if (m.rows() != d || m.cols() != d) throw ShapeMismatch("compose2: matrix size");
    return Tensor3::from_fn(d, [&](int i, int j, int k) {
        double s = 0.0;
        for (int p = 0; p < d; ++p) s += m(p, j) * a(i, p, k);
        return s;
    });
}

// R(x,y,z) = A(x,y,Mz)
inline Tensor3 compose3(const Tensor3& a, const Mat& m) {
    const int d = a.dim();
    if (m.rows() != d || m.cols() != d) throw ShapeMismatch("compose3: matrix size");
    return Tensor3::from_fn(d, [&](int i, int j, int k) {
        double s = 0.0;
        for (int p = 0; p < d; ++p) s += m(p, k) * a(i, j, p);
        return s;
    });
}

// R(x,y,z) = A(x,My,Mz)
inline Tensor3 compose23(const Tensor3& a, const Mat& m) { return compose3(compose2(a, m), m); }

// R(x,y,z) = A(Mx,My,Mz)
inline Tensor3 compose_all(const Tensor3& a, const Mat& m) {
    return compose1(compose23(a, m), m);
}

// R(i,j,k) = A(args[perm[0]], args[perm[1]], args[perm[2]]) with args = (i,j,k).
// e.g. perm {1,2,0} turns A into (x,y,z) |-> A(y,z,x).
inline Tensor3 permuted(const Tensor3& a, int p0, int p1, int p2) {
    return Tensor3::from_fn(a.dim(), [&](int i, int j, int k) {
        const int arg[3] = {i, j, k};
        return a(arg[p0], arg[p1], arg[p2]);
    });
}

// ---- contractions against a fixed vector ----------------------------------

// B(j,k) = A(v, e_j, e_k)
inline Mat contract1(const Tensor3& a, const Vec& v) {
    const int d = a.dim();
    Mat b = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        if (v[i] == 0.0) continue;
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) b(j, k) += v[i] * a(i, j, k);
    }
    return b;
}

// B(i,k) = A(e_i, v, e_k)
inline Mat contract2(const Tensor3& a, const Vec& v) {
    const int d = a.dim();
    Mat b = Mat::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        if (v[j] == 0.0) continue;
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) b(i, k) += v[j] * a(i, j, k);
    }
    return b;
}

// B(i,j) = A(e_i, e_j, v)
inline Mat contract3(const Tensor3& a, const Vec& v) {
    const int d = a.dim();
    Mat b = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        if (v[k] == 0.0) continue;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) b(i, j) += v[k] * a(i, j, k);
    }
    return b;
}

// ---- outer products with a 1-form -----------------------------------------

// R(x,y,z) = c(x) B(y,z)
inline Tensor3 outer1(const Covec& c, const Mat& b) {
    return Tensor3::from_fn(static_cast<int>(c.size()),
                            [&](int i, int j, int k) { return c[i] * b(j, k); });
}

// R(x,y,z) = c(y) B(x,z)
inline Tensor3 outer2(const Covec& c, const Mat& b) {
    return Tensor3::from_fn(static_cast<int>(c.size()),
                            [&](int i, int j, int k) { return c[j] * b(i, k); });
}

// R(x,y,z) = c(z) B(x,y)
inline Tensor3 outer3(const Covec& c, const Mat& b) {
    return Tensor3::from_fn(static_cast<int>(c.size()),
                            [&](int i, int j, int k) { return c[k] * b(i, j); });
}

// ---- metric ----------------------------------------------------------------

// Symmetric nondegenerate bilinear form with cached inverse and determinant.
class Metric {
public:
    Metric() = default;

    explicit Metric(Mat m) : g_(std::move(m)) {
        if (g_.rows() != g_.cols()) throw ShapeMismatch("Metric: matrix not square");
        Eigen::FullPivLU<Mat> lu(g_);
        det_ = lu.determinant();
        if (std::abs(det_) < kDegeneracyThreshold)
            throw DegenerateMetric("Metric: |det| = " + std::to_string(std::abs(det_)));
        ginv_ = lu.inverse();
    }

    int dim() const { return static_cast<int>(g_.rows()); }
    const Mat& matrix() const { return g_; }
    const Mat& inverse() const { return ginv_; }
    double det() const { return det_; }

    double operator()(const Vec& x, const Vec& y) const { return x.dot(g_ * y); }

    // (negatives, positives) among eigenvalues; the form is assumed symmetric.
    std::pair<int, int> signature() const {
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g_ + g_.transpose()));
        int neg = 0, pos = 0;
        for (int i = 0; i < dim(); ++i) {
            if (es.eigenvalues()[i] < 0)
                ++neg;
            else
                ++pos;
        }
        return {neg, pos};
    }

private:
    Mat g_;
    Mat ginv_;
    double det_ = 0.0;
};

// Inverse metric as a Metric in its own right (bilinear form on 1-forms).
inline Metric metric_inverse(const Metric& g) { return Metric(g.inverse()); }

// ---- raising and lowering the last slot ------------------------------------

// From vector-valued map V(x,y) to (0,3): R(x,y,z) = g(V(x,y), z).
inline Tensor3 lower_last(const Tensor3& v, const Metric& g) {
    const int d = v.dim();
    if (g.dim() != d) throw ShapeMismatch("lower_last: metric dimension");
    return Tensor3::from_fn(d, [&](int i, int j, int k) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += v(i, j, a) * g.matrix()(a, k);
        return s;
    });
}

// From (0,3) to vector-valued: V(x,y)^a = g^{ka} T(x,y,e_k).
inline Tensor3 raise_last(const Tensor3& t, const Metric& g) {
    const int d = t.dim();
    if (g.dim() != d) throw ShapeMismatch("raise_last: metric dimension");
    return Tensor3::from_fn(d, [&](int i, int j, int a) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += t(i, j, k) * g.inverse()(k, a);
        return s;
    });
}

// Apply M to the value slot of a vector-valued map: R(x,y) = M V(x,y).
inline Tensor3 map_value(const Tensor3& v, const Mat& m) {
    const int d = v.dim();
    return Tensor3::from_fn(d, [&](int i, int j, int a) {
        double s = 0.0;
        for (int b = 0; b < d; ++b) s += m(a, b) * v(i, j, b);
        return s;
    });
}

inline Covec raise_covec(const Covec& c, const Metric& g) { return g.inverse() * c; }

}  // namespace acbm
