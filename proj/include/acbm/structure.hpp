#pragma once

#include <random>
#include <string>
#include <vector>

#include "acbm/multilinear.hpp"

namespace acbm {

// Almost contact structure with B-metric on one (2n+1)-dimensional space:
// endomorphism phi, Reeb vector xi, 1-form eta, metric g of signature (n, n+1).
// Immutable by convention; operations return new values.
struct Structure {
    int n = 0;
    int d = 0;  // 2n + 1
    Mat phi;
    Vec xi;
    Covec eta;
    Metric g;

    Mat phi2() const { return phi * phi; }
    // Projection onto the phi-invariant horizontal distribution: Id - eta (x) xi.
    Mat hproj() const { return Mat::Identity(d, d) - xi * eta.transpose(); }
};

struct ResidualEntry {
    std::string name;
    double value;
};

struct ValidationReport {
    std::vector<ResidualEntry> entries;
    double tolerance = kDefaultTol;
    bool pass = false;

    double max_residual() const {
        double m = 0.0;
        for (const auto& e : entries) m = std::max(m, e.value);
        return m;
    }
};

// Residuals of the defining axioms:
//   phi xi = 0,  phi^2 = -Id + eta (x) xi,  eta o phi = 0,  eta(xi) = 1,
//   g(phi x, phi y) = -g(x,y) + eta(x) eta(y),  signature (n, n+1).
// Each residual is max-abs, normalized by the magnitude of its operands.
inline ValidationReport validate_structure(const Structure& s, double tol = kDefaultTol) {
    if (s.d != 2 * s.n + 1 || s.phi.rows() != s.d || s.phi.cols() != s.d ||
        s.xi.size() != s.d || s.eta.size() != s.d || s.g.dim() != s.d)
        throw ShapeMismatch("validate_structure: field dimensions disagree");

    const Mat& G = s.g.matrix();
    const double phi_scale = s.phi.cwiseAbs().maxCoeff();
    const double g_scale = G.cwiseAbs().maxCoeff();

    ValidationReport r;
    r.tolerance = tol;
    r.entries.push_back({"phi_xi", (s.phi * s.xi).cwiseAbs().maxCoeff() /
                                       norm_scale(phi_scale * s.xi.cwiseAbs().maxCoeff())});
    r.entries.push_back(
        {"phi_squared",
         (s.phi2() + Mat::Identity(s.d, s.d) - s.xi * s.eta.transpose()).cwiseAbs().maxCoeff() /
             norm_scale(phi_scale * phi_scale)});
    r.entries.push_back({"eta_phi", (s.phi.transpose() * s.eta).cwiseAbs().maxCoeff() /
                                        norm_scale(phi_scale * s.eta.cwiseAbs().maxCoeff())});
    r.entries.push_back({"eta_xi", std::abs(s.eta.dot(s.xi) - 1.0)});
    r.entries.push_back(
        {"g_phi_phi",
         (s.phi.transpose() * G * s.phi + G - s.eta * s.eta.transpose()).cwiseAbs().maxCoeff() /
             norm_scale(g_scale * phi_scale * phi_scale)});

    auto [neg, pos] = s.g.signature();
    r.entries.push_back({"signature", (neg == s.n && pos == s.n + 1) ? 0.0 : 1.0});

    r.pass = r.max_residual() < tol;
    return r;
}

// Standard model: phi maps e_i -> e_{n+i}, e_{n+i} -> -e_i, kills xi = e_{2n};
// g = diag(+1 x n, -1 x n, +1), eta dual to xi.
inline Structure canonical_structure(int n) {
    if (n < 1) throw ShapeMismatch("canonical_structure: n must be >= 1");
    const int d = 2 * n + 1;
    Mat phi = Mat::Zero(d, d);
    for (int i = 0; i < n; ++i) {
        phi(n + i, i) = 1.0;
        phi(i, n + i) = -1.0;
    }
    Vec xi = Vec::Zero(d);
    xi[d - 1] = 1.0;
    Covec eta = Covec::Zero(d);
    eta[d - 1] = 1.0;
    Vec diag(d);
    for (int i = 0; i < n; ++i) diag[i] = 1.0;
    for (int i = n; i < 2 * n; ++i) diag[i] = -1.0;
    diag[d - 1] = 1.0;
    return Structure{n, d, phi, xi, eta, Metric(diag.asDiagonal())};
}

// Random invertible basis change with singular values in [0.5, 2.5],
// so the condition number stays below 5.
inline Mat random_basis_change(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = nd(rng);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vec sv(d);
    std::uniform_real_distribution<double> ud(0.5, 2.5);
    for (int i = 0; i < d; ++i) sv[i] = ud(rng);
    return svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
}

// Conjugate of the canonical structure by a well-conditioned change of basis P:
// vectors push forward by P, 1-forms by P^-T, the metric by P^-T g P^-1.
inline Structure random_structure(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    Structure c = canonical_structure(n);
    const Mat p = random_basis_change(c.d, rng);
    const Mat pinv = p.inverse();
    return Structure{n,
                     c.d,
                     p * c.phi * pinv,
                     p * c.xi,
                     pinv.transpose() * c.eta,
                     Metric(pinv.transpose() * c.g.matrix() * pinv)};
}

// Associated B-metric gt(x,y) = g(x, phi y) + eta(x) eta(y); throws
// DegenerateMetric if the result is singular (it never is for a valid input).
inline Metric associated_metric(const Structure& s) {
    return Metric(s.g.matrix() * s.phi + s.eta * s.eta.transpose());
}

}  // namespace acbm
