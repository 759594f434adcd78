#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "acbm/multilinear.hpp"

using namespace acbm;

namespace {

Tensor3 random_tensor(int d, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    return Tensor3::from_fn(d, [&](int, int, int) { return nd(rng); });
}

Mat random_matrix(int d, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = nd(rng);
    return m;
}

double max_diff(const Tensor3& a, const Tensor3& b) { return (a - b).max_abs(); }

}  // namespace

TEST_CASE("tensor storage round-trips through the generating function") {
    Tensor3 t = Tensor3::from_fn(3, [](int i, int j, int k) { return 100.0 * i + 10 * j + k; });
    REQUIRE(t.dim() == 3);
    REQUIRE(t(0, 0, 0) == 0.0);
    REQUIRE(t(2, 1, 0) == 210.0);
    REQUIRE(t(1, 2, 2) == 122.0);
    REQUIRE(t.max_abs() == 222.0);

    Tensor3 zero(3);
    REQUIRE(zero.max_abs() == 0.0);
    REQUIRE(max_diff(t + zero, t) == 0.0);
}

TEST_CASE("bracket operators match their index definitions") {
    const int d = 4;
    Tensor3 a = random_tensor(d, 11);

    Tensor3 anti = antisym_first_pair(a);
    Tensor3 sym = sym_last_pair(a);
    Tensor3 cyc = cyclic_sum(a);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                REQUIRE(anti(i, j, k) == a(i, j, k) - a(j, i, k));
                REQUIRE(sym(i, j, k) == a(i, j, k) + a(i, k, j));
                REQUIRE(cyc(i, j, k) == a(i, j, k) + a(j, k, i) + a(k, i, j));
            }

    // Symmetrizing an antisymmetrization in the same slots annihilates it.
    Tensor3 dead = antisym_last_pair(sym_last_pair(a));
    REQUIRE(dead.max_abs() == 0.0);
}

TEST_CASE("slot composition agrees with a naive contraction loop") {
    const int d = 4;
    Tensor3 a = random_tensor(d, 21);
    Mat m = random_matrix(d, 22);

    Tensor3 c1 = compose1(a, m), c2 = compose2(a, m), c3 = compose3(a, m);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double s1 = 0, s2 = 0, s3 = 0;
                for (int p = 0; p < d; ++p) {
                    s1 += m(p, i) * a(p, j, k);
                    s2 += m(p, j) * a(i, p, k);
                    s3 += m(p, k) * a(i, j, p);
                }
                REQUIRE_THAT(c1(i, j, k), Catch::Matchers::WithinAbs(s1, 1e-13));
                REQUIRE_THAT(c2(i, j, k), Catch::Matchers::WithinAbs(s2, 1e-13));
                REQUIRE_THAT(c3(i, j, k), Catch::Matchers::WithinAbs(s3, 1e-13));
            }

    REQUIRE(max_diff(compose23(a, m), compose2(compose3(a, m), m)) < 1e-13);
    REQUIRE(max_diff(compose_all(a, m), compose1(compose23(a, m), m)) < 1e-13);
}

TEST_CASE("permuted reads its source at the permuted index") {
    const int d = 3;
    Tensor3 a = random_tensor(d, 31);
    // R(i,j,k) = A(j,k,i)
    Tensor3 r = permuted(a, 1, 2, 0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) REQUIRE(r(i, j, k) == a(j, k, i));

    // Applying the inverse permutation restores the original.
    REQUIRE(max_diff(permuted(r, 2, 0, 1), a) == 0.0);
}

TEST_CASE("contractions against a vector pick out the right slot") {
    const int d = 4;
    Tensor3 a = random_tensor(d, 41);
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = 0.5 * i - 1.0;

    Mat c1 = contract1(a, v), c2 = contract2(a, v), c3 = contract3(a, v);
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) {
            double s1 = 0, s2 = 0, s3 = 0;
            for (int m = 0; m < d; ++m) {
                s1 += v[m] * a(m, p, q);
                s2 += v[m] * a(p, m, q);
                s3 += v[m] * a(p, q, m);
            }
            REQUIRE_THAT(c1(p, q), Catch::Matchers::WithinAbs(s1, 1e-13));
            REQUIRE_THAT(c2(p, q), Catch::Matchers::WithinAbs(s2, 1e-13));
            REQUIRE_THAT(c3(p, q), Catch::Matchers::WithinAbs(s3, 1e-13));
        }

    double full = eval(a, v, v, v);
    double byhand = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) byhand += a(i, j, k) * v[i] * v[j] * v[k];
    REQUIRE_THAT(full, Catch::Matchers::WithinRel(byhand, 1e-12));
}

TEST_CASE("outer products place the covector on the named slot") {
    const int d = 3;
    Covec c(d);
    c << 1.0, -2.0, 0.5;
    Mat b = random_matrix(d, 51);
    REQUIRE(outer1(c, b)(2, 0, 1) == c[2] * b(0, 1));
    REQUIRE(outer2(c, b)(0, 2, 1) == c[2] * b(0, 1));
    REQUIRE(outer3(c, b)(0, 1, 2) == c[2] * b(0, 1));
}

TEST_CASE("metric wrapper inverts, measures and refuses degeneracy") {
    Mat g(2, 2);
    g << 2, 1, 1, 1;
    Metric m(g);
    REQUIRE_THAT(m.det(), Catch::Matchers::WithinAbs(1.0, 1e-14));
    REQUIRE((m.inverse() * g - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

    Vec x(2), y(2);
    x << 1, 0;
    y << 0, 1;
    REQUIRE(m(x, y) == 1.0);

    Mat flat(2, 2);
    flat << 1, 1, 1, 1;
    REQUIRE_THROWS_AS(Metric(flat), DegenerateMetric);

    Mat mixed = Mat::Zero(3, 3);
    mixed.diagonal() << 1, -1, 1;
    auto [neg, pos] = Metric(mixed).signature();
    REQUIRE(neg == 1);
    REQUIRE(pos == 2);
}

TEST_CASE("raising and lowering the value slot are inverse to each other") {
    const int d = 3;
    Mat g(d, d);
    g.setZero();
    g.diagonal() << 1, -1, 1;
    g(0, 1) = g(1, 0) = 0.25;
    Metric metric(g);

    Tensor3 t = random_tensor(d, 61);
    Tensor3 back = lower_last(raise_last(t, metric), metric);
    REQUIRE(max_diff(back, t) < 1e-13);

    Covec c(d);
    c << 0.3, -1.1, 2.0;
    Vec up = raise_covec(c, metric);
    for (int i = 0; i < d; ++i)
        REQUIRE_THAT(c[i], Catch::Matchers::WithinAbs((g * up)[i], 1e-13));
}

TEST_CASE("norm_scale never reports below one") {
    REQUIRE(norm_scale(0.0) == 1.0);
    REQUIRE(norm_scale(0.5, 0.25) == 1.0);
    REQUIRE(norm_scale(3.0, 7.0, 2.0) == 7.0);
}
