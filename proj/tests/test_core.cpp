#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rfvar/core.hpp"

using namespace rfvar;

namespace {

DenseOperator random_matrix(std::mt19937& rng, std::size_t m, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    DenseOperator a(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = u(rng);
    return a;
}

// Random symmetric diagonally dominant matrix; comfortably well conditioned.
DenseOperator random_spd(std::mt19937& rng, std::size_t m) {
    DenseOperator a = random_matrix(rng, m);
    DenseOperator s(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    for (std::size_t i = 0; i < m; ++i) s(i, i) += static_cast<double>(m);
    return s;
}

Signal random_signal(std::mt19937& rng, std::size_t m) {
    std::normal_distribution<double> g(0.0, 1.0);
    Signal s(m);
    for (double& x : s) x = g(rng);
    return s;
}

}  // namespace

TEST_CASE("Grid1D validates its invariants") {
    CHECK_NOTHROW(Grid1D::uniform(2, 1.0));
    CHECK_THROWS_AS(Grid1D::uniform(1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D::uniform(4, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D::uniform(4, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D(3, {1.0, 1.0}, {1.0, 1.0, 1.0}), std::invalid_argument);

    const Grid1D g(3, {1.0, 2.0, 4.0}, {10.0, 10.0, 10.0});
    CHECK(g.sigma(0) == 10.0);
    CHECK(g.sigma(1) == 5.0);
    CHECK(g.sigma(2) == 2.5);
    CHECK_FALSE(g.is_uniform());
    CHECK(Grid1D::uniform(5, 3.0).is_uniform());
}

TEST_CASE("inf_norm on reference matrices") {
    CHECK(inf_norm(DenseOperator::identity(7)) == 1.0);
    CHECK(inf_norm(DenseOperator(5)) == 0.0);

    DenseOperator a(2);
    a(0, 0) = 1.0; a(0, 1) = -2.0;
    a(1, 0) = 3.0; a(1, 1) = 4.0;
    CHECK(inf_norm(a) == 7.0);
}

TEST_CASE("mat_vec basics") {
    std::mt19937 rng(11);
    const Signal s = random_signal(rng, 6);
    CHECK(mat_vec(DenseOperator::identity(6), s) == s);

    const Signal zero(6, 0.0);
    CHECK(mat_vec(random_matrix(rng, 6), zero) == zero);

    DenseOperator d(2);
    d(0, 0) = 2.0; d(1, 1) = 3.0;
    const Signal r = mat_vec(d, {1.0, 1.0});
    CHECK(r[0] == 2.0);
    CHECK(r[1] == 3.0);

    CHECK_THROWS_AS(mat_vec(d, Signal(3, 0.0)), std::invalid_argument);
}

TEST_CASE("dense_solve on reference systems") {
    std::mt19937 rng(22);
    const Signal b = random_signal(rng, 5);
    CHECK(dense_solve(DenseOperator::identity(5), b) == b);

    DenseOperator d(3);
    d(0, 0) = 1.0; d(1, 1) = 2.0; d(2, 2) = 4.0;
    const Signal x = dense_solve(d, {1.0, 1.0, 1.0});
    CHECK(x[0] == Catch::Approx(1.0).margin(1e-14));
    CHECK(x[1] == Catch::Approx(0.5).margin(1e-14));
    CHECK(x[2] == Catch::Approx(0.25).margin(1e-14));
}

TEST_CASE("dense_solve residual on a random SPD system") {
    std::mt19937 rng(33);
    const DenseOperator a = random_spd(rng, 10);
    const Signal b = random_signal(rng, 10);
    const Signal x = dense_solve(a, b);
    const Signal ax = mat_vec(a, x);
    double err = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) err = std::max(err, std::abs(ax[i] - b[i]));
    CHECK(err / inf_norm(b) <= 1e-10);
}

TEST_CASE("dense_solve reports singular matrices") {
    DenseOperator a(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) a(i, j) = static_cast<double>(i + 1);  // rank one
    CHECK_THROWS_AS(dense_solve(a, Signal(3, 1.0)), SingularMatrixError);
    CHECK_THROWS_AS(invert(a), SingularMatrixError);
    CHECK_THROWS_AS(dense_solve(DenseOperator(2), Signal(2, 1.0)), SingularMatrixError);
}

TEST_CASE("inf_norm is submultiplicative on random products") {
    std::mt19937 rng(44);
    for (int trial = 0; trial < 25; ++trial) {
        const DenseOperator a = random_matrix(rng, 8);
        const DenseOperator b = random_matrix(rng, 8);
        CHECK(inf_norm(multiply(a, b)) <= inf_norm(a) * inf_norm(b) * (1.0 + 1e-12));
    }
}

TEST_CASE("dense_solve then mat_vec round-trips the right-hand side") {
    std::mt19937 rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const DenseOperator a = random_spd(rng, 20);
        const Signal b = random_signal(rng, 20);
        const Signal ax = mat_vec(a, dense_solve(a, b));
        double err = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) err = std::max(err, std::abs(ax[i] - b[i]));
        CHECK(err <= 1e-10 * inf_norm(b));
    }
}

TEST_CASE("invert agrees with solve columns") {
    std::mt19937 rng(66);
    const DenseOperator a = random_spd(rng, 12);
    const DenseOperator inv = invert(a);
    const DenseOperator prod = multiply(a, inv);
    const DenseOperator eye = DenseOperator::identity(12);
    CHECK(inf_norm(prod - eye) <= 1e-10);
}

TEST_CASE("DiagonalOperator validates and applies") {
    CHECK_THROWS_AS(DiagonalOperator({1.0, -0.5}), std::invalid_argument);
    const DiagonalOperator d({2.0, 0.0, 1.0});
    CHECK(d.inf_norm() == 2.0);
    const Signal out = d.apply({1.0, 5.0, 3.0});
    CHECK(out == Signal{2.0, 0.0, 3.0});
    CHECK_THROWS_AS(d.apply(Signal(2, 1.0)), std::invalid_argument);
}
