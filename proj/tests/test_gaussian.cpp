#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "rfvar/gaussian.hpp"

using namespace rfvar;

TEST_CASE("gaussian_kernel reference values") {
    // Closed form at the origin: 1 / sqrt(2 pi).
    CHECK(gaussian_kernel(0.0, 1.0) == Catch::Approx(0.3989422804014327).epsilon(1e-15));
    CHECK(gaussian_kernel(0.0, 1.0) ==
          Catch::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));

    for (double x : {0.3, 1.0, 2.7, 11.0})
        for (double s : {0.5, 1.0, 20.0})
            CHECK(gaussian_kernel(x, s) == gaussian_kernel(-x, s));

    for (double s : {0.5, 1.0, 5.0})
        CHECK(gaussian_kernel(s, s) ==
              Catch::Approx(gaussian_kernel(0.0, s) * std::exp(-0.5)).epsilon(1e-14));

    CHECK_THROWS_AS(gaussian_kernel(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(gaussian_kernel(1.0, -2.0), std::domain_error);
}

TEST_CASE("build_v entries and symmetry") {
    const Grid1D grid = Grid1D::uniform(3, 1.0);
    const DenseOperator v = build_v(GaussianOperatorSpec{grid, 1.0});
    CHECK(v(0, 0) == Catch::Approx(0.3989422804014327).epsilon(1e-15));
    CHECK(v(0, 1) == Catch::Approx(0.24197072451914337).epsilon(1e-15));
    CHECK(v(0, 1) == v(1, 0));
    CHECK(v(1, 1) == gaussian_kernel(0.0, 1.0));

    // Homogeneous case: exact symmetry, diagonal dominance of the kernel peak.
    const Grid1D g2 = Grid1D::uniform(40, 7.0);
    const DenseOperator v2 = build_v(GaussianOperatorSpec{g2, {}});
    for (std::size_t i = 0; i < v2.dim(); ++i)
        for (std::size_t j = 0; j < v2.dim(); ++j) {
            CHECK(v2(i, j) == v2(j, i));
            CHECK(v2(i, j) > 0.0);
            CHECK(v2(i, j) <= gaussian_kernel(0.0, 7.0));
        }
}

TEST_CASE("build_v row-scale choice in the inhomogeneous case") {
    const Grid1D grid(3, {1.0, 1.0, 1.0}, {2.0, 5.0, 9.0});
    const DenseOperator v = build_v(GaussianOperatorSpec{grid, {}});
    CHECK(v(0, 2) == gaussian_kernel(2.0, 2.0));
    CHECK(v(2, 0) == gaussian_kernel(2.0, 9.0));
    CHECK(v(1, 0) == gaussian_kernel(1.0, 5.0));
}

TEST_CASE("convolve basics and impulse response") {
    const Grid1D grid = Grid1D::uniform(301, 20.0);
    const DenseOperator v = build_v(GaussianOperatorSpec{grid, {}});

    const Signal zero(301, 0.0);
    CHECK(convolve(v, zero) == zero);

    Signal impulse(301, 0.0);
    impulse[150] = 1.0;
    const Signal resp = convolve(v, impulse);
    for (std::size_t i = 0; i < resp.size(); ++i) CHECK(resp[i] == v(i, 150));
    CHECK(resp[150] == Catch::Approx(0.019947114020071634).epsilon(1e-12));
    CHECK(resp[150] == gaussian_kernel(0.0, 20.0));
}

TEST_CASE("quadrature matches the matvec by construction") {
    const Grid1D grid = Grid1D::uniform(252, 1.0);
    CHECK(quadrature_check([](double) { return 0.0; }, grid, 4.0) == 0.0);
    CHECK(quadrature_check([](double x) { return std::cos(x / 20.0); }, grid, 4.0) <= 1e-12);
    CHECK(quadrature_check([](double x) { return std::exp(-x / 100.0); }, grid, 7.0) <= 1e-12);

    const Grid1D nonuniform = Grid1D::uniform(10, 1.0, 2.0);
    CHECK_THROWS_AS(quadrature_check([](double) { return 1.0; }, nonuniform, 4.0),
                    std::invalid_argument);
}

TEST_CASE("V norm never exceeds the lattice-sum excess") {
    for (double sigma : {1.0, 2.0, 5.0, 20.0, 50.0}) {
        for (std::size_t m : {41u, 301u}) {
            const Grid1D grid = Grid1D::uniform(m, sigma);
            const DenseOperator v = build_v(GaussianOperatorSpec{grid, {}});
            CHECK(inf_norm(v) <= 1.000001);
        }
    }
}

TEST_CASE("interior rows of V are normalized") {
    const double sigma = 3.0;
    const std::size_t m = 101;
    const DenseOperator v = build_v(GaussianOperatorSpec{Grid1D::uniform(m, sigma), {}});
    const auto margin = static_cast<std::size_t>(6.0 * sigma);
    for (std::size_t i = margin; i + margin < m; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) sum += v(i, j);
        CHECK(std::abs(sum - 1.0) <= 1e-6);
    }
}
