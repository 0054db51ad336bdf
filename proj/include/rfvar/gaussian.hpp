#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

#include "rfvar/core.hpp"

namespace rfvar {

/// Normalized Gaussian g(x) = exp(-x^2 / (2 sigma^2)) / (sigma sqrt(2 pi)).
inline double gaussian_kernel(double x, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("gaussian_kernel: sigma must be positive");
    const double z = x / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// Recipe for the discrete Gaussian convolution operator V. Entry (i, j) is
/// g(i - j) evaluated with the row point's scale sigma_i; indices enter with
/// unit spacing, general spacing acts only through sigma_i = R_i / dx_i.
struct GaussianOperatorSpec {
    Grid1D grid;
    std::optional<double> homogeneous_sigma;  // overrides sigma_i at every point

    double sigma_at(std::size_t i) const {
        return homogeneous_sigma ? *homogeneous_sigma : grid.sigma(i);
    }
};

inline DenseOperator build_v(const GaussianOperatorSpec& spec) {
    if (spec.homogeneous_sigma)
        detail::require(*spec.homogeneous_sigma > 0.0, "build_v: sigma must be positive");
    const std::size_t m = spec.grid.size();
    DenseOperator v(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sigma = spec.sigma_at(i);
        double* r = v.row(i);
        for (std::size_t j = 0; j < m; ++j)
            r[j] = gaussian_kernel(static_cast<double>(i) - static_cast<double>(j), sigma);
    }
    return v;
}

inline DenseOperator build_v(const Grid1D& grid, double homogeneous_sigma) {
    return build_v(GaussianOperatorSpec{grid, homogeneous_sigma});
}

/// Discrete Gaussian convolution s = V s0; identical to the matrix-vector
/// product by definition.
inline Signal convolve(const DenseOperator& v, const Signal& s0) { return mat_vec(v, s0); }

/// Rectangle-rule discretization check: on a uniform unit-spacing grid the
/// quadrature of the continuous convolution integral against g collapses to
/// the rows of V s0. Returns the maximum pointwise discrepancy, which should
/// sit at machine precision; the quadrature side is accumulated separately
/// (long double, reversed order) so the two paths are not the same sum.
inline double quadrature_check(const std::function<double(double)>& s0_function,
                               const Grid1D& grid, double sigma) {
    const std::size_t m = grid.size();
    for (std::size_t i = 0; i < m; ++i)
        if (grid.dx(i) != 1.0)
            throw std::invalid_argument("quadrature_check: only uniform unit-spacing grids");

    Signal samples(m);
    for (std::size_t i = 0; i < m; ++i) samples[i] = s0_function(static_cast<double>(i));

    const DenseOperator v = build_v(GaussianOperatorSpec{grid, sigma});
    const Signal via_matvec = mat_vec(v, samples);

    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        long double acc = 0.0L;
        for (std::size_t j = m; j-- > 0;) {
            const double x = static_cast<double>(i) - static_cast<double>(j);
            acc += static_cast<long double>(gaussian_kernel(x, sigma)) * samples[j];
        }
        worst = std::max(worst, std::abs(static_cast<double>(acc) - via_matvec[i]));
    }
    return worst;
}

}  // namespace rfvar
