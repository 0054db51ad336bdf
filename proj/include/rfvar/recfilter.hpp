#pragma once

#include <cmath>
#include <cstddef>
#include <variant>
#include <vector>

#include "rfvar/core.hpp"

namespace rfvar {

/// Order and iteration count of a recursive filter. Third order is defined
/// for a single iteration only; its published coefficients exist for K = 1.
struct FilterSpec {
    int order = 1;       // 1 or 3
    int iterations = 1;  // K >= 1
    bool use_q = false;  // third order: substitute q(sigma_i) for sigma_i

    void validate() const {
        detail::require(order == 1 || order == 3, "FilterSpec: order must be 1 or 3");
        detail::require(iterations >= 1, "FilterSpec: iterations must be >= 1");
        detail::require(order == 1 || iterations == 1,
                        "FilterSpec: third order supports a single iteration only");
    }
};

/// Per-point first-order smoothing coefficients. alpha + beta = 1 at every
/// point; e holds E_i = K / sigma_i^2.
struct FirstOrderCoeffs {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> e;

    std::size_t size() const noexcept { return alpha.size(); }
};

/// Per-point third-order smoothing coefficients; a holds the cubic a_i and
/// beta + alpha1 + alpha2 + alpha3 = 1 at every point.
struct ThirdOrderCoeffs {
    std::vector<double> alpha1;
    std::vector<double> alpha2;
    std::vector<double> alpha3;
    std::vector<double> beta;
    std::vector<double> a;

    std::size_t size() const noexcept { return beta.size(); }
};

using FilterCoefficients = std::variant<FirstOrderCoeffs, ThirdOrderCoeffs>;

inline std::size_t coeff_size(const FilterCoefficients& c) {
    return std::visit([](const auto& v) { return v.size(); }, c);
}

inline FirstOrderCoeffs first_order_coeffs(const Grid1D& grid, int iterations) {
    detail::require(iterations >= 1, "first_order_coeffs: iterations must be >= 1");
    const std::size_t m = grid.size();
    FirstOrderCoeffs c;
    c.alpha.resize(m);
    c.beta.resize(m);
    c.e.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sigma = grid.sigma(i);
        const double e = static_cast<double>(iterations) / (sigma * sigma);
        const double root = std::sqrt(e * (e + 2.0));
        c.e[i] = e;
        c.alpha[i] = 1.0 + e - root;
        c.beta[i] = root - e;
    }
    return c;
}

/// Scale substitution for the third-order filter; piecewise fit with
/// breakpoint sigma = 2.5.
inline double q_of_sigma(double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("q_of_sigma: sigma must be positive");
    if (sigma > 2.5) return 0.98711 * sigma - 0.96330;
    const double radicand = 1.0 - 0.26891 * sigma;
    if (radicand < 0.0) throw std::domain_error("q_of_sigma: negative radicand");
    return 3.97156 - 4.14554 * std::sqrt(radicand);
}

inline ThirdOrderCoeffs third_order_coeffs(const Grid1D& grid, bool use_q) {
    const std::size_t m = grid.size();
    ThirdOrderCoeffs c;
    c.alpha1.resize(m);
    c.alpha2.resize(m);
    c.alpha3.resize(m);
    c.beta.resize(m);
    c.a.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sigma = use_q ? q_of_sigma(grid.sigma(i)) : grid.sigma(i);
        detail::require(sigma > 0.0, "third_order_coeffs: effective sigma must be positive");
        const double s2 = sigma * sigma;
        const double s3 = s2 * sigma;
        const double a = 3.738128 + 5.788982 * sigma + 3.382473 * s2 + s3;
        c.a[i] = a;
        c.alpha1[i] = (5.788982 * sigma + 6.764946 * s2 + 3.0 * s3) / a;
        c.alpha2[i] = -(3.382473 * s2 + 3.0 * s3) / a;
        c.alpha3[i] = s3 / a;
        c.beta[i] = 3.738128 / a;
    }
    return c;
}

inline FilterCoefficients make_coefficients(const Grid1D& grid, const FilterSpec& spec) {
    spec.validate();
    if (spec.order == 1) return first_order_coeffs(grid, spec.iterations);
    return third_order_coeffs(grid, spec.use_q);
}

namespace detail {

// One forward advancing pass then one backward smoothing pass. Out-of-range
// lagged terms are dropped (zero exterior closure).
inline void sweep_first_order(Signal& s, Signal& p, const FirstOrderCoeffs& c) {
    const std::size_t m = s.size();
    p[0] = c.beta[0] * s[0];
    for (std::size_t i = 1; i < m; ++i) p[i] = c.beta[i] * s[i] + c.alpha[i] * p[i - 1];
    s[m - 1] = c.beta[m - 1] * p[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) s[i] = c.beta[i] * p[i] + c.alpha[i] * s[i + 1];
}

inline void sweep_third_order(Signal& s, Signal& p, const ThirdOrderCoeffs& c) {
    const std::size_t m = s.size();
    for (std::size_t i = 0; i < m; ++i) {
        double acc = c.beta[i] * s[i];
        if (i >= 1) acc += c.alpha1[i] * p[i - 1];
        if (i >= 2) acc += c.alpha2[i] * p[i - 2];
        if (i >= 3) acc += c.alpha3[i] * p[i - 3];
        p[i] = acc;
    }
    for (std::size_t ii = m; ii-- > 0;) {
        double acc = c.beta[ii] * p[ii];
        if (ii + 1 < m) acc += c.alpha1[ii] * s[ii + 1];
        if (ii + 2 < m) acc += c.alpha2[ii] * s[ii + 2];
        if (ii + 3 < m) acc += c.alpha3[ii] * s[ii + 3];
        s[ii] = acc;
    }
}

}  // namespace detail

/// K iterations of the first-order filter.
inline Signal apply_filter(const Signal& s0, const FirstOrderCoeffs& coeffs,
                           const FilterSpec& spec) {
    spec.validate();
    detail::require(spec.order == 1, "apply_filter: spec order does not match coefficients");
    detail::require(coeffs.size() == s0.size(), "apply_filter: coefficient/signal length mismatch");
    Signal s = s0;
    Signal p(s.size());
    for (int k = 0; k < spec.iterations; ++k) detail::sweep_first_order(s, p, coeffs);
    return s;
}

/// Single iteration of the third-order filter.
inline Signal apply_filter(const Signal& s0, const ThirdOrderCoeffs& coeffs,
                           const FilterSpec& spec) {
    spec.validate();
    detail::require(spec.order == 3, "apply_filter: spec order does not match coefficients");
    detail::require(coeffs.size() == s0.size(), "apply_filter: coefficient/signal length mismatch");
    Signal s = s0;
    Signal p(s.size());
    detail::sweep_third_order(s, p, coeffs);
    return s;
}

inline Signal apply_filter(const Signal& s0, const FilterCoefficients& coeffs,
                           const FilterSpec& spec) {
    return std::visit([&](const auto& c) { return apply_filter(s0, c, spec); }, coeffs);
}

/// Banded triangular factors of the filter inverse: (L U)^K s^K = s^0.
struct BandedFactors {
    DenseOperator lower;
    DenseOperator upper;
};

inline BandedFactors build_lu(const FilterCoefficients& coeffs, const FilterSpec& spec,
                              std::size_t m) {
    spec.validate();
    detail::require(coeff_size(coeffs) == m, "build_lu: coefficient length mismatch");
    BandedFactors f{DenseOperator(m), DenseOperator(m)};
    auto fill = [&](std::size_t i, double beta, const double* alphas, std::size_t order) {
        const double inv_beta = 1.0 / beta;
        f.lower(i, i) = inv_beta;
        f.upper(i, i) = inv_beta;
        for (std::size_t j = 1; j <= order; ++j) {
            if (i >= j) f.lower(i, i - j) = -alphas[j - 1] * inv_beta;
            if (i + j < m) f.upper(i, i + j) = -alphas[j - 1] * inv_beta;
        }
    };
    if (const auto* c1 = std::get_if<FirstOrderCoeffs>(&coeffs)) {
        for (std::size_t i = 0; i < m; ++i) fill(i, c1->beta[i], &c1->alpha[i], 1);
    } else {
        const auto& c3 = std::get<ThirdOrderCoeffs>(coeffs);
        for (std::size_t i = 0; i < m; ++i) {
            const double alphas[3] = {c3.alpha1[i], c3.alpha2[i], c3.alpha3[i]};
            fill(i, c3.beta[i], alphas, 3);
        }
    }
    return f;
}

/// Dense materialization of the filter operator, column by column from unit
/// basis vectors. Exercises the sweep path; the banded-LU route stays
/// available as an independent check.
inline DenseOperator materialize_f(const FilterCoefficients& coeffs, const FilterSpec& spec,
                                   std::size_t m) {
    spec.validate();
    detail::require(coeff_size(coeffs) == m, "materialize_f: coefficient length mismatch");
    DenseOperator f(m);
    Signal e(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        e[j] = 1.0;
        const Signal col = apply_filter(e, coeffs, spec);
        e[j] = 0.0;
        for (std::size_t i = 0; i < m; ++i) f(i, j) = col[i];
    }
    return f;
}

/// Rectangular field stored row major.
struct Field2D {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Field2D() = default;
    Field2D(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Separable 2-D smoothing: the 1-D filter along every row, then along every
/// column. coeffs_x must match the row length, coeffs_y the column length.
inline Field2D apply_separable_2d(const Field2D& field, const FilterCoefficients& coeffs_x,
                                  const FilterCoefficients& coeffs_y, const FilterSpec& spec) {
    spec.validate();
    detail::require(field.rows >= 1 && field.cols >= 1, "apply_separable_2d: empty field");
    detail::require(coeff_size(coeffs_x) == field.cols,
                    "apply_separable_2d: x coefficients must match row length");
    detail::require(coeff_size(coeffs_y) == field.rows,
                    "apply_separable_2d: y coefficients must match column length");

    Field2D out = field;
    Signal line(field.cols);
    for (std::size_t r = 0; r < field.rows; ++r) {
        for (std::size_t c = 0; c < field.cols; ++c) line[c] = out.at(r, c);
        const Signal filtered = apply_filter(line, coeffs_x, spec);
        for (std::size_t c = 0; c < field.cols; ++c) out.at(r, c) = filtered[c];
    }
    Signal column(field.rows);
    for (std::size_t c = 0; c < field.cols; ++c) {
        for (std::size_t r = 0; r < field.rows; ++r) column[r] = out.at(r, c);
        const Signal filtered = apply_filter(column, coeffs_y, spec);
        for (std::size_t r = 0; r < field.rows; ++r) out.at(r, c) = filtered[r];
    }
    return out;
}

}  // namespace rfvar
