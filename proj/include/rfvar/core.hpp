#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rfvar {

/// Vector of nodal values on a Grid1D. Plain std::vector; length must match
/// the dimension of whatever operator it meets.
using Signal = std::vector<double>;

/// Thrown when a pivot falls below the singularity threshold of a direct
/// solve or inversion.
class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when an iterative solve produces non-finite quantities.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace detail

/// One-dimensional evaluation grid with per-point spacing dx_i and
/// correlation radius R_i. The smoothing scale in grid units is
/// sigma_i = R_i / dx_i.
class Grid1D {
public:
    Grid1D(std::size_t m, std::vector<double> dx, std::vector<double> radius)
        : m_(m), dx_(std::move(dx)), radius_(std::move(radius)) {
        detail::require(m_ >= 2, "Grid1D: need at least two points");
        detail::require(dx_.size() == m_ && radius_.size() == m_,
                        "Grid1D: dx/radius length must equal point count");
        for (std::size_t i = 0; i < m_; ++i) {
            detail::require(std::isfinite(dx_[i]) && dx_[i] > 0.0, "Grid1D: dx must be positive");
            detail::require(std::isfinite(radius_[i]) && radius_[i] > 0.0,
                            "Grid1D: radius must be positive");
            const double s = radius_[i] / dx_[i];
            detail::require(std::isfinite(s) && s > 0.0, "Grid1D: sigma must be finite and positive");
        }
    }

    /// Constant radius and spacing at every point.
    static Grid1D uniform(std::size_t m, double radius, double dx = 1.0) {
        return Grid1D(m, std::vector<double>(m, dx), std::vector<double>(m, radius));
    }

    std::size_t size() const noexcept { return m_; }
    double dx(std::size_t i) const { return dx_[i]; }
    double radius(std::size_t i) const { return radius_[i]; }
    double sigma(std::size_t i) const { return radius_[i] / dx_[i]; }

    bool is_uniform() const {
        for (std::size_t i = 1; i < m_; ++i)
            if (dx_[i] != dx_[0] || radius_[i] != radius_[0]) return false;
        return true;
    }

private:
    std::size_t m_;
    std::vector<double> dx_;
    std::vector<double> radius_;
};

/// Square dense matrix, row major. The unit of all operator-level analysis.
class DenseOperator {
public:
    explicit DenseOperator(std::size_t m) : m_(m), a_(m * m, 0.0) {
        detail::require(m_ >= 1, "DenseOperator: dimension must be positive");
    }

    static DenseOperator identity(std::size_t m) {
        DenseOperator out(m);
        for (std::size_t i = 0; i < m; ++i) out(i, i) = 1.0;
        return out;
    }

    std::size_t dim() const noexcept { return m_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * m_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * m_ + j]; }

    const double* row(std::size_t i) const { return a_.data() + i * m_; }
    double* row(std::size_t i) { return a_.data() + i * m_; }

    double max_abs() const {
        double v = 0.0;
        for (double x : a_) v = std::max(v, std::abs(x));
        return v;
    }

private:
    std::size_t m_;
    std::vector<double> a_;
};

/// Diagonal operator with nonnegative entries.
class DiagonalOperator {
public:
    explicit DiagonalOperator(std::vector<double> diag) : d_(std::move(diag)) {
        detail::require(!d_.empty(), "DiagonalOperator: empty diagonal");
        for (double v : d_)
            detail::require(std::isfinite(v) && v >= 0.0,
                            "DiagonalOperator: entries must be nonnegative");
    }

    static DiagonalOperator zero(std::size_t m) {
        return DiagonalOperator(std::vector<double>(m, 0.0));
    }

    std::size_t dim() const noexcept { return d_.size(); }
    double operator[](std::size_t i) const { return d_[i]; }
    const std::vector<double>& diag() const noexcept { return d_; }

    /// Largest diagonal entry; equals the infinity norm of the operator.
    double inf_norm() const { return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end()); }

    Signal apply(const Signal& s) const {
        detail::require(s.size() == d_.size(), "DiagonalOperator: dimension mismatch");
        Signal out(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = d_[i] * s[i];
        return out;
    }

private:
    std::vector<double> d_;
};

/// Maximum absolute row sum.
inline double inf_norm(const DenseOperator& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double* r = a.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) s += std::abs(r[j]);
        best = std::max(best, s);
    }
    return best;
}

inline double inf_norm(const Signal& v) {
    double best = 0.0;
    for (double x : v) best = std::max(best, std::abs(x));
    return best;
}

inline double dot(const Signal& a, const Signal& b) {
    detail::require(a.size() == b.size(), "dot: dimension mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(const Signal& a) { return std::sqrt(dot(a, a)); }

inline Signal mat_vec(const DenseOperator& a, const Signal& s) {
    detail::require(s.size() == a.dim(), "mat_vec: dimension mismatch");
    Signal out(a.dim(), 0.0);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double* r = a.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) acc += r[j] * s[j];
        out[i] = acc;
    }
    return out;
}

inline DenseOperator multiply(const DenseOperator& a, const DenseOperator& b) {
    detail::require(a.dim() == b.dim(), "multiply: dimension mismatch");
    const std::size_t m = a.dim();
    DenseOperator out(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            double* oi = out.row(i);
            for (std::size_t j = 0; j < m; ++j) oi[j] += aik * bk[j];
        }
    }
    return out;
}

inline DenseOperator operator-(const DenseOperator& a, const DenseOperator& b) {
    detail::require(a.dim() == b.dim(), "operator-: dimension mismatch");
    DenseOperator out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) out(i, j) = a(i, j) - b(i, j);
    return out;
}

/// LU factorization with partial pivoting. Factors once, solves many;
/// the relative pivot threshold is fixed at 1e-14 of the largest entry.
class LuDecomposition {
public:
    explicit LuDecomposition(const DenseOperator& a)
        : m_(a.dim()), lu_(a), perm_(a.dim()) {
        const double threshold = 1e-14 * a.max_abs();
        for (std::size_t i = 0; i < m_; ++i) perm_[i] = i;
        for (std::size_t k = 0; k < m_; ++k) {
            std::size_t piv = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < m_; ++i) {
                const double v = std::abs(lu_(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (!(best > threshold))
                throw SingularMatrixError("LuDecomposition: pivot below singularity threshold");
            if (piv != k) {
                for (std::size_t j = 0; j < m_; ++j) std::swap(lu_(k, j), lu_(piv, j));
                std::swap(perm_[k], perm_[piv]);
            }
            const double inv_piv = 1.0 / lu_(k, k);
            for (std::size_t i = k + 1; i < m_; ++i) {
                const double f = lu_(i, k) * inv_piv;
                lu_(i, k) = f;
                if (f == 0.0) continue;
                for (std::size_t j = k + 1; j < m_; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    Signal solve(const Signal& b) const {
        detail::require(b.size() == m_, "LuDecomposition::solve: dimension mismatch");
        Signal x(m_);
        for (std::size_t i = 0; i < m_; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 1; i < m_; ++i) {
            double acc = x[i];
            for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
            x[i] = acc;
        }
        for (std::size_t ii = m_; ii-- > 0;) {
            double acc = x[ii];
            for (std::size_t j = ii + 1; j < m_; ++j) acc -= lu_(ii, j) * x[j];
            x[ii] = acc / lu_(ii, ii);
        }
        return x;
    }

private:
    std::size_t m_;
    DenseOperator lu_;
    std::vector<std::size_t> perm_;
};

/// Direct solve of A x = b. Throws SingularMatrixError when a pivot falls
/// below 1e-14 of the largest entry of A.
inline Signal dense_solve(const DenseOperator& a, const Signal& b) {
    return LuDecomposition(a).solve(b);
}

inline DenseOperator invert(const DenseOperator& a) {
    const std::size_t m = a.dim();
    LuDecomposition lu(a);
    DenseOperator out(m);
    Signal e(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        e[j] = 1.0;
        Signal col = lu.solve(e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < m; ++i) out(i, j) = col[i];
    }
    return out;
}

}  // namespace rfvar
