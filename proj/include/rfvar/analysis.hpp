#pragma once

#include <cmath>
#include <cstddef>

#include "rfvar/core.hpp"

namespace rfvar {

/// Norms and distances feeding the per-iteration error bounds. e_k is the
/// accumulated difference between the residual histories of the exact and
/// filtered solvers; rho_tilde is the filtered solver's current residual.
struct ErrorBoundInputs {
    double norm_v = 0.0;         // ||V||_inf
    double norm_f = 0.0;         // ||F||_inf
    double norm_psi = 0.0;       // ||Psi||_inf
    double dist_fv = 0.0;        // ||F - V||_inf
    double norm_ek = 0.0;        // ||e_k||_inf
    double norm_rho_tilde = 0.0; // ||rho_tilde_k||_inf

    void validate() const {
        detail::require(norm_v >= 0.0 && norm_f >= 0.0 && norm_psi >= 0.0 && dist_fv >= 0.0 &&
                            norm_ek >= 0.0 && norm_rho_tilde >= 0.0,
                        "ErrorBoundInputs: all fields must be nonnegative");
    }
};

inline double operator_distance(const DenseOperator& a, const DenseOperator& b) {
    detail::require(a.dim() == b.dim(), "operator_distance: dimension mismatch");
    return inf_norm(a - b);
}

/// Central (m - 2t) x (m - 2t) submatrix; drops t rows and columns at each
/// border.
inline DenseOperator trim_operator(const DenseOperator& a, std::size_t t) {
    detail::require(2 * t < a.dim(), "trim_operator: trim width too large");
    const std::size_t n = a.dim() - 2 * t;
    DenseOperator out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = a(i + t, j + t);
    return out;
}

/// Per-iteration bound on ||q_k - q_tilde_k||: the forward-error term scaled
/// by (1 + ||V|| ||Psi|| ||V||) plus the filter-substitution term scaled by
/// ||F - V|| ||Psi|| (||V|| + ||F||).
inline double theorem_bound(const ErrorBoundInputs& in) {
    in.validate();
    return (1.0 + in.norm_v * in.norm_psi * in.norm_v) * in.norm_ek +
           in.dist_fv * in.norm_psi * (in.norm_v + in.norm_f) * in.norm_rho_tilde;
}

/// Specialization for the regime ||V|| <= 1 and ||F|| <= 1.
inline double specialized_bound(const ErrorBoundInputs& in) {
    in.validate();
    return (1.0 + in.norm_psi) * in.norm_ek +
           2.0 * in.dist_fv * in.norm_psi * in.norm_rho_tilde;
}

struct ConditionPair {
    double primal = 0.0;  // mu_inf(I + B Psi)
    double dual = 0.0;    // mu_inf(I + V Psi V)
};

inline double condition_number_inf(const DenseOperator& a) {
    return inf_norm(a) * inf_norm(invert(a));
}

/// Infinity-norm condition numbers of the primal system I + B Psi (with
/// B = V V) and the dual system I + V Psi V, both by explicit inversion.
inline ConditionPair condition_compare(const DenseOperator& v, const DiagonalOperator& psi) {
    detail::require(v.dim() == psi.dim(), "condition_compare: dimension mismatch");
    const std::size_t m = v.dim();
    const DenseOperator b = multiply(v, v);

    DenseOperator primal(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            primal(i, j) = (i == j ? 1.0 : 0.0) + b(i, j) * psi[j];

    DenseOperator dual(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double acc = (i == j) ? 1.0 : 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double p = psi[k];
                if (p != 0.0) acc += v(i, k) * p * v(k, j);
            }
            dual(i, j) = acc;
        }
    }

    return ConditionPair{condition_number_inf(primal), condition_number_inf(dual)};
}

}  // namespace rfvar
