#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "rfvar/analysis.hpp"
#include "rfvar/core.hpp"
#include "rfvar/gaussian.hpp"
#include "rfvar/recfilter.hpp"

namespace rfvar {

/// Point-selection observation operator: H picks the state at the stored
/// indices, H^T scatters observation-space values back onto the grid.
struct ObsOperator {
    std::vector<std::size_t> indices;  // strictly increasing, 0-based

    std::size_t count() const noexcept { return indices.size(); }

    void validate(std::size_t m) const {
        for (std::size_t k = 0; k < indices.size(); ++k) {
            detail::require(indices[k] < m, "ObsOperator: index out of range");
            detail::require(k == 0 || indices[k] > indices[k - 1],
                            "ObsOperator: indices must be strictly increasing");
        }
    }

    std::vector<double> select(const Signal& x) const {
        std::vector<double> y(indices.size());
        for (std::size_t k = 0; k < indices.size(); ++k) y[k] = x[indices[k]];
        return y;
    }

    Signal adjoint(const std::vector<double>& y, std::size_t m) const {
        detail::require(y.size() == indices.size(), "ObsOperator: observation count mismatch");
        Signal x(m, 0.0);
        for (std::size_t k = 0; k < indices.size(); ++k) x[indices[k]] = y[k];
        return x;
    }
};

enum class BackendKind { Exact, Rf1, Rf3 };

/// Convolution backend: the exact operator V, or a recursive-filter
/// substitute (first order with K iterations, or third order).
struct Backend {
    BackendKind kind = BackendKind::Exact;
    int iterations = 1;   // Rf1 only
    bool use_q = false;   // Rf3 only

    FilterSpec filter_spec() const {
        return kind == BackendKind::Rf1 ? FilterSpec{1, iterations, false}
                                        : FilterSpec{3, 1, use_q};
    }
};

/// One assimilation instance. Psi = H^T R^-1 H is diagonal because H is a
/// point selection and R is diagonal; B = sigma_b^2 V V with V built from
/// the grid's correlation scales.
struct VarProblem {
    Grid1D grid;
    ObsOperator obs;
    std::vector<double> r_diag;  // observation-error variances
    Backend backend;
    std::vector<double> misfit;  // d = y - H(x_b)
    double sigma_b = 1.0;

    void validate() const {
        obs.validate(grid.size());
        detail::require(r_diag.size() == obs.count(), "VarProblem: r_diag size mismatch");
        detail::require(misfit.size() == obs.count(), "VarProblem: misfit size mismatch");
        for (double r : r_diag)
            detail::require(std::isfinite(r) && r > 0.0, "VarProblem: variances must be positive");
        detail::require(std::isfinite(sigma_b) && sigma_b > 0.0,
                        "VarProblem: sigma_b must be positive");
    }
};

struct CgReport {
    Signal solution;
    std::vector<double> residual_norms;  // ||r_k|| / ||b|| for k = 0, 1, ...
    std::size_t iterations = 0;
    bool converged = false;
};

inline DiagonalOperator assemble_psi(const VarProblem& prob) {
    prob.validate();
    std::vector<double> diag(prob.grid.size(), 0.0);
    for (std::size_t k = 0; k < prob.obs.count(); ++k)
        diag[prob.obs.indices[k]] = 1.0 / prob.r_diag[k];
    return DiagonalOperator(std::move(diag));
}

/// q = rho + V (Psi (V rho)), evaluated in that step order.
inline Signal matvec_exact(const Signal& rho, const DenseOperator& v,
                           const DiagonalOperator& psi) {
    detail::require(rho.size() == v.dim() && psi.dim() == v.dim(),
                    "matvec_exact: dimension mismatch");
    const Signal z1 = mat_vec(v, rho);
    const Signal z2 = psi.apply(z1);
    const Signal z3 = mat_vec(v, z2);
    Signal q(rho.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = rho[i] + z3[i];
    return q;
}

/// Same steps with both applications of V replaced by the recursive filter.
inline Signal matvec_filtered(const Signal& rho, const FilterCoefficients& coeffs,
                              const FilterSpec& spec, const DiagonalOperator& psi) {
    detail::require(rho.size() == coeff_size(coeffs) && psi.dim() == rho.size(),
                    "matvec_filtered: dimension mismatch");
    const Signal z1 = apply_filter(rho, coeffs, spec);
    const Signal z2 = psi.apply(z1);
    const Signal z3 = apply_filter(z2, coeffs, spec);
    Signal q(rho.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = rho[i] + z3[i];
    return q;
}

/// Conjugate gradient on a matrix-free operator action. Stops when the
/// relative residual ||r_k|| / ||b|| drops to eps or the iteration cap is
/// reached; a non-finite iterate raises DivergenceError.
template <class ApplyA>
CgReport cg_solve(ApplyA&& apply_a, const Signal& b, double eps, std::size_t max_iter) {
    detail::require(eps > 0.0, "cg_solve: eps must be positive");
    const std::size_t n = b.size();
    CgReport rep;
    rep.solution.assign(n, 0.0);

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        rep.residual_norms.push_back(0.0);
        rep.converged = true;
        return rep;
    }

    Signal r = b;
    Signal rho = r;
    double rr = dot(r, r);
    rep.residual_norms.push_back(std::sqrt(rr) / bnorm);

    while (rep.residual_norms.back() > eps && rep.iterations < max_iter) {
        const Signal q = apply_a(rho);
        const double rho_q = dot(rho, q);
        const double alpha = rr / rho_q;
        if (!std::isfinite(alpha)) throw DivergenceError("cg_solve: non-finite step length");
        for (std::size_t i = 0; i < n; ++i) {
            rep.solution[i] += alpha * rho[i];
            r[i] -= alpha * q[i];
        }
        const double rr_new = dot(r, r);
        if (!std::isfinite(rr_new)) throw DivergenceError("cg_solve: non-finite residual");
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < n; ++i) rho[i] = r[i] + beta * rho[i];
        rr = rr_new;
        ++rep.iterations;
        rep.residual_norms.push_back(std::sqrt(rr) / bnorm);
    }
    rep.converged = rep.residual_norms.back() <= eps;
    return rep;
}

/// Scatters R^-1 d through H^T, then applies the supplied background
/// operator action.
inline Signal build_rhs(const VarProblem& prob,
                        const std::function<Signal(const Signal&)>& v_action) {
    prob.validate();
    std::vector<double> scaled(prob.obs.count());
    for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] = prob.misfit[k] / prob.r_diag[k];
    return v_action(prob.obs.adjoint(scaled, prob.grid.size()));
}

/// Background-operator action (sigma_b V, exact or filtered) for a problem's
/// backend.
inline std::function<Signal(const Signal&)> make_v_action(const VarProblem& prob) {
    const double scale = prob.sigma_b;
    if (prob.backend.kind == BackendKind::Exact) {
        auto v = std::make_shared<DenseOperator>(build_v(GaussianOperatorSpec{prob.grid, {}}));
        return [v, scale](const Signal& x) {
            Signal out = mat_vec(*v, x);
            if (scale != 1.0)
                for (double& o : out) o *= scale;
            return out;
        };
    }
    const FilterSpec spec = prob.backend.filter_spec();
    auto coeffs = std::make_shared<FilterCoefficients>(make_coefficients(prob.grid, spec));
    return [coeffs, spec, scale](const Signal& x) {
        Signal out = apply_filter(x, *coeffs, spec);
        if (scale != 1.0)
            for (double& o : out) o *= scale;
        return out;
    };
}

struct AssimilationResult {
    Signal increment;
    CgReport report;
};

/// Solves the dual system (I + V Psi V) v = V H^T R^-1 d with the backend's
/// operator standing in for V, then maps back with the increment dx = V v.
inline AssimilationResult assimilate(const VarProblem& prob, double eps, std::size_t max_iter) {
    prob.validate();
    const DiagonalOperator psi = assemble_psi(prob);
    const auto v_action = make_v_action(prob);

    auto apply_a = [&](const Signal& x) {
        const Signal z1 = v_action(x);
        const Signal z2 = psi.apply(z1);
        const Signal z3 = v_action(z2);
        Signal q(x.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = x[i] + z3[i];
        return q;
    };

    const Signal b = build_rhs(prob, v_action);
    CgReport rep = cg_solve(apply_a, b, eps, max_iter);
    AssimilationResult out;
    out.increment = v_action(rep.solution);
    out.report = std::move(rep);
    return out;
}

/// Diagnostic solve of the primal system (I + B Psi) dx = B H^T R^-1 d on
/// its dense assembly; exact backend only. The assembled matrix is not
/// symmetric, so non-convergence is reported rather than thrown.
inline AssimilationResult primal_solve(const VarProblem& prob, double eps,
                                       std::size_t max_iter) {
    prob.validate();
    detail::require(prob.backend.kind == BackendKind::Exact,
                    "primal_solve: exact backend only");
    const std::size_t m = prob.grid.size();
    const DiagonalOperator psi = assemble_psi(prob);
    const DenseOperator v = build_v(GaussianOperatorSpec{prob.grid, {}});
    DenseOperator b_op = multiply(v, v);
    const double sb2 = prob.sigma_b * prob.sigma_b;
    if (sb2 != 1.0)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) b_op(i, j) *= sb2;

    DenseOperator system(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            system(i, j) = (i == j ? 1.0 : 0.0) + b_op(i, j) * psi[j];

    std::vector<double> scaled(prob.obs.count());
    for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] = prob.misfit[k] / prob.r_diag[k];
    const Signal rhs = mat_vec(b_op, prob.obs.adjoint(scaled, m));

    CgReport rep = cg_solve([&](const Signal& x) { return mat_vec(system, x); }, rhs, eps,
                            max_iter);
    AssimilationResult out;
    out.increment = rep.solution;
    out.report = std::move(rep);
    return out;
}

/// One step of the side-by-side exact/filtered comparison.
struct BoundCheckRecord {
    std::size_t step = 0;
    double measured = 0.0;      // ||q_k - q_tilde_k||_inf
    double bound = 0.0;         // theorem bound at this step
    double specialized = 0.0;   // specialized bound at this step
    double norm_ek = 0.0;       // ||rho_k - rho_tilde_k||_inf
};

struct PairedBoundRun {
    std::vector<BoundCheckRecord> records;
    Signal increment_exact;
    Signal increment_filtered;
    double norm_v = 0.0;
    double norm_f = 0.0;
    double norm_psi = 0.0;
    double dist_fv = 0.0;
    double asymmetry_f = 0.0;  // max |F - F^T| of the materialized filter
};

/// Runs Algorithm-2-based and Algorithm-3-based CG solvers in lockstep, each
/// evolving its own residual sequence from its own right-hand side, and
/// records the measured per-step difference ||q_k - q_tilde_k|| against both
/// bounds while both solvers are active. The filter backend comes from the
/// problem; the exact operator is built alongside. Requires sigma_b = 1 so
/// the operators are exactly the ones the bound speaks about.
inline PairedBoundRun paired_bound_run(const VarProblem& prob, double eps,
                                       std::size_t max_iter) {
    prob.validate();
    detail::require(prob.backend.kind != BackendKind::Exact,
                    "paired_bound_run: problem must carry a filter backend");
    detail::require(prob.sigma_b == 1.0, "paired_bound_run: sigma_b must be 1");
    const std::size_t m = prob.grid.size();
    const FilterSpec spec = prob.backend.filter_spec();
    const FilterCoefficients coeffs = make_coefficients(prob.grid, spec);
    const DenseOperator v = build_v(GaussianOperatorSpec{prob.grid, {}});
    const DenseOperator f = materialize_f(coeffs, spec, m);
    const DiagonalOperator psi = assemble_psi(prob);

    PairedBoundRun run;
    run.norm_v = inf_norm(v);
    run.norm_f = inf_norm(f);
    run.norm_psi = psi.inf_norm();
    run.dist_fv = operator_distance(f, v);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            run.asymmetry_f = std::max(run.asymmetry_f, std::abs(f(i, j) - f(j, i)));

    std::vector<double> scaled(prob.obs.count());
    for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] = prob.misfit[k] / prob.r_diag[k];
    const Signal scattered = prob.obs.adjoint(scaled, m);
    const Signal b_exact = mat_vec(v, scattered);
    const Signal b_filt = apply_filter(scattered, coeffs, spec);

    struct State {
        Signal x, r, rho;
        double rr = 0.0;
        double bnorm = 0.0;
    };
    auto init = [m](const Signal& b) {
        State st;
        st.x.assign(m, 0.0);
        st.r = b;
        st.rho = b;
        st.rr = dot(b, b);
        st.bnorm = std::sqrt(st.rr);
        return st;
    };
    auto active = [eps](const State& st) {
        return st.bnorm > 0.0 && std::sqrt(st.rr) / st.bnorm > eps;
    };
    auto advance = [m](State& st, const Signal& q) {
        const double alpha = st.rr / dot(st.rho, q);
        if (!std::isfinite(alpha)) throw DivergenceError("paired_bound_run: divergence");
        for (std::size_t i = 0; i < m; ++i) {
            st.x[i] += alpha * st.rho[i];
            st.r[i] -= alpha * q[i];
        }
        const double rr_new = dot(st.r, st.r);
        if (!std::isfinite(rr_new)) throw DivergenceError("paired_bound_run: divergence");
        const double beta = rr_new / st.rr;
        for (std::size_t i = 0; i < m; ++i) st.rho[i] = st.r[i] + beta * st.rho[i];
        st.rr = rr_new;
    };

    State ex = init(b_exact);
    State fl = init(b_filt);

    for (std::size_t k = 0; k < max_iter && active(ex) && active(fl); ++k) {
        const Signal q_ex = matvec_exact(ex.rho, v, psi);
        const Signal q_fl = matvec_filtered(fl.rho, coeffs, spec, psi);

        BoundCheckRecord rec;
        rec.step = k;
        Signal diff_rho(m), diff_q(m);
        for (std::size_t i = 0; i < m; ++i) {
            diff_rho[i] = ex.rho[i] - fl.rho[i];
            diff_q[i] = q_ex[i] - q_fl[i];
        }
        rec.norm_ek = inf_norm(diff_rho);
        rec.measured = inf_norm(diff_q);
        const ErrorBoundInputs in{run.norm_v, run.norm_f,  run.norm_psi,
                                  run.dist_fv, rec.norm_ek, inf_norm(fl.rho)};
        rec.bound = theorem_bound(in);
        rec.specialized = specialized_bound(in);
        run.records.push_back(rec);

        advance(ex, q_ex);
        advance(fl, q_fl);
    }
    // Drain whichever solver has not converged yet; the paired comparison is
    // over but the increments should still be fully solved.
    for (std::size_t k = 0; k < max_iter && active(ex); ++k)
        advance(ex, matvec_exact(ex.rho, v, psi));
    for (std::size_t k = 0; k < max_iter && active(fl); ++k)
        advance(fl, matvec_filtered(fl.rho, coeffs, spec, psi));

    run.increment_exact = mat_vec(v, ex.x);
    run.increment_filtered = apply_filter(fl.x, coeffs, spec);
    return run;
}

}  // namespace rfvar
