#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rfvar/analysis.hpp"
#include "rfvar/core.hpp"
#include "rfvar/gaussian.hpp"
#include "rfvar/io.hpp"
#include "rfvar/recfilter.hpp"
#include "rfvar/var3d.hpp"

namespace rfvar {

/// Settings shared by every experiment runner. Empty lists fall back to the
/// per-experiment defaults quoted in the field comments.
struct ExperimentConfig {
    std::size_t m = 0;            // 0 -> per-experiment default
    std::vector<double> sigmas;   // empty -> per-experiment default
    std::vector<int> k_list;      // empty -> per-experiment default
    int order = 1;
    bool use_q = false;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string format = "csv";   // csv | json

    void validate() const {
        detail::require(format == "csv" || format == "json",
                        "ExperimentConfig: format must be csv or json");
        detail::require(order == 1 || order == 3, "ExperimentConfig: order must be 1 or 3");
        for (double s : sigmas)
            detail::require(std::isfinite(s) && s > 0.0, "ExperimentConfig: sigma must be positive");
        for (int k : k_list) detail::require(k >= 1, "ExperimentConfig: k must be >= 1");
    }
};

namespace detail {

inline std::string join_list(const std::vector<double>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << format_g17(v[i]);
    return out.str();
}

inline std::string join_list(const std::vector<int>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
    return out.str();
}

inline std::vector<std::string> config_echo(const std::string& name, std::size_t m,
                                            const std::vector<double>& sigmas,
                                            const std::vector<int>& ks, bool use_q,
                                            std::uint64_t seed) {
    std::vector<std::string> lines;
    lines.push_back("experiment: " + name);
    lines.push_back("m=" + std::to_string(m));
    lines.push_back("sigma=" + join_list(sigmas));
    lines.push_back("k=" + join_list(ks));
    lines.push_back("use_q=" + std::to_string(use_q ? 1 : 0));
    lines.push_back("seed=" + std::to_string(seed));
    return lines;
}

}  // namespace detail

/// Trimmed operator distance ||trim(F) - trim(V)||_inf on a uniform grid of
/// scale sigma; trim drops t rows and columns at each border.
inline double trimmed_filter_distance(std::size_t m, double sigma, const FilterSpec& spec,
                                      std::size_t t) {
    const Grid1D grid = Grid1D::uniform(m, sigma);
    const DenseOperator v = build_v(GaussianOperatorSpec{grid, sigma});
    const DenseOperator f = materialize_f(make_coefficients(grid, spec), spec, m);
    return operator_distance(trim_operator(f, t), trim_operator(v, t));
}

/// Operator norms ||F1^(1)|| and ||F3^(1)|| per sigma. Norms are exact
/// row-sum computations; no randomness enters.
inline Table run_table1(ExperimentConfig cfg) {
    cfg.validate();
    const std::size_t m = cfg.m ? cfg.m : 601;
    const std::vector<double> sigmas = cfg.sigmas.empty()
                                           ? std::vector<double>{5.0, 20.0, 50.0}
                                           : cfg.sigmas;
    Table t;
    t.comments = detail::config_echo("table1", m, sigmas, {1}, cfg.use_q, cfg.seed);
    t.columns = {"sigma", "norm_f1_k1", "norm_f3_k1"};
    for (double sigma : sigmas) {
        const Grid1D grid = Grid1D::uniform(m, sigma);
        const FilterSpec s1{1, 1, false};
        const FilterSpec s3{3, 1, cfg.use_q};
        const double n1 = inf_norm(materialize_f(make_coefficients(grid, s1), s1, m));
        const double n3 = inf_norm(materialize_f(make_coefficients(grid, s3), s3, m));
        t.rows.push_back({sigma, n1, n3});
    }
    return t;
}

/// Distances ||F1^(1) - V||, ||F1^(50) - V||, ||F3^(1) - V|| per sigma.
inline Table run_table2(ExperimentConfig cfg) {
    cfg.validate();
    const std::size_t m = cfg.m ? cfg.m : 601;
    const std::vector<double> sigmas =
        cfg.sigmas.empty() ? std::vector<double>{5.0, 10.0, 25.0, 50.0} : cfg.sigmas;
    Table t;
    t.comments = detail::config_echo("table2", m, sigmas, {1, 50}, cfg.use_q, cfg.seed);
    t.columns = {"sigma", "dist_f1_k1", "dist_f1_k50", "dist_f3_k1"};
    for (double sigma : sigmas) {
        const Grid1D grid = Grid1D::uniform(m, sigma);
        const DenseOperator v = build_v(GaussianOperatorSpec{grid, sigma});
        auto dist = [&](const FilterSpec& spec) {
            return operator_distance(materialize_f(make_coefficients(grid, spec), spec, m), v);
        };
        t.rows.push_back({sigma, dist(FilterSpec{1, 1, false}), dist(FilterSpec{1, 50, false}),
                          dist(FilterSpec{3, 1, cfg.use_q})});
    }
    return t;
}

/// Edge-trimmed convergence history: first order over the iteration list,
/// third order at K = 1 in both scale settings (raw sigma and q(sigma)).
/// Rows are (order, k, use_q, trimmed_dist); trim width is 2 sigma.
inline Table run_table3(ExperimentConfig cfg) {
    cfg.validate();
    const std::size_t m = cfg.m ? cfg.m : 301;
    const double sigma = cfg.sigmas.empty() ? 20.0 : cfg.sigmas.front();
    const std::vector<int> ks =
        cfg.k_list.empty() ? std::vector<int>{1, 2, 5, 50, 100, 500} : cfg.k_list;
    const auto t_width = static_cast<std::size_t>(std::lround(2.0 * sigma));
    detail::require(2 * t_width < m, "run_table3: trim width too large for grid");

    Table t;
    t.comments = detail::config_echo("table3", m, {sigma}, ks, cfg.use_q, cfg.seed);
    t.comments.push_back("trim=" + std::to_string(t_width));
    t.columns = {"order", "k", "use_q", "trimmed_dist"};
    for (int k : ks) {
        const FilterSpec spec{1, k, false};
        t.rows.push_back({1.0, static_cast<double>(k), 0.0,
                          trimmed_filter_distance(m, sigma, spec, t_width)});
    }
    for (int uq = 0; uq <= 1; ++uq) {
        const FilterSpec spec{3, 1, uq != 0};
        t.rows.push_back({3.0, 1.0, static_cast<double>(uq),
                          trimmed_filter_distance(m, sigma, spec, t_width)});
    }
    return t;
}

/// Smoothed cosine signal: V s0 next to the recursive-filter outputs, one
/// row per grid point.
inline Table run_cos_figure(ExperimentConfig cfg) {
    cfg.validate();
    const std::size_t m = cfg.m ? cfg.m : 252;
    const double sigma = cfg.sigmas.empty() ? 15.0 : cfg.sigmas.front();
    const std::vector<int> ks = cfg.k_list.empty() ? std::vector<int>{1, 5, 50} : cfg.k_list;

    const Grid1D grid = Grid1D::uniform(m, sigma);
    Signal s0(m);
    std::vector<double> xs(m);
    const double lo = -2.0 * std::numbers::pi, hi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
        s0[i] = std::cos(xs[i]);
    }

    const Signal vs = convolve(build_v(GaussianOperatorSpec{grid, sigma}), s0);
    std::vector<Signal> filtered;
    Table t;
    t.comments = detail::config_echo("fig-cos", m, {sigma}, ks, cfg.use_q, cfg.seed);
    t.columns = {"x", "s0", "v"};
    for (int k : ks) {
        const FilterSpec spec{1, k, false};
        filtered.push_back(apply_filter(s0, make_coefficients(grid, spec), spec));
        t.columns.push_back("f1_k" + std::to_string(k));
    }
    const FilterSpec s3{3, 1, cfg.use_q};
    filtered.push_back(apply_filter(s0, make_coefficients(grid, s3), s3));
    t.columns.push_back("f3_k1");

    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> row{xs[i], s0[i], vs[i]};
        for (const auto& f : filtered) row.push_back(f[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Unit-impulse responses: the V column next to the filter responses, one
/// row per grid point. The x axis carries the physical coordinate i * dx.
inline Table run_dirac_figure(ExperimentConfig cfg) {
    cfg.validate();
    const std::size_t m = cfg.m ? cfg.m : 301;
    const double sigma = cfg.sigmas.empty() ? 20.0 : cfg.sigmas.front();
    const std::vector<int> ks = cfg.k_list.empty() ? std::vector<int>{1, 5, 10} : cfg.k_list;
    const double dx = 6.0, radius = sigma * dx;

    const Grid1D grid = Grid1D::uniform(m, radius, dx);
    Signal s0(m, 0.0);
    s0[m / 2] = 1.0;

    const Signal vs = convolve(build_v(GaussianOperatorSpec{grid, {}}), s0);
    std::vector<Signal> filtered;
    Table t;
    t.comments = detail::config_echo("fig-dirac", m, {sigma}, ks, cfg.use_q, cfg.seed);
    t.columns = {"x", "v"};
    for (int k : ks) {
        const FilterSpec spec{1, k, false};
        filtered.push_back(apply_filter(s0, make_coefficients(grid, spec), spec));
        t.columns.push_back("f1_k" + std::to_string(k));
    }
    const FilterSpec s3{3, 1, cfg.use_q};
    filtered.push_back(apply_filter(s0, make_coefficients(grid, s3), s3));
    t.columns.push_back("f3_k1");

    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> row{static_cast<double>(i) * dx, vs[i]};
        for (const auto& f : filtered) row.push_back(f[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// End-to-end assimilation demo on seeded synthetic data: increments for the
/// exact and filter backends, CG residual histories, per-step bound checks
/// from the paired runs, and the condition-number pair of the primal and
/// dual systems. Backend codes in the output: 0 exact, 1 first-order RF,
/// 3 third-order RF.
inline TableSet run_var_demo(ExperimentConfig cfg) {
    cfg.validate();
    const std::size_t m = cfg.m ? cfg.m : 200;
    const double sigma = cfg.sigmas.empty() ? 10.0 : cfg.sigmas.front();
    const int k_rf1 = cfg.k_list.empty() ? 5 : cfg.k_list.front();
    const std::size_t p = std::max<std::size_t>(2, m / 5);
    const double obs_var = 0.04;
    const double eps = 1e-8;

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss01(0.0, 1.0);

    const Grid1D grid = Grid1D::uniform(m, sigma);
    const DenseOperator v = build_v(GaussianOperatorSpec{grid, sigma});

    // Truth and background: white noise smoothed by V, so both carry the
    // background correlation structure.
    Signal noise(m);
    for (double& x : noise) x = gauss01(rng);
    const Signal truth = mat_vec(v, noise);
    for (double& x : noise) x = 0.4 * gauss01(rng);
    Signal background = mat_vec(v, noise);
    for (std::size_t i = 0; i < m; ++i) background[i] += truth[i];

    // p distinct observation sites.
    std::vector<std::size_t> all(m);
    for (std::size_t i = 0; i < m; ++i) all[i] = i;
    for (std::size_t i = 0; i < p; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, m - 1);
        std::swap(all[i], all[pick(rng)]);
    }
    std::vector<std::size_t> sites(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(p));
    std::sort(sites.begin(), sites.end());

    std::vector<double> r_diag(p, obs_var), misfit(p);
    for (std::size_t k = 0; k < p; ++k) {
        const double y = truth[sites[k]] + std::sqrt(obs_var) * gauss01(rng);
        misfit[k] = y - background[sites[k]];
    }

    auto make_problem = [&](Backend be) {
        return VarProblem{grid, ObsOperator{sites}, r_diag, be, misfit, 1.0};
    };
    const VarProblem prob_exact = make_problem({BackendKind::Exact, 1, false});
    const VarProblem prob_rf1 = make_problem({BackendKind::Rf1, k_rf1, false});
    const VarProblem prob_rf3 = make_problem({BackendKind::Rf3, 1, cfg.use_q});

    const AssimilationResult res_exact = assimilate(prob_exact, eps, m);
    const AssimilationResult res_rf1 = assimilate(prob_rf1, eps, m);
    const AssimilationResult res_rf3 = assimilate(prob_rf3, eps, m);

    // Dense direct solve of the dual system as the oracle column.
    const DiagonalOperator psi = assemble_psi(prob_exact);
    DenseOperator dual(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double acc = (i == j) ? 1.0 : 0.0;
            for (std::size_t k = 0; k < m; ++k)
                if (psi[k] != 0.0) acc += v(i, k) * psi[k] * v(k, j);
            dual(i, j) = acc;
        }
    std::vector<double> scaled(p);
    for (std::size_t k = 0; k < p; ++k) scaled[k] = misfit[k] / r_diag[k];
    const Signal rhs = mat_vec(v, prob_exact.obs.adjoint(scaled, m));
    const Signal direct = mat_vec(v, dense_solve(dual, rhs));

    double rel_err = 0.0, scale = inf_norm(direct);
    for (std::size_t i = 0; i < m; ++i)
        rel_err = std::max(rel_err, std::abs(res_exact.increment[i] - direct[i]));
    if (scale > 0.0) rel_err /= scale;

    const PairedBoundRun pair_rf1 = paired_bound_run(prob_rf1, eps, m);
    const PairedBoundRun pair_rf3 = paired_bound_run(prob_rf3, eps, m);
    const ConditionPair mu = condition_compare(v, psi);

    TableSet out;
    Table increments;
    increments.comments = detail::config_echo("var-demo", m, {sigma}, {k_rf1}, cfg.use_q, cfg.seed);
    increments.comments.push_back("p=" + std::to_string(p));
    increments.comments.push_back("obs_var=" + format_g17(obs_var));
    increments.comments.push_back("eps=" + format_g17(eps));
    increments.columns = {"index", "exact", "rf1", "rf3", "dense_direct"};
    for (std::size_t i = 0; i < m; ++i)
        increments.rows.push_back({static_cast<double>(i), res_exact.increment[i],
                                   res_rf1.increment[i], res_rf3.increment[i], direct[i]});
    out.sections.emplace_back("increments", std::move(increments));

    Table residuals;
    residuals.columns = {"backend", "iteration", "relative_residual"};
    auto add_hist = [&](double code, const CgReport& rep) {
        for (std::size_t k = 0; k < rep.residual_norms.size(); ++k)
            residuals.rows.push_back({code, static_cast<double>(k), rep.residual_norms[k]});
    };
    add_hist(0.0, res_exact.report);
    add_hist(1.0, res_rf1.report);
    add_hist(3.0, res_rf3.report);
    out.sections.emplace_back("residuals", std::move(residuals));

    Table bounds;
    bounds.columns = {"backend", "step", "measured", "theorem_bound", "specialized_bound",
                      "norm_ek"};
    std::size_t violations = 0;
    auto add_bounds = [&](double code, const PairedBoundRun& run) {
        for (const auto& rec : run.records) {
            bounds.rows.push_back({code, static_cast<double>(rec.step), rec.measured, rec.bound,
                                   rec.specialized, rec.norm_ek});
            if (rec.measured > rec.bound) ++violations;
        }
    };
    add_bounds(1.0, pair_rf1);
    add_bounds(3.0, pair_rf3);
    out.sections.emplace_back("bound_checks", std::move(bounds));

    Table conditioning;
    conditioning.columns = {"mu_primal", "mu_dual"};
    conditioning.rows.push_back({mu.primal, mu.dual});
    out.sections.emplace_back("conditioning", std::move(conditioning));

    Table summary;
    summary.columns = {"exact_vs_dense_rel_inf", "bound_violations", "rf1_asymmetry",
                       "rf3_asymmetry", "exact_converged", "rf1_converged", "rf3_converged"};
    summary.rows.push_back({rel_err, static_cast<double>(violations), pair_rf1.asymmetry_f,
                            pair_rf3.asymmetry_f, res_exact.report.converged ? 1.0 : 0.0,
                            res_rf1.report.converged ? 1.0 : 0.0,
                            res_rf3.report.converged ? 1.0 : 0.0});
    out.sections.emplace_back("summary", std::move(summary));
    return out;
}

}  // namespace rfvar
