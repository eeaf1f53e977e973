#include "lsrec/inversion.hpp"

#include <algorithm>

namespace lsrec {

void ReconstructionConfig::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("ReconstructionConfig: alpha must be > 0");
    if (!(beta >= 0.0)) throw std::invalid_argument("ReconstructionConfig: beta must be >= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("ReconstructionConfig: epsilon must be > 0");
    if (!(h > 0.0)) throw std::invalid_argument("ReconstructionConfig: h must be > 0");
    if (max_iterations < 0)
        throw std::invalid_argument("ReconstructionConfig: max_iterations must be >= 0");
    if (inner_fixed_point_steps < 1)
        throw std::invalid_argument("ReconstructionConfig: inner_fixed_point_steps must be >= 1");
    if (!(stop_residual >= 0.0))
        throw std::invalid_argument("ReconstructionConfig: stop_residual must be >= 0");
}

int count_components(const ScalarField& z, double threshold) {
    const Grid& g = z.grid;
    const int n = g.n;
    std::vector<char> visited(static_cast<size_t>(n) * n, 0);
    std::vector<int> stack;
    int components = 0;

    auto above = [&](int i, int j) { return z.at(i, j) >= threshold; };

    for (int j0 = 0; j0 < n; ++j0) {
        for (int i0 = 0; i0 < n; ++i0) {
            const int start = g.node_index(i0, j0);
            if (visited[static_cast<size_t>(start)] || !above(i0, j0)) continue;
            ++components;
            stack.assign(1, start);
            visited[static_cast<size_t>(start)] = 1;
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int i = cur % n, j = cur / n;
                const int di[4] = {1, -1, 0, 0};
                const int dj[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    const int ii = i + di[d], jj = j + dj[d];
                    if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
                    const int nb = g.node_index(ii, jj);
                    if (visited[static_cast<size_t>(nb)] || !above(ii, jj)) continue;
                    visited[static_cast<size_t>(nb)] = 1;
                    stack.push_back(nb);
                }
            }
        }
    }
    return components;
}

IterationRecord evaluate_functional(const ScalarField& phi, const ScalarField& phi0,
                                    const BoundaryTrace& data, const ReconstructionConfig& cfg) {
    cfg.validate();
    if (phi.grid.n != phi0.grid.n || phi.grid.n != data.grid.n)
        throw std::invalid_argument("evaluate_functional: grid mismatch");

    const ScalarField z = project_smooth(phi, cfg.projection());
    const BoundaryTrace f = forward(phi.grid, z);

    BoundaryTrace r(phi.grid);
    for (size_t k = 0; k < r.values.size(); ++k)
        r.values[k] = f.values[k] - data.values[k];

    ScalarField diff(phi.grid);
    for (size_t k = 0; k < diff.values.size(); ++k)
        diff.values[k] = phi.values[k] - phi0.values[k];

    IterationRecord rec;
    rec.residual_sq = norm_boundary_sq(r);
    rec.bv_value = bv_seminorm(z);
    rec.penalty = h1_norm_sq(diff);
    rec.functional = rec.residual_sq + 2.0 * cfg.beta * cfg.alpha * rec.bv_value +
                     cfg.alpha * rec.penalty;
    rec.component_count = count_components(z);
    return rec;
}

namespace {

// Steps 1-3 of the update: potential, residual, harmonic extension, band
// velocity, smoothing solve. Returns w.
ScalarField velocity_solve(const ScalarField& phi, const BoundaryTrace& data,
                           const ReconstructionConfig& cfg) {
    const Grid& g = phi.grid;
    const ScalarField z = project_smooth(phi, cfg.projection());
    const BoundaryTrace f = forward(g, z);

    BoundaryTrace r(g);
    for (size_t k = 0; k < r.values.size(); ++k)
        r.values[k] = f.values[k] - data.values[k];

    const ScalarField v = solve_laplace_dirichlet(g, r);
    const ScalarField rhs = velocity_rhs(phi, v, cfg.projection(), cfg.curvature(),
                                         cfg.flip_curvature_sign ? -1.0 : 1.0);
    return solve_helmholtz_neumann(g, rhs);
}

} // namespace

ScalarField step(const ScalarField& phi_k, const ScalarField& phi_anchor,
                 const BoundaryTrace& data, const ReconstructionConfig& cfg) {
    cfg.validate();
    if (phi_k.grid.n != phi_anchor.grid.n || phi_k.grid.n != data.grid.n)
        throw std::invalid_argument("step: grid mismatch");

    ScalarField phi = phi_k;
    for (int j = 0; j < cfg.inner_fixed_point_steps; ++j) {
        const ScalarField w = velocity_solve(phi, data, cfg);
        ScalarField next = phi_anchor;
        for (size_t k = 0; k < next.values.size(); ++k)
            next.values[k] += w.values[k] / cfg.alpha;
        phi = std::move(next);
        if (!phi.all_finite())
            throw std::runtime_error("step: diverged (non-finite level set update)");
    }
    return phi;
}

RunResult run(const ScalarField& initial, const BoundaryTrace& data,
              const ReconstructionConfig& cfg, const std::vector<int>& snapshot_schedule) {
    cfg.validate();
    if (!std::is_sorted(snapshot_schedule.begin(), snapshot_schedule.end()))
        throw std::invalid_argument("run: snapshot schedule must be sorted ascending");

    RunResult result;
    result.final_phi = initial;
    result.records.reserve(static_cast<size_t>(cfg.max_iterations));

    auto want_snapshot = [&](int k) {
        return std::binary_search(snapshot_schedule.begin(), snapshot_schedule.end(), k);
    };
    auto material = [&](const ScalarField& phi) {
        return project_smooth(phi, cfg.projection());
    };

    if (want_snapshot(0)) result.snapshots.emplace_back(0, material(initial));

    ScalarField phi = initial;
    ScalarField anchor = initial;
    for (int k = 1; k <= cfg.max_iterations; ++k) {
        ScalarField next;
        try {
            next = step(phi, anchor, data, cfg);
        } catch (const std::runtime_error& e) {
            result.final_phi = phi;
            result.status = RunStatus::Diverged;
            result.message = e.what();
            return result;
        }

        double amax = 0.0;
        for (double v : next.values) amax = std::max(amax, std::abs(v));
        if (!next.all_finite() || amax > 1e3) {
            result.final_phi = phi;
            result.status = RunStatus::Diverged;
            result.message = "run: diverged at iteration " + std::to_string(k);
            return result;
        }

        IterationRecord rec = evaluate_functional(next, anchor, data, cfg);
        rec.index = k;
        result.records.push_back(rec);
        if (want_snapshot(k)) result.snapshots.emplace_back(k, material(next));

        if (cfg.anchor_mode == AnchorMode::Iterated) anchor = next;
        phi = std::move(next);

        if (cfg.stop_residual > 0.0 && rec.residual_sq <= cfg.stop_residual) {
            result.final_phi = phi;
            result.status = RunStatus::ReachedStopResidual;
            return result;
        }
    }
    result.final_phi = phi;
    result.status = RunStatus::Completed;
    return result;
}

double fit_to_data_beta_alpha(double noise_level, const BoundaryTrace& data,
                              const IterationRecord& probe) {
    if (!(noise_level >= 0.0))
        throw std::invalid_argument("fit_to_data_beta_alpha: noise_level must be >= 0");
    if (noise_level == 0.0) return 0.0;
    if (!(probe.bv_value > 0.0))
        throw std::invalid_argument("fit_to_data_beta_alpha: probe BV value must be positive");
    const double misfit_scale = noise_level * std::sqrt(norm_boundary_sq(data));
    return misfit_scale * misfit_scale / (2.0 * probe.bv_value);
}

} // namespace lsrec
