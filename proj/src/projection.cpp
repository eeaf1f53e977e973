#include "lsrec/projection.hpp"

#include <limits>

namespace lsrec {

ScalarField project_sharp(const ScalarField& phi) {
    ScalarField z(phi.grid);
    for (size_t k = 0; k < phi.values.size(); ++k)
        z.values[k] = phi.values[k] >= 0.0 ? 1.0 : 0.0;
    return z;
}

ScalarField project_smooth(const ScalarField& phi, const ProjectionParams& params) {
    params.validate();
    const double eps = params.epsilon;
    ScalarField z(phi.grid);
    for (size_t k = 0; k < phi.values.size(); ++k) {
        const double p = phi.values[k];
        if (p < -eps) z.values[k] = 0.0;
        else if (p > 0.0) z.values[k] = 1.0;
        else z.values[k] = 1.0 + p / eps;
    }
    return z;
}

ScalarField project_smooth_derivative(const ScalarField& phi, const ProjectionParams& params) {
    params.validate();
    const double eps = params.epsilon;
    ScalarField d(phi.grid);
    for (size_t k = 0; k < phi.values.size(); ++k) {
        const double p = phi.values[k];
        d.values[k] = (p >= -eps && p <= 0.0) ? 1.0 / eps : 0.0;
    }
    return d;
}

ScalarField project_clamp(const ScalarField& phi, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("project_clamp: a must be > 0");
    ScalarField z(phi.grid);
    for (size_t k = 0; k < phi.values.size(); ++k)
        z.values[k] = std::min(a, std::max(-a, phi.values[k]));
    return z;
}

ScalarField project_exp(const ScalarField& phi) {
    for (double v : phi.values)
        if (!(v <= 700.0)) throw std::invalid_argument("project_exp: value above overflow guard");
    ScalarField z(phi.grid);
    for (size_t k = 0; k < phi.values.size(); ++k)
        z.values[k] = std::exp(phi.values[k]);
    return z;
}

ScalarField signed_distance_init(const Grid& grid, const RegionPredicate& shape) {
    const int n = grid.n;
    std::vector<char> inside(static_cast<size_t>(n) * n);
    int inside_count = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const bool in = shape(grid.x(i), grid.y(j));
            inside[static_cast<size_t>(grid.node_index(i, j))] = in ? 1 : 0;
            inside_count += in ? 1 : 0;
        }

    const double diag = std::sqrt(2.0);
    if (inside_count == 0) return ScalarField(grid, -diag);
    if (inside_count == n * n) return ScalarField(grid, diag);

    // Nearest node of the opposite set, exhaustively. Quadratic in the node
    // count but run once per experiment.
    std::vector<std::pair<double, double>> in_pts, out_pts;
    in_pts.reserve(static_cast<size_t>(inside_count));
    out_pts.reserve(static_cast<size_t>(n * n - inside_count));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (inside[static_cast<size_t>(grid.node_index(i, j))])
                in_pts.emplace_back(grid.x(i), grid.y(j));
            else
                out_pts.emplace_back(grid.x(i), grid.y(j));
        }

    auto nearest_sq = [](const std::vector<std::pair<double, double>>& pts, double x, double y) {
        double best = std::numeric_limits<double>::max();
        for (const auto& p : pts) {
            const double dx = p.first - x, dy = p.second - y;
            const double d = dx * dx + dy * dy;
            if (d < best) best = d;
        }
        return best;
    };

    ScalarField phi(grid);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = grid.x(i), y = grid.y(j);
            if (inside[static_cast<size_t>(grid.node_index(i, j))])
                phi.at(i, j) = std::sqrt(nearest_sq(out_pts, x, y));
            else
                phi.at(i, j) = -std::sqrt(nearest_sq(in_pts, x, y));
        }
    return phi;
}

} // namespace lsrec
