#include "lsrec/elliptic.hpp"

#include <map>
#include <mutex>
#include <vector>

namespace lsrec {

namespace {

void require_finite(const ScalarField& f, const char* who) {
    if (!f.all_finite()) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

} // namespace

SparseSystem SparseSystem::poisson_dirichlet(const Grid& grid) {
    const int n = grid.n;
    const int N = grid.num_interior();
    const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(5 * N));
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const int a = grid.interior_index(i, j);
            trip.emplace_back(a, a, 4.0 * inv_h2);
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                const int ii = i + di[d], jj = j + dj[d];
                if (grid.is_interior(ii, jj))
                    trip.emplace_back(a, grid.interior_index(ii, jj), -inv_h2);
            }
        }
    }
    SparseSystem sys;
    sys.matrix_.resize(N, N);
    sys.matrix_.setFromTriplets(trip.begin(), trip.end());
    sys.factorize();
    return sys;
}

SparseSystem SparseSystem::helmholtz_neumann(const Grid& grid) {
    const int n = grid.n;
    const int N = grid.num_nodes();
    const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);

    auto row_weight = [&](int i, int j) {
        double w = 1.0;
        if (i == 0 || i == n - 1) w *= 0.5;
        if (j == 0 || j == n - 1) w *= 0.5;
        return w;
    };

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(5 * N));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int a = grid.node_index(i, j);
            const double w = row_weight(i, j);
            trip.emplace_back(a, a, w * (1.0 + 4.0 * inv_h2));
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                int ii = i + di[d], jj = j + dj[d];
                // mirrored ghost: reflect across the boundary line
                if (ii < 0) ii = 1;
                if (ii > n - 1) ii = n - 2;
                if (jj < 0) jj = 1;
                if (jj > n - 1) jj = n - 2;
                trip.emplace_back(a, grid.node_index(ii, jj), -w * inv_h2);
            }
        }
    }
    SparseSystem sys;
    sys.matrix_.resize(N, N);
    sys.matrix_.setFromTriplets(trip.begin(), trip.end());
    sys.factorize();
    return sys;
}

void SparseSystem::factorize() {
    factor_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    factor_->compute(matrix_);
    if (factor_->info() != Eigen::Success)
        throw SolverError("SparseSystem: factorization failed",
                          SolveStats{dimension(), 0.0});
}

Eigen::VectorXd SparseSystem::solve(const Eigen::VectorXd& rhs, SolveStats* stats) const {
    Eigen::VectorXd x = factor_->solve(rhs);
    const double bnorm = rhs.norm();
    const double res = (matrix_ * x - rhs).norm();
    const double rel = bnorm > 0.0 ? res / bnorm : res;
    if (stats) *stats = SolveStats{dimension(), rel};
    if (!(rel <= kResidualTol))
        throw SolverError("SparseSystem: solve residual " + std::to_string(rel) +
                              " above tolerance",
                          SolveStats{dimension(), rel});
    return x;
}

namespace {

struct FactorCache {
    std::mutex mtx;
    std::map<int, std::shared_ptr<const SparseSystem>> poisson;
    std::map<int, std::shared_ptr<const SparseSystem>> helmholtz;
};

FactorCache& cache() {
    static FactorCache c;
    return c;
}

} // namespace

const SparseSystem& cached_poisson_dirichlet(const Grid& grid) {
    FactorCache& c = cache();
    std::lock_guard<std::mutex> lock(c.mtx);
    auto it = c.poisson.find(grid.n);
    if (it == c.poisson.end())
        it = c.poisson.emplace(grid.n, std::make_shared<const SparseSystem>(
                                           SparseSystem::poisson_dirichlet(grid))).first;
    return *it->second;
}

const SparseSystem& cached_helmholtz_neumann(const Grid& grid) {
    FactorCache& c = cache();
    std::lock_guard<std::mutex> lock(c.mtx);
    auto it = c.helmholtz.find(grid.n);
    if (it == c.helmholtz.end())
        it = c.helmholtz.emplace(grid.n, std::make_shared<const SparseSystem>(
                                             SparseSystem::helmholtz_neumann(grid))).first;
    return *it->second;
}

ScalarField solve_poisson_dirichlet(const Grid& grid, const ScalarField& source) {
    require_finite(source, "solve_poisson_dirichlet");
    const SparseSystem& sys = cached_poisson_dirichlet(grid);
    Eigen::VectorXd b(grid.num_interior());
    for (int j = 1; j < grid.n - 1; ++j)
        for (int i = 1; i < grid.n - 1; ++i)
            b[grid.interior_index(i, j)] = -source.at(i, j); // (-Laplace) u = -source
    const Eigen::VectorXd x = sys.solve(b);
    ScalarField u(grid);
    for (int j = 1; j < grid.n - 1; ++j)
        for (int i = 1; i < grid.n - 1; ++i)
            u.at(i, j) = x[grid.interior_index(i, j)];
    return u;
}

ScalarField solve_laplace_dirichlet(const Grid& grid, const BoundaryTrace& boundary_data) {
    if (!boundary_data.all_finite())
        throw std::invalid_argument("solve_laplace_dirichlet: non-finite input");
    const SparseSystem& sys = cached_poisson_dirichlet(grid);

    ScalarField v(grid);
    for (int k = 0; k < grid.num_boundary(); ++k) {
        int i, j;
        grid.boundary_coords(k, i, j);
        v.at(i, j) = boundary_data.values[static_cast<size_t>(k)];
    }

    const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(grid.num_interior());
    for (int j = 1; j < grid.n - 1; ++j) {
        for (int i = 1; i < grid.n - 1; ++i) {
            double s = 0.0;
            if (grid.is_boundary(i - 1, j)) s += v.at(i - 1, j);
            if (grid.is_boundary(i + 1, j)) s += v.at(i + 1, j);
            if (grid.is_boundary(i, j - 1)) s += v.at(i, j - 1);
            if (grid.is_boundary(i, j + 1)) s += v.at(i, j + 1);
            if (s != 0.0) b[grid.interior_index(i, j)] = s * inv_h2;
        }
    }
    const Eigen::VectorXd x = sys.solve(b);
    for (int j = 1; j < grid.n - 1; ++j)
        for (int i = 1; i < grid.n - 1; ++i)
            v.at(i, j) = x[grid.interior_index(i, j)];
    return v;
}

ScalarField solve_helmholtz_neumann(const Grid& grid, const ScalarField& rhs) {
    require_finite(rhs, "solve_helmholtz_neumann");
    const SparseSystem& sys = cached_helmholtz_neumann(grid);
    Eigen::VectorXd b(grid.num_nodes());
    for (int j = 0; j < grid.n; ++j) {
        for (int i = 0; i < grid.n; ++i) {
            double w = 1.0;
            if (i == 0 || i == grid.n - 1) w *= 0.5;
            if (j == 0 || j == grid.n - 1) w *= 0.5;
            b[grid.node_index(i, j)] = w * rhs.at(i, j);
        }
    }
    const Eigen::VectorXd x = sys.solve(b);
    ScalarField w(grid);
    for (int k = 0; k < grid.num_nodes(); ++k) w.values[static_cast<size_t>(k)] = x[k];
    return w;
}

namespace {

// (u_b - u_in)/h along the outward normal plus the (h/2) source correction;
// corners average the two one-sided differences (their inward neighbors lie
// on the boundary, so for homogeneous Dirichlet potentials the difference
// part vanishes there).
BoundaryTrace source_corrected_trace(const Grid& grid, const ScalarField& u,
                                     const ScalarField& src) {
    const double h = grid.spacing;
    BoundaryTrace t(grid);
    for (int k = 0; k < grid.num_boundary(); ++k) {
        int i, j;
        grid.boundary_coords(k, i, j);
        double sum = 0.0;
        int cnt = 0;
        if (i == 0)          { sum += (u.at(i, j) - u.at(i + 1, j)) / h; ++cnt; }
        if (i == grid.n - 1) { sum += (u.at(i, j) - u.at(i - 1, j)) / h; ++cnt; }
        if (j == 0)          { sum += (u.at(i, j) - u.at(i, j + 1)) / h; ++cnt; }
        if (j == grid.n - 1) { sum += (u.at(i, j) - u.at(i, j - 1)) / h; ++cnt; }
        t.values[static_cast<size_t>(k)] = sum / cnt + 0.5 * h * src.at(i, j);
    }
    return t;
}

} // namespace

BoundaryTrace forward(const Grid& grid, const ScalarField& z) {
    for (double v : z.values)
        if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
            throw std::invalid_argument("forward: density values must lie in [0,1]");
    const ScalarField u = solve_poisson_dirichlet(grid, z);
    return source_corrected_trace(grid, u, z);
}

BoundaryTrace forward_linearization(const Grid& grid, const ScalarField& s) {
    require_finite(s, "forward_linearization");
    const ScalarField p = solve_poisson_dirichlet(grid, s);
    return source_corrected_trace(grid, p, s);
}

} // namespace lsrec
