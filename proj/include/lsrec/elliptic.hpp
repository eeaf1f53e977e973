#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "lsrec/grid.hpp"

namespace lsrec {

struct SolveStats {
    int dimension = 0;
    double relative_residual = 0.0;
};

/// Thrown when a linear solve cannot reach the residual contract.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, SolveStats stats)
        : std::runtime_error(what), stats_(stats) {}
    const SolveStats& stats() const { return stats_; }

private:
    SolveStats stats_;
};

/// Symmetric positive definite system assembled from 5-point stencils.
/// Two operator classes are built here: -Laplace with Dirichlet rows
/// eliminated (unknowns are the interior nodes) and the trapezoid-weighted
/// (I - Laplace) with mirrored-ghost Neumann closure (unknowns are all
/// nodes; the row weights 1, 1/2, 1/4 make the ghost matrix symmetric).
/// Solves are by a cached sparse Cholesky factorization; every solve is
/// verified against the relative-residual contract.
class SparseSystem {
public:
    static constexpr double kResidualTol = 1e-10;

    static SparseSystem poisson_dirichlet(const Grid& grid);
    static SparseSystem helmholtz_neumann(const Grid& grid);

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs, SolveStats* stats = nullptr) const;

    int dimension() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

private:
    SparseSystem() = default;
    void factorize();

    Eigen::SparseMatrix<double> matrix_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> factor_;
};

// Factorizations are immutable once built and depend only on the grid size,
// so they are shared process-wide behind a mutex.
const SparseSystem& cached_poisson_dirichlet(const Grid& grid);
const SparseSystem& cached_helmholtz_neumann(const Grid& grid);

/// u with Laplace(u) = source at interior nodes, u = 0 on the boundary.
ScalarField solve_poisson_dirichlet(const Grid& grid, const ScalarField& source);

/// v with Laplace(v) = 0 at interior nodes, v = boundary_data on the
/// boundary; realizes the adjoint applied to a boundary residual.
ScalarField solve_laplace_dirichlet(const Grid& grid, const BoundaryTrace& boundary_data);

/// w with (I - Laplace) w = rhs at every node, homogeneous Neumann closure
/// by mirrored ghost nodes.
ScalarField solve_helmholtz_neumann(const Grid& grid, const ScalarField& rhs);

/// Forward operator: density z on the square to the outward normal
/// derivative of the potential solving Laplace(u) = z, u = 0 on the
/// boundary. The trace is the one-sided difference (u_b - u_in)/h plus the
/// compatibility correction (h/2) z_b; since the normal second derivative
/// of u on a homogeneous Dirichlet boundary equals the source, this is
/// second-order accurate, and it makes the pairing with the harmonic
/// Dirichlet extension an exact discrete adjoint for interior-supported
/// perturbations.
BoundaryTrace forward(const Grid& grid, const ScalarField& z);

/// Derivative of the forward operator. F is linear in the density, so this
/// coincides with forward applied to the perturbation.
BoundaryTrace forward_linearization(const Grid& grid, const ScalarField& s);

} // namespace lsrec
