#pragma once

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lsrec {

/// Uniform cell-vertex grid on the unit square (0,1)^2 with n nodes per side.
///
/// Node (i,j) sits at (i*spacing, j*spacing). Boundary nodes are those with
/// i or j in {0, n-1}; they are enumerated counterclockwise starting at the
/// origin: bottom edge (x increasing), right edge (y increasing), top edge
/// (x decreasing), left edge (y decreasing). Each edge contributes n-1 nodes,
/// so there are 4(n-1) boundary nodes and (n-2)^2 interior nodes.
///
/// Immutable after construction; safe to share across threads.
struct Grid {
    int n = 0;
    double spacing = 0.0;

    int num_nodes() const { return n * n; }
    int num_interior() const { return (n - 2) * (n - 2); }
    int num_boundary() const { return 4 * (n - 1); }

    int node_index(int i, int j) const { return j * n + i; }

    bool is_boundary(int i, int j) const {
        return i == 0 || j == 0 || i == n - 1 || j == n - 1;
    }
    bool is_interior(int i, int j) const { return !is_boundary(i, j); }
    bool is_corner(int i, int j) const {
        return (i == 0 || i == n - 1) && (j == 0 || j == n - 1);
    }

    int interior_index(int i, int j) const {
        assert(is_interior(i, j));
        return (j - 1) * (n - 2) + (i - 1);
    }
    void interior_coords(int k, int& i, int& j) const {
        i = k % (n - 2) + 1;
        j = k / (n - 2) + 1;
    }

    int boundary_index(int i, int j) const {
        assert(is_boundary(i, j));
        const int m = n - 1;
        if (j == 0 && i < m) return i;
        if (i == m && j < m) return m + j;
        if (j == m && i > 0) return 2 * m + (m - i);
        return 3 * m + (m - j);
    }
    void boundary_coords(int k, int& i, int& j) const {
        const int m = n - 1;
        assert(k >= 0 && k < 4 * m);
        if (k < m)          { i = k;             j = 0; }
        else if (k < 2 * m) { i = m;             j = k - m; }
        else if (k < 3 * m) { i = m - (k - 2*m); j = m; }
        else                { i = 0;             j = m - (k - 3*m); }
    }

    double x(int i) const { return i * spacing; }
    double y(int j) const { return j * spacing; }

    /// Trapezoid quadrature weight of a node for integrals over the square:
    /// h^2 interior, h^2/2 on edges, h^2/4 at corners.
    double domain_weight(int i, int j) const {
        double w = spacing * spacing;
        if (i == 0 || i == n - 1) w *= 0.5;
        if (j == 0 || j == n - 1) w *= 0.5;
        return w;
    }
};

/// make_grid(n): n >= 3 nodes per side, spacing 1/(n-1).
Grid make_grid(int n);

/// Scalar nodal field on a grid. Carries u, v_k, w_k, phi and material
/// fields alike; roles differ only in the invariants callers maintain.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.num_nodes()), fill) {}

    double& at(int i, int j) { return values[static_cast<size_t>(grid.node_index(i, j))]; }
    double at(int i, int j) const { return values[static_cast<size_t>(grid.node_index(i, j))]; }

    bool all_finite() const;
};

/// Values on the boundary nodes, ordered counterclockwise from (0,0).
struct BoundaryTrace {
    Grid grid;
    std::vector<double> values;

    BoundaryTrace() = default;
    explicit BoundaryTrace(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.num_boundary()), fill) {}

    bool all_finite() const;
};

/// 5-point Laplacian at an interior node: (f_E+f_W+f_N+f_S-4f_C)/h^2.
/// Exact on quadratic polynomials.
double laplacian_stencil(const ScalarField& field, int i, int j);

/// Outward normal derivative on the boundary by the one-sided 3-point
/// second-order formula (3 f_b - 4 f_1 + f_2)/(2h), with f_1, f_2 one and
/// two nodes inward along the normal. Corners average the two edge formulas.
BoundaryTrace neumann_trace(const ScalarField& field);

// Discrete inner products and norms. The domain integral uses the 2D
// trapezoid weights from Grid::domain_weight. The boundary integral treats
// the boundary as a closed polyline, so every node (corners included, their
// half-weights from the two adjacent edges summing back up) carries weight h.
double inner_domain(const ScalarField& a, const ScalarField& b);
double norm_domain_sq(const ScalarField& a);
double inner_boundary(const BoundaryTrace& a, const BoundaryTrace& b);
double norm_boundary_sq(const BoundaryTrace& a);
double norm_boundary_inf(const BoundaryTrace& a);

/// Discrete H1 norm squared: trapezoid-weighted nodal L2 plus the L2 of the
/// centered-difference gradient (one-sided on the boundary).
double h1_norm_sq(const ScalarField& a);

} // namespace lsrec
