#include "lsrec/grid.hpp"

namespace lsrec {

Grid make_grid(int n) {
    if (n < 3) throw std::invalid_argument("make_grid: need n >= 3");
    Grid g;
    g.n = n;
    g.spacing = 1.0 / (n - 1);
    return g;
}

bool ScalarField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

bool BoundaryTrace::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

double laplacian_stencil(const ScalarField& field, int i, int j) {
    const Grid& g = field.grid;
    assert(g.is_interior(i, j));
    const double h2 = g.spacing * g.spacing;
    return (field.at(i + 1, j) + field.at(i - 1, j) +
            field.at(i, j + 1) + field.at(i, j - 1) - 4.0 * field.at(i, j)) / h2;
}

namespace {

// One-sided derivative pointing outward: the 3-point formula evaluated
// along the inward direction (di,dj), negated.
double one_sided_outward(const ScalarField& f, int i, int j, int di, int dj) {
    const double h = f.grid.spacing;
    return (3.0 * f.at(i, j) - 4.0 * f.at(i + di, j + dj) + f.at(i + 2 * di, j + 2 * dj)) /
           (2.0 * h);
}

} // namespace

BoundaryTrace neumann_trace(const ScalarField& field) {
    const Grid& g = field.grid;
    BoundaryTrace t(g);
    for (int k = 0; k < g.num_boundary(); ++k) {
        int i, j;
        g.boundary_coords(k, i, j);
        double sum = 0.0;
        int cnt = 0;
        if (i == 0)         { sum += one_sided_outward(field, i, j, +1, 0); ++cnt; }
        if (i == g.n - 1)   { sum += one_sided_outward(field, i, j, -1, 0); ++cnt; }
        if (j == 0)         { sum += one_sided_outward(field, i, j, 0, +1); ++cnt; }
        if (j == g.n - 1)   { sum += one_sided_outward(field, i, j, 0, -1); ++cnt; }
        t.values[static_cast<size_t>(k)] = sum / cnt;
    }
    return t;
}

double inner_domain(const ScalarField& a, const ScalarField& b) {
    const Grid& g = a.grid;
    assert(g.n == b.grid.n);
    double s = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            s += g.domain_weight(i, j) * a.at(i, j) * b.at(i, j);
    return s;
}

double norm_domain_sq(const ScalarField& a) { return inner_domain(a, a); }

double inner_boundary(const BoundaryTrace& a, const BoundaryTrace& b) {
    assert(a.grid.n == b.grid.n);
    double s = 0.0;
    for (size_t k = 0; k < a.values.size(); ++k) s += a.values[k] * b.values[k];
    return s * a.grid.spacing;
}

double norm_boundary_sq(const BoundaryTrace& a) { return inner_boundary(a, a); }

double norm_boundary_inf(const BoundaryTrace& a) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::abs(v));
    return m;
}

double h1_norm_sq(const ScalarField& a) {
    const Grid& g = a.grid;
    const double h = g.spacing;
    double s = 0.0;
    for (int j = 0; j < g.n; ++j) {
        for (int i = 0; i < g.n; ++i) {
            double gx, gy;
            if (i == 0)            gx = (a.at(1, j) - a.at(0, j)) / h;
            else if (i == g.n - 1) gx = (a.at(i, j) - a.at(i - 1, j)) / h;
            else                   gx = (a.at(i + 1, j) - a.at(i - 1, j)) / (2.0 * h);
            if (j == 0)            gy = (a.at(i, 1) - a.at(i, 0)) / h;
            else if (j == g.n - 1) gy = (a.at(i, j) - a.at(i, j - 1)) / h;
            else                   gy = (a.at(i, j + 1) - a.at(i, j - 1)) / (2.0 * h);
            const double v = a.at(i, j);
            s += g.domain_weight(i, j) * (v * v + gx * gx + gy * gy);
        }
    }
    return s;
}

} // namespace lsrec
