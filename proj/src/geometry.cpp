#include "lsrec/geometry.hpp"

namespace lsrec {

double bv_seminorm(const ScalarField& z) {
    if (!z.all_finite()) throw std::invalid_argument("bv_seminorm: non-finite input");
    const Grid& g = z.grid;
    const double h = g.spacing;
    double tv = 0.0;
    for (int j = 0; j < g.n - 1; ++j) {
        for (int i = 0; i < g.n - 1; ++i) {
            const double dx = (z.at(i + 1, j) - z.at(i, j) + z.at(i + 1, j + 1) - z.at(i, j + 1)) /
                              (2.0 * h);
            const double dy = (z.at(i, j + 1) - z.at(i, j) + z.at(i + 1, j + 1) - z.at(i + 1, j)) /
                              (2.0 * h);
            tv += std::sqrt(dx * dx + dy * dy);
        }
    }
    return tv * h * h;
}

namespace {

void gradient(const ScalarField& f, ScalarField& gx, ScalarField& gy) {
    const Grid& g = f.grid;
    const double h = g.spacing;
    for (int j = 0; j < g.n; ++j) {
        for (int i = 0; i < g.n; ++i) {
            if (i == 0)            gx.at(i, j) = (f.at(1, j) - f.at(0, j)) / h;
            else if (i == g.n - 1) gx.at(i, j) = (f.at(i, j) - f.at(i - 1, j)) / h;
            else                   gx.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
            if (j == 0)            gy.at(i, j) = (f.at(i, 1) - f.at(i, 0)) / h;
            else if (j == g.n - 1) gy.at(i, j) = (f.at(i, j) - f.at(i, j - 1)) / h;
            else                   gy.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
        }
    }
}

} // namespace

ScalarField curvature_term(const ScalarField& phi, const ProjectionParams& proj) {
    proj.validate();
    if (!(proj.h > 0.0))
        throw std::invalid_argument("curvature_term: gradient floor h must be > 0");

    const Grid& g = phi.grid;
    const ScalarField z = project_smooth(phi, proj);
    ScalarField gx(g), gy(g);
    gradient(z, gx, gy);

    ScalarField nx(g), ny(g);
    const double h2 = proj.h * proj.h;
    for (size_t k = 0; k < nx.values.size(); ++k) {
        const double m = std::sqrt(gx.values[k] * gx.values[k] +
                                   gy.values[k] * gy.values[k] + h2);
        nx.values[k] = gx.values[k] / m;
        ny.values[k] = gy.values[k] / m;
    }

    ScalarField dnx(g), dummy(g), dny(g);
    gradient(nx, dnx, dummy);
    gradient(ny, dummy, dny);

    ScalarField kappa(g);
    for (size_t k = 0; k < kappa.values.size(); ++k)
        kappa.values[k] = dnx.values[k] + dny.values[k];
    return kappa;
}

ScalarField velocity_rhs(const ScalarField& phi, const ScalarField& v,
                         const ProjectionParams& proj, const CurvatureParams& cur,
                         double curvature_sign) {
    if (phi.grid.n != v.grid.n)
        throw std::invalid_argument("velocity_rhs: fields on different grids");
    cur.validate();

    const ScalarField dP = project_smooth_derivative(phi, proj);
    ScalarField rhs(phi.grid);
    for (size_t k = 0; k < rhs.values.size(); ++k)
        rhs.values[k] = -dP.values[k] * v.values[k];

    if (cur.beta_alpha != 0.0) {
        const ScalarField kappa = curvature_term(phi, ProjectionParams{proj.epsilon, cur.h});
        for (size_t k = 0; k < rhs.values.size(); ++k)
            rhs.values[k] += curvature_sign * cur.beta_alpha * dP.values[k] * kappa.values[k];
    }
    return rhs;
}

} // namespace lsrec
