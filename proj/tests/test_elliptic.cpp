#include <doctest.h>

#include <cmath>
#include <random>

#include "lsrec/elliptic.hpp"

using namespace lsrec;

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(rng()) / static_cast<double>(rng.max()));
}

ScalarField sinsin(const Grid& g) {
    ScalarField f(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            f.at(i, j) = std::sin(kPi * g.x(i)) * std::sin(kPi * g.y(j));
    return f;
}

double poisson_maxerr(int n) {
    const Grid g = make_grid(n);
    const ScalarField exact = sinsin(g);
    ScalarField src(g);
    for (size_t k = 0; k < src.values.size(); ++k)
        src.values[k] = -2.0 * kPi * kPi * exact.values[k];
    const ScalarField u = solve_poisson_dirichlet(g, src);
    double err = 0.0;
    for (size_t k = 0; k < u.values.size(); ++k)
        err = std::max(err, std::abs(u.values[k] - exact.values[k]));
    return err;
}

// counterclockwise boundary index of the mirrored node under x -> 1-x
int mirror_x_boundary(const Grid& g, int k) {
    int i, j;
    g.boundary_coords(k, i, j);
    return g.boundary_index(g.n - 1 - i, j);
}

} // namespace

TEST_CASE("sparse systems are symmetric and diagonally dominant") {
    const Grid g = make_grid(9);
    for (const SparseSystem& sys :
         {SparseSystem::poisson_dirichlet(g), SparseSystem::helmholtz_neumann(g)}) {
        const auto& A = sys.matrix();
        Eigen::SparseMatrix<double> D = Eigen::SparseMatrix<double>(A.transpose()) - A;
        CHECK(D.coeffs().cwiseAbs().maxCoeff() <= 1e-12);
        for (int c = 0; c < A.outerSize(); ++c) {
            double diag = 0.0, off = 0.0;
            for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it)
                (it.row() == it.col() ? diag : off) += std::abs(it.value());
            CHECK(diag >= off - 1e-12);
        }
    }
}

TEST_CASE("poisson solver: zero source, manufactured solution, convergence order") {
    const Grid g = make_grid(33);
    const ScalarField u0 = solve_poisson_dirichlet(g, ScalarField(g, 0.0));
    for (double v : u0.values) CHECK(std::abs(v) <= 1e-12);

    const double e33 = poisson_maxerr(33);
    const double e65 = poisson_maxerr(65);
    const double order = std::log2(e33 / e65);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("poisson solver satisfies its stencil equation") {
    const Grid g = make_grid(33);
    std::mt19937_64 rng(17);
    ScalarField src(g);
    for (double& v : src.values) v = uniform(rng);
    const ScalarField u = solve_poisson_dirichlet(g, src);
    for (int k = 0; k < g.num_boundary(); ++k) {
        int i, j;
        g.boundary_coords(k, i, j);
        CHECK(u.at(i, j) == 0.0);
    }
    double maxres = 0.0;
    for (int j = 1; j < g.n - 1; ++j)
        for (int i = 1; i < g.n - 1; ++i)
            maxres = std::max(maxres, std::abs(laplacian_stencil(u, i, j) - src.at(i, j)));
    CHECK(maxres < 1e-7); // residual contract, amplified by 1/h^2
}

TEST_CASE("poisson solver: unit source center value against a fine-grid oracle") {
    const Grid fine = make_grid(257);
    const ScalarField uf = solve_poisson_dirichlet(fine, ScalarField(fine, 1.0));
    const double oracle = uf.at(128, 128);

    const Grid g = make_grid(65);
    const ScalarField u = solve_poisson_dirichlet(g, ScalarField(g, 1.0));
    CHECK(std::abs(u.at(32, 32) - oracle) / std::abs(oracle) < 5e-4); // 3 significant digits
}

TEST_CASE("laplace solver: constants and harmonic quadratics are exact") {
    const Grid g = make_grid(33);
    const ScalarField vc = solve_laplace_dirichlet(g, BoundaryTrace(g, 2.5));
    for (double v : vc.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-11));

    ScalarField hq(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) hq.at(i, j) = g.x(i) * g.x(i) - g.y(j) * g.y(j);
    BoundaryTrace bd(g);
    for (int k = 0; k < g.num_boundary(); ++k) {
        int i, j;
        g.boundary_coords(k, i, j);
        bd.values[static_cast<size_t>(k)] = hq.at(i, j);
    }
    const ScalarField v = solve_laplace_dirichlet(g, bd);
    for (size_t k = 0; k < v.values.size(); ++k)
        CHECK(std::abs(v.values[k] - hq.values[k]) <= 1e-9);
}

TEST_CASE("laplace and helmholtz solutions satisfy their stencil equations") {
    const Grid g = make_grid(33);
    std::mt19937_64 rng(53);

    BoundaryTrace bd(g);
    for (double& v : bd.values) v = uniform(rng);
    const ScalarField v = solve_laplace_dirichlet(g, bd);
    for (int j = 1; j < g.n - 1; ++j)
        for (int i = 1; i < g.n - 1; ++i)
            CHECK(std::abs(laplacian_stencil(v, i, j)) < 1e-6);
    for (int k = 0; k < g.num_boundary(); ++k) {
        int i, j;
        g.boundary_coords(k, i, j);
        CHECK(v.at(i, j) == bd.values[static_cast<size_t>(k)]);
    }

    ScalarField rhs(g);
    for (double& x : rhs.values) x = uniform(rng);
    const ScalarField w = solve_helmholtz_neumann(g, rhs);
    auto mirror = [&](int ii) {
        if (ii < 0) return 1;
        if (ii > g.n - 1) return g.n - 2;
        return ii;
    };
    const double inv_h2 = 1.0 / (g.spacing * g.spacing);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const double lap = (w.at(mirror(i + 1), j) + w.at(mirror(i - 1), j) +
                                w.at(i, mirror(j + 1)) + w.at(i, mirror(j - 1)) -
                                4.0 * w.at(i, j)) * inv_h2;
            CHECK(std::abs(w.at(i, j) - lap - rhs.at(i, j)) < 1e-7);
        }
}

TEST_CASE("helmholtz solver: constants, positivity, integral identity") {
    const Grid g = make_grid(33);
    const ScalarField wc = solve_helmholtz_neumann(g, ScalarField(g, -1.75));
    for (double v : wc.values) CHECK(v == doctest::Approx(-1.75).epsilon(1e-11));

    ScalarField spike(g);
    spike.at(16, 16) = 1.0;
    const ScalarField w = solve_helmholtz_neumann(g, spike);
    for (double v : w.values) CHECK(v > 0.0);

    std::mt19937_64 rng(19);
    ScalarField rhs(g);
    for (double& v : rhs.values) v = uniform(rng);
    const ScalarField ws = solve_helmholtz_neumann(g, rhs);
    const ScalarField one(g, 1.0);
    const double iw = inner_domain(ws, one), ir = inner_domain(rhs, one);
    CHECK(std::abs(iw - ir) <= 1e-8 * std::abs(ir));
}

TEST_CASE("forward operator: zero density, bounds check") {
    const Grid g = make_grid(33);
    const BoundaryTrace t = forward(g, ScalarField(g, 0.0));
    for (double v : t.values) CHECK(std::abs(v) <= 1e-12);
    CHECK_THROWS_AS(forward(g, ScalarField(g, 2.0)), std::invalid_argument);
}

TEST_CASE("forward operator respects the symmetries of a centered square") {
    const Grid g = make_grid(33);
    ScalarField z(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i), y = g.y(j);
            z.at(i, j) = (x >= 0.25 && x <= 0.75 && y >= 0.25 && y <= 0.75) ? 1.0 : 0.0;
        }
    const BoundaryTrace t = forward(g, z);
    for (int k = 0; k < g.num_boundary(); ++k) {
        const double a = t.values[static_cast<size_t>(k)];
        CHECK(std::abs(a - t.values[static_cast<size_t>(mirror_x_boundary(g, k))]) < 1e-8);
        // diagonal reflection (x,y) -> (y,x)
        int i, j;
        g.boundary_coords(k, i, j);
        const int kd = g.boundary_index(j, i);
        CHECK(std::abs(a - t.values[static_cast<size_t>(kd)]) < 1e-8);
    }
}

TEST_CASE("forward operator: full density gives a strictly positive trace") {
    // u < 0 inside by the maximum principle and u = 0 on the boundary, so the
    // outward normal derivative is positive away from the corners.
    const Grid g = make_grid(33);
    const BoundaryTrace t = forward(g, ScalarField(g, 1.0));
    for (int k = 0; k < g.num_boundary(); ++k) {
        int i, j;
        g.boundary_coords(k, i, j);
        if (g.is_corner(i, j)) continue;
        CHECK(t.values[static_cast<size_t>(k)] > 0.0);
    }
}

TEST_CASE("forward linearization: linearity and difference-quotient consistency") {
    const Grid g = make_grid(33);
    std::mt19937_64 rng(23);
    ScalarField s1(g), s2(g), z(g), s(g);
    for (size_t k = 0; k < s1.values.size(); ++k) {
        s1.values[k] = uniform(rng);
        s2.values[k] = uniform(rng);
        z.values[k] = uniform(rng, 0.2, 0.8);
        s.values[k] = uniform(rng, -0.1, 0.1);
    }
    const BoundaryTrace t0 = forward_linearization(g, ScalarField(g, 0.0));
    for (double v : t0.values) CHECK(std::abs(v) <= 1e-12);

    ScalarField s12(g);
    for (size_t k = 0; k < s12.values.size(); ++k) s12.values[k] = s1.values[k] + s2.values[k];
    const BoundaryTrace a = forward_linearization(g, s1);
    const BoundaryTrace b = forward_linearization(g, s2);
    const BoundaryTrace ab = forward_linearization(g, s12);
    for (size_t k = 0; k < ab.values.size(); ++k)
        CHECK(std::abs(ab.values[k] - a.values[k] - b.values[k]) < 1e-10);

    const double t = 1e-3;
    ScalarField zts(g);
    for (size_t k = 0; k < z.values.size(); ++k) zts.values[k] = z.values[k] + t * s.values[k];
    const BoundaryTrace fz = forward(g, z);
    const BoundaryTrace fzts = forward(g, zts);
    const BoundaryTrace fs = forward_linearization(g, s);
    double err = 0.0;
    for (size_t k = 0; k < fs.values.size(); ++k)
        err = std::max(err, std::abs((fzts.values[k] - fz.values[k]) / t - fs.values[k]));
    CHECK(err <= 1e-8);
}

TEST_CASE("adjoint identity against the harmonic extension") {
    const Grid g = make_grid(33);
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        ScalarField s(g);
        for (int j = 1; j < g.n - 1; ++j)
            for (int i = 1; i < g.n - 1; ++i) s.at(i, j) = uniform(rng);
        BoundaryTrace r(g);
        for (double& v : r.values) v = uniform(rng);

        const BoundaryTrace fs = forward_linearization(g, s);
        const ScalarField v = solve_laplace_dirichlet(g, r);
        const double lhs = inner_boundary(fs, r);
        const double rhs = inner_domain(s, v);
        CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
}

TEST_CASE("forward operator has a stable Lipschitz constant estimate") {
    const Grid g = make_grid(33);
    // ||F(z1)-F(z2)|| = ||F'(z1-z2)||; the best constant is the operator
    // norm of F', estimated by power iteration on F'*F' from a random start
    auto estimate = [&](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        ScalarField s(g);
        for (int j = 1; j < g.n - 1; ++j)
            for (int i = 1; i < g.n - 1; ++i) s.at(i, j) = uniform(rng);
        double lambda = 0.0;
        for (int it = 0; it < 25; ++it) {
            const BoundaryTrace t = forward_linearization(g, s);
            ScalarField next = solve_laplace_dirichlet(g, t);
            for (int k = 0; k < g.num_boundary(); ++k) {
                int i, j;
                g.boundary_coords(k, i, j);
                next.at(i, j) = 0.0;
            }
            lambda = std::sqrt(norm_domain_sq(next) / norm_domain_sq(s));
            const double scale = 1.0 / std::sqrt(norm_domain_sq(next));
            for (double& v : next.values) v *= scale;
            s = next;
        }
        return std::sqrt(lambda);
    };
    const double c1 = estimate(101), c2 = estimate(202);
    CHECK(std::abs(c1 - c2) / c1 < 0.10);

    // and it really bounds random differences (of interior support, where
    // the estimate lives)
    std::mt19937_64 rng(303);
    for (int t = 0; t < 20; ++t) {
        ScalarField z1(g), z2(g);
        for (size_t k = 0; k < z1.values.size(); ++k) {
            z1.values[k] = uniform(rng, 0.0, 1.0);
            z2.values[k] = uniform(rng, 0.0, 1.0);
        }
        for (int k = 0; k < g.num_boundary(); ++k) {
            int i, j;
            g.boundary_coords(k, i, j);
            z2.at(i, j) = z1.at(i, j);
        }
        const BoundaryTrace f1 = forward(g, z1), f2 = forward(g, z2);
        BoundaryTrace df(g);
        for (size_t k = 0; k < df.values.size(); ++k) df.values[k] = f1.values[k] - f2.values[k];
        ScalarField dz(g);
        for (size_t k = 0; k < dz.values.size(); ++k) dz.values[k] = z1.values[k] - z2.values[k];
        CHECK(std::sqrt(norm_boundary_sq(df)) <=
              (c1 * 1.05) * std::sqrt(norm_domain_sq(dz)));
    }
}
