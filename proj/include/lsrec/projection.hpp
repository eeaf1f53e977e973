#pragma once

#include <functional>

#include "lsrec/grid.hpp"

namespace lsrec {

/// Parameters of the smoothed projection: ramp width epsilon and the
/// gradient-magnitude floor h used by the curvature term.
struct ProjectionParams {
    double epsilon = 0.125;
    double h = 1e-3;

    void validate() const {
        if (!(epsilon > 0.0)) throw std::invalid_argument("ProjectionParams: epsilon must be > 0");
        if (!(h >= 0.0)) throw std::invalid_argument("ProjectionParams: h must be >= 0");
    }
};

/// Sharp projection: 0 for phi < 0, 1 for phi >= 0, nodewise.
ScalarField project_sharp(const ScalarField& phi);

/// Smoothed projection: 0 for phi < -eps, 1 + phi/eps on [-eps, 0],
/// 1 for phi > 0. Values lie in [0,1].
ScalarField project_smooth(const ScalarField& phi, const ProjectionParams& params);

/// Derivative of the ramp: 1/eps on the closed interval [-eps, 0], else 0.
/// Both kinks take the ramp-side value so the band is closed.
ScalarField project_smooth_derivative(const ScalarField& phi, const ProjectionParams& params);

/// Clamp to [-a, a], nodewise. a must be positive.
ScalarField project_clamp(const ScalarField& phi, double a);

/// exp(phi), nodewise; values must stay below the overflow guard (700).
ScalarField project_exp(const ScalarField& phi);

/// Region indicator used to seed level set functions.
using RegionPredicate = std::function<bool(double x, double y)>;

/// Signed distance on grid nodes: -dist(node, A) + dist(node, complement),
/// both distances to the node samplings of the sets, by exhaustive search.
/// Positive inside A, negative outside. Degenerate shapes (empty or all of
/// the square) fall back to the constant -sqrt(2) or +sqrt(2).
ScalarField signed_distance_init(const Grid& grid, const RegionPredicate& shape);

} // namespace lsrec
