#pragma once

#include "lsrec/grid.hpp"
#include "lsrec/projection.hpp"

namespace lsrec {

/// Weights of the perimeter penalty in the velocity equation.
/// beta_alpha is the product beta*alpha that multiplies the curvature
/// contribution; h is the gradient-magnitude floor.
struct CurvatureParams {
    double h = 1e-3;
    double beta = 0.0;
    double beta_alpha = 0.0;

    void validate() const {
        if (!(h >= 0.0) || !(beta >= 0.0) || !(beta_alpha >= 0.0))
            throw std::invalid_argument("CurvatureParams: fields must be >= 0");
    }
};

/// Discrete total variation of a material field: per grid cell, the forward
/// differences of the two cell edge pairs are averaged, and the cell
/// contributes sqrt(dx^2 + dy^2) * spacing^2. For an indicator function
/// this measures the support perimeter up to grid quantization.
double bv_seminorm(const ScalarField& z);

/// div( grad P_eps(phi) / sqrt(|grad P_eps(phi)|^2 + h^2) ), centered
/// differences for both stages, one-sided on the domain boundary. The floor
/// h must be positive; it bounds the output where the gradient vanishes.
/// Orientation: for a disk-shaped {phi >= 0} of radius r the band average
/// is -1/r.
ScalarField curvature_term(const ScalarField& phi, const ProjectionParams& proj);

/// Right-hand side of the velocity equation:
///   -P'_eps(phi) * v + beta_alpha * P'_eps(phi) * curvature_term(phi).
/// Supported inside the ramp band {-eps <= phi <= 0}. curvature_sign flips
/// the curvature contribution for debugging the descent orientation.
ScalarField velocity_rhs(const ScalarField& phi, const ScalarField& v,
                         const ProjectionParams& proj, const CurvatureParams& cur,
                         double curvature_sign = 1.0);

} // namespace lsrec
