#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lsrec/elliptic.hpp"
#include "lsrec/geometry.hpp"
#include "lsrec/grid.hpp"
#include "lsrec/projection.hpp"

namespace lsrec {

enum class AnchorMode {
    Iterated, ///< each step anchors the penalty at the previous iterate
    Fixed     ///< classic Tikhonov: penalty stays anchored at the initial guess
};

struct ReconstructionConfig {
    double alpha = 3.0;        ///< regularization weight, inverse time step
    double beta = 0.0;         ///< BV weight; beta*alpha scales the curvature term
    double epsilon = 0.125;    ///< projection ramp width
    double h = 1e-3;           ///< gradient floor of the curvature term
    int max_iterations = 3000;
    int inner_fixed_point_steps = 1;
    double stop_residual = 0.0; ///< stop when residual_sq <= this; 0 disables
    std::uint64_t seed = 1;     ///< recorded for reproducibility of noise streams
    AnchorMode anchor_mode = AnchorMode::Iterated;
    bool flip_curvature_sign = false; ///< debug flag for the descent orientation

    void validate() const;
    ProjectionParams projection() const { return ProjectionParams{epsilon, h}; }
    CurvatureParams curvature() const { return CurvatureParams{h, beta, beta * alpha}; }
};

struct IterationRecord {
    int index = 0;
    double residual_sq = 0.0; ///< squared boundary misfit of the current iterate
    double bv_value = 0.0;    ///< total variation of the material field
    double penalty = 0.0;     ///< discrete H1 distance to the anchor, squared
    double functional = 0.0;  ///< residual_sq + 2*beta*alpha*bv + alpha*penalty
    int component_count = 0;  ///< components of {P_eps(phi) >= 1/2}, 4-connected
};

enum class RunStatus { Completed, ReachedStopResidual, Diverged };

struct RunResult {
    ScalarField final_phi;
    std::vector<IterationRecord> records;                    ///< one per completed step
    std::vector<std::pair<int, ScalarField>> snapshots;      ///< (iteration, material field)
    RunStatus status = RunStatus::Completed;
    std::string message;
};

/// Components of the thresholded material field {z >= threshold}, counted
/// with 4-connectivity flood fill.
int count_components(const ScalarField& z, double threshold = 0.5);

/// Evaluate all terms of the regularized functional at phi with the given
/// anchor. The functional entry is assembled as the exact sum of its parts.
IterationRecord evaluate_functional(const ScalarField& phi, const ScalarField& phi0,
                                    const BoundaryTrace& data, const ReconstructionConfig& cfg);

/// One explicit update: solve the potential, harmonic-extend the boundary
/// residual, smooth the band velocity through (I - Laplace), and move the
/// level set by w/alpha. With inner_fixed_point_steps > 1 the three solves
/// repeat with the iterate updated while the update stays anchored at
/// phi_anchor.
ScalarField step(const ScalarField& phi_k, const ScalarField& phi_anchor,
                 const BoundaryTrace& data, const ReconstructionConfig& cfg);

/// Drive step() for up to max_iterations, recording every iterate and
/// emitting material-field snapshots at the scheduled indices (index 0 is
/// the initial state). Divergence (non-finite values or |phi| beyond 1e3)
/// returns the partial history with RunStatus::Diverged.
RunResult run(const ScalarField& initial, const BoundaryTrace& data,
              const ReconstructionConfig& cfg, const std::vector<int>& snapshot_schedule);

/// Fit-to-data choice of beta*alpha: the perimeter penalty is scaled to the
/// squared noise magnitude, beta*alpha = (noise_level*||data||)^2 / (2*bv).
/// Zero noise yields zero.
double fit_to_data_beta_alpha(double noise_level, const BoundaryTrace& data,
                              const IterationRecord& probe);

} // namespace lsrec
