#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsrec/inversion.hpp"

namespace lsrec {

/// Region described as a union of axis-aligned rectangles and disks.
/// Rectangle membership is half-open ([x0,x1) x [y0,y1)) so that unions of
/// adjacent rectangles tile without double edges; disks are closed.
struct ShapeSpec {
    struct Rect { double x0, y0, x1, y1; };
    struct Disk { double cx, cy, r; };

    std::vector<Rect> rects;
    std::vector<Disk> disks;

    bool contains(double x, double y) const;
    bool empty() const { return rects.empty() && disks.empty(); }
    RegionPredicate predicate() const;
};

/// Nodewise 0/1 indicator of a shape on a grid.
ScalarField rasterize(const ShapeSpec& shape, const Grid& grid);

/// Area of {z1 >= 1/2} XOR {z2 >= 1/2}, counted as cells times spacing^2.
double symmetric_difference_area(const ScalarField& z1, const ScalarField& z2);
/// Area of {z >= 1/2}.
double support_area(const ScalarField& z);

enum class BetaAlphaMode {
    Zero,      ///< beta = 0 (exact-data runs)
    FitToData, ///< beta*alpha from the fit-to-data rule, times beta_alpha_scale
    Explicit   ///< beta*alpha = beta_alpha_value times beta_alpha_scale
};

struct ExperimentSpec {
    ShapeSpec target_shape;
    ShapeSpec initial_shape;
    int forward_grid_n = 129;
    int inversion_grid_n = 65;
    double noise_level = 0.0;
    std::uint64_t seed = 1;
    ReconstructionConfig reconstruction;
    BetaAlphaMode beta_alpha_mode = BetaAlphaMode::Zero;
    double beta_alpha_value = 0.0;
    double beta_alpha_scale = 1.0;
    std::vector<int> snapshot_schedule;
    std::filesystem::path output_dir = "out";

    void validate() const;
    /// Ratio (forward_grid_n-1)/(inversion_grid_n-1) of the nested grids.
    int refinement_ratio() const;
};

/// Synthetic measurements: rasterize the target on the finer grid, solve the
/// forward problem there, and restrict the trace to the coarse boundary by
/// index subsampling (nested grids share node locations). Noise-free.
BoundaryTrace generate_data(const ExperimentSpec& spec);

/// Uniform perturbation scaled to hit the relative l-infinity level exactly:
/// per entry level*||y||_inf*u with u ~ U[-1,1], then rescaled so that
/// ||y_noisy - y||_inf = level*||y||_inf. Deterministic in the seed.
BoundaryTrace add_noise(const BoundaryTrace& trace, double level, std::uint64_t seed);

struct ExperimentResult {
    int exit_status = 0; ///< 0 success, nonzero on divergence
    RunStatus run_status = RunStatus::Completed;
    std::filesystem::path output_dir;
    double resolved_beta_alpha = 0.0;
    std::vector<IterationRecord> records;
    ScalarField final_phi;
    ScalarField final_material;
};

/// Full pipeline: data generation, optional noise, fit-to-data resolution,
/// reconstruction, artifact files (records.csv, snapshot_<k>.pgm, data.csv,
/// data_noisy.csv, spec.resolved.toml).
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Variant that reuses precomputed (possibly noisy) measurement data and
/// skips the data-generation stage; data.csv/data_noisy.csv are not written.
ExperimentResult run_experiment_with_data(const ExperimentSpec& spec, const BoundaryTrace& data);

// Bundled experiments: exact_two_squares, noise10, noise50, nonconvex_L.
std::vector<std::string> preset_names();
ExperimentSpec preset(const std::string& name);

// Sectioned key = value experiment files; the format is documented in the
// README and written back by write_resolved_spec.
ExperimentSpec parse_experiment_file(const std::filesystem::path& path);
void write_resolved_spec(const ExperimentSpec& spec, double resolved_beta_alpha,
                         const std::filesystem::path& path);

// Artifact helpers, shared by run_experiment, the CLI and the test suites.
void write_records_csv(const std::vector<IterationRecord>& records,
                       const std::filesystem::path& path);
void write_trace_csv(const BoundaryTrace& trace, const std::filesystem::path& path);
BoundaryTrace read_trace_csv(const Grid& grid, const std::filesystem::path& path);
void write_pgm(const ScalarField& z, const std::filesystem::path& path);

} // namespace lsrec
