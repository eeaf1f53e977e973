#include "lsrec/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace lsrec {

bool ShapeSpec::contains(double x, double y) const {
    for (const Rect& r : rects)
        if (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1) return true;
    for (const Disk& d : disks) {
        const double dx = x - d.cx, dy = y - d.cy;
        if (dx * dx + dy * dy <= d.r * d.r) return true;
    }
    return false;
}

RegionPredicate ShapeSpec::predicate() const {
    return [shape = *this](double x, double y) { return shape.contains(x, y); };
}

ScalarField rasterize(const ShapeSpec& shape, const Grid& grid) {
    ScalarField z(grid);
    for (int j = 0; j < grid.n; ++j)
        for (int i = 0; i < grid.n; ++i)
            z.at(i, j) = shape.contains(grid.x(i), grid.y(j)) ? 1.0 : 0.0;
    return z;
}

double symmetric_difference_area(const ScalarField& z1, const ScalarField& z2) {
    if (z1.grid.n != z2.grid.n)
        throw std::invalid_argument("symmetric_difference_area: grid mismatch");
    const double cell = z1.grid.spacing * z1.grid.spacing;
    int count = 0;
    for (size_t k = 0; k < z1.values.size(); ++k)
        count += (z1.values[k] >= 0.5) != (z2.values[k] >= 0.5) ? 1 : 0;
    return count * cell;
}

double support_area(const ScalarField& z) {
    const double cell = z.grid.spacing * z.grid.spacing;
    int count = 0;
    for (double v : z.values) count += v >= 0.5 ? 1 : 0;
    return count * cell;
}

void ExperimentSpec::validate() const {
    if (inversion_grid_n < 3 || forward_grid_n < 3)
        throw std::invalid_argument("ExperimentSpec: grids need at least 3 nodes per side");
    if (forward_grid_n < 2 * inversion_grid_n - 1)
        throw std::invalid_argument(
            "ExperimentSpec: forward grid must satisfy forward_n >= 2*inversion_n - 1");
    if ((forward_grid_n - 1) % (inversion_grid_n - 1) != 0)
        throw std::invalid_argument("ExperimentSpec: grids are not nested");
    if (!(noise_level >= 0.0 && noise_level <= 1.0))
        throw std::invalid_argument("ExperimentSpec: noise_level must lie in [0,1]");
    if (!(beta_alpha_scale >= 0.0) || !(beta_alpha_value >= 0.0))
        throw std::invalid_argument("ExperimentSpec: beta-alpha settings must be >= 0");
    if (!std::is_sorted(snapshot_schedule.begin(), snapshot_schedule.end()))
        throw std::invalid_argument("ExperimentSpec: snapshot schedule must be sorted");
    reconstruction.validate();
}

int ExperimentSpec::refinement_ratio() const {
    return (forward_grid_n - 1) / (inversion_grid_n - 1);
}

BoundaryTrace generate_data(const ExperimentSpec& spec) {
    spec.validate();
    const Grid fine = make_grid(spec.forward_grid_n);
    const Grid coarse = make_grid(spec.inversion_grid_n);

    const ScalarField chi = rasterize(spec.target_shape, fine);
    const BoundaryTrace fine_trace = forward(fine, chi);

    // Nested grids: coarse boundary node k coincides with fine node m*k along
    // the counterclockwise traversal.
    const int m = spec.refinement_ratio();
    BoundaryTrace y(coarse);
    for (int k = 0; k < coarse.num_boundary(); ++k)
        y.values[static_cast<size_t>(k)] = fine_trace.values[static_cast<size_t>(m * k)];
    return y;
}

BoundaryTrace add_noise(const BoundaryTrace& trace, double level, std::uint64_t seed) {
    if (!(level >= 0.0)) throw std::invalid_argument("add_noise: level must be >= 0");
    if (level == 0.0) return trace;

    const double target = level * norm_boundary_inf(trace);
    std::mt19937_64 rng(seed);
    std::vector<double> pert(trace.values.size());
    double pmax = 0.0;
    for (double& p : pert) {
        // explicit mapping to [-1,1] keeps the stream independent of
        // library distribution internals
        const double u = 2.0 * (static_cast<double>(rng()) /
                                static_cast<double>(std::mt19937_64::max())) - 1.0;
        p = target * u;
        pmax = std::max(pmax, std::abs(p));
    }
    BoundaryTrace noisy = trace;
    if (pmax > 0.0) {
        const double scale = target / pmax; // exact l-infinity calibration
        for (size_t k = 0; k < pert.size(); ++k) noisy.values[k] += pert[k] * scale;
    }
    return noisy;
}

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double resolve_beta_alpha(const ExperimentSpec& spec, const BoundaryTrace& data,
                          const ScalarField& phi0) {
    switch (spec.beta_alpha_mode) {
    case BetaAlphaMode::Zero:
        return 0.0;
    case BetaAlphaMode::Explicit:
        return spec.beta_alpha_value * spec.beta_alpha_scale;
    case BetaAlphaMode::FitToData: {
        ReconstructionConfig probe_cfg = spec.reconstruction;
        probe_cfg.beta = 0.0;
        const IterationRecord probe = evaluate_functional(phi0, phi0, data, probe_cfg);
        return fit_to_data_beta_alpha(spec.noise_level, data, probe) * spec.beta_alpha_scale;
    }
    }
    return 0.0;
}

ExperimentResult run_pipeline(const ExperimentSpec& spec, const BoundaryTrace* precomputed) {
    spec.validate();
    namespace fs = std::filesystem;
    fs::create_directories(spec.output_dir);

    const Grid coarse = make_grid(spec.inversion_grid_n);

    BoundaryTrace data(coarse);
    if (precomputed) {
        if (precomputed->grid.n != coarse.n)
            throw std::invalid_argument("run_experiment: data grid does not match");
        data = *precomputed;
    } else {
        const BoundaryTrace clean = generate_data(spec);
        write_trace_csv(clean, spec.output_dir / "data.csv");
        data = clean;
        if (spec.noise_level > 0.0) {
            data = add_noise(clean, spec.noise_level, spec.seed);
            write_trace_csv(data, spec.output_dir / "data_noisy.csv");
        }
    }

    const ScalarField phi0 = signed_distance_init(coarse, spec.initial_shape.predicate());

    ReconstructionConfig cfg = spec.reconstruction;
    cfg.seed = spec.seed;
    const double beta_alpha = resolve_beta_alpha(spec, data, phi0);
    cfg.beta = beta_alpha / cfg.alpha;

    write_resolved_spec(spec, beta_alpha, spec.output_dir / "spec.resolved.toml");

    const RunResult rr = run(phi0, data, cfg, spec.snapshot_schedule);

    write_records_csv(rr.records, spec.output_dir / "records.csv");
    for (const auto& [index, z] : rr.snapshots)
        write_pgm(z, spec.output_dir / ("snapshot_" + std::to_string(index) + ".pgm"));

    ExperimentResult res;
    res.run_status = rr.status;
    res.exit_status = rr.status == RunStatus::Diverged ? 3 : 0;
    res.output_dir = spec.output_dir;
    res.resolved_beta_alpha = beta_alpha;
    res.records = rr.records;
    res.final_phi = rr.final_phi;
    res.final_material = project_smooth(rr.final_phi, cfg.projection());
    return res;
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    return run_pipeline(spec, nullptr);
}

ExperimentResult run_experiment_with_data(const ExperimentSpec& spec, const BoundaryTrace& data) {
    return run_pipeline(spec, &data);
}

std::vector<std::string> preset_names() {
    return {"exact_two_squares", "noise10", "noise50", "nonconvex_L"};
}

ExperimentSpec preset(const std::string& name) {
    ExperimentSpec s;
    s.forward_grid_n = 129;
    s.inversion_grid_n = 65;
    s.reconstruction.alpha = 3.0;
    s.reconstruction.epsilon = 0.125;
    s.reconstruction.h = 1e-3;
    s.seed = 1;
    s.snapshot_schedule = {0, 1, 2, 10, 100, 200, 300, 400, 500, 600, 700, 800,
                           900, 1000, 2000, 3000};

    // Two squares close to the lower boundary: the data is most sensitive to
    // density near the boundary, which lets the gap between the components be
    // resolved. The initial shape is a single connected dumbbell, two disks
    // joined by a thin bridge that the evolution erodes.
    const ShapeSpec two_squares{
        {{0.06, 0.06, 0.38, 0.38}, {0.62, 0.06, 0.94, 0.38}}, {}};
    const ShapeSpec dumbbell{
        {{0.20, 0.195, 0.80, 0.245}},
        {{0.22, 0.22, 0.22}, {0.78, 0.22, 0.22}}};

    if (name == "exact_two_squares") {
        s.target_shape = two_squares;
        s.initial_shape = dumbbell;
        s.noise_level = 0.0;
        s.beta_alpha_mode = BetaAlphaMode::Zero;
        s.reconstruction.max_iterations = 3000;
        s.output_dir = "out/exact_two_squares";
    } else if (name == "noise10") {
        s.target_shape = two_squares;
        s.initial_shape = dumbbell;
        s.noise_level = 0.10;
        s.beta_alpha_mode = BetaAlphaMode::FitToData;
        s.reconstruction.max_iterations = 2000;
        s.output_dir = "out/noise10";
    } else if (name == "noise50") {
        s.target_shape = two_squares;
        s.initial_shape = dumbbell;
        s.noise_level = 0.50;
        s.beta_alpha_mode = BetaAlphaMode::FitToData;
        // heavier noise wants the earlier stopping index: long runs start
        // fitting the noise and fragment the support
        s.reconstruction.max_iterations = 1200;
        s.output_dir = "out/noise50";
    } else if (name == "nonconvex_L") {
        s.target_shape = ShapeSpec{{{0.15, 0.15, 0.40, 0.70}, {0.15, 0.15, 0.70, 0.40}}, {}};
        s.initial_shape = ShapeSpec{{}, {{0.40, 0.40, 0.35}}};
        s.noise_level = 0.0;
        s.beta_alpha_mode = BetaAlphaMode::Zero;
        // concave corners take far longer than topology changes
        s.reconstruction.max_iterations = 20000;
        s.snapshot_schedule = {0,   1,   5,    20,   50,   100,  200,  400,
                               600, 800, 1000, 2000, 5000, 10000, 20000};
        s.output_dir = "out/nonconvex_L";
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return s;
}

// ---------------------------------------------------------------------------
// experiment files

namespace {

struct IniEntry {
    std::string section, key, value;
};

std::vector<IniEntry> parse_ini(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<IniEntry> entries;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": malformed section header");
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        entries.push_back({section, key, value});
    }
    return entries;
}

double to_double(const IniEntry& e) {
    try {
        size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::runtime_error("bad numeric value for " + e.section + "." + e.key + ": '" +
                                 e.value + "'");
    }
}

int to_int(const IniEntry& e) {
    const double v = to_double(e);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw std::runtime_error("expected integer for " + e.section + "." + e.key);
    return i;
}

std::vector<double> to_doubles(const IniEntry& e) {
    std::istringstream iss(e.value);
    std::vector<double> out;
    double v;
    while (iss >> v) out.push_back(v);
    if (!iss.eof())
        throw std::runtime_error("bad numeric list for " + e.section + "." + e.key);
    return out;
}

void apply_shape(ShapeSpec& shape, const IniEntry& e) {
    const std::vector<double> v = to_doubles(e);
    if (e.key == "rect") {
        if (v.size() != 4)
            throw std::runtime_error("rect wants 4 numbers (x0 y0 x1 y1) in " + e.section);
        shape.rects.push_back({v[0], v[1], v[2], v[3]});
    } else if (e.key == "disk") {
        if (v.size() != 3)
            throw std::runtime_error("disk wants 3 numbers (cx cy r) in " + e.section);
        shape.disks.push_back({v[0], v[1], v[2]});
    } else {
        throw std::runtime_error("unknown shape key '" + e.key + "' in [" + e.section + "]");
    }
}

} // namespace

ExperimentSpec parse_experiment_file(const std::filesystem::path& path) {
    ExperimentSpec s;
    s.snapshot_schedule.clear();
    for (const IniEntry& e : parse_ini(path)) {
        if (e.section == "experiment") {
            if (e.key == "forward_grid_n") s.forward_grid_n = to_int(e);
            else if (e.key == "inversion_grid_n") s.inversion_grid_n = to_int(e);
            else if (e.key == "noise_level") s.noise_level = to_double(e);
            else if (e.key == "seed") s.seed = static_cast<std::uint64_t>(to_int(e));
            else if (e.key == "output_dir") s.output_dir = e.value;
            else throw std::runtime_error("unknown key experiment." + e.key);
        } else if (e.section == "target_shape") {
            apply_shape(s.target_shape, e);
        } else if (e.section == "initial_shape") {
            apply_shape(s.initial_shape, e);
        } else if (e.section == "reconstruction") {
            ReconstructionConfig& c = s.reconstruction;
            if (e.key == "alpha") c.alpha = to_double(e);
            else if (e.key == "epsilon") c.epsilon = to_double(e);
            else if (e.key == "h") c.h = to_double(e);
            else if (e.key == "max_iterations") c.max_iterations = to_int(e);
            else if (e.key == "inner_fixed_point_steps") c.inner_fixed_point_steps = to_int(e);
            else if (e.key == "stop_residual") c.stop_residual = to_double(e);
            else if (e.key == "flip_curvature_sign") c.flip_curvature_sign = to_int(e) != 0;
            else if (e.key == "anchor") {
                if (e.value == "iterated") c.anchor_mode = AnchorMode::Iterated;
                else if (e.value == "fixed") c.anchor_mode = AnchorMode::Fixed;
                else throw std::runtime_error("anchor must be 'iterated' or 'fixed'");
            } else if (e.key == "beta_alpha") {
                if (e.value == "fit") s.beta_alpha_mode = BetaAlphaMode::FitToData;
                else {
                    const double v = to_double(e);
                    s.beta_alpha_mode = v == 0.0 ? BetaAlphaMode::Zero : BetaAlphaMode::Explicit;
                    s.beta_alpha_value = v;
                }
            } else if (e.key == "beta_alpha_scale") {
                s.beta_alpha_scale = to_double(e);
            } else {
                throw std::runtime_error("unknown key reconstruction." + e.key);
            }
        } else if (e.section == "snapshots") {
            if (e.key != "schedule")
                throw std::runtime_error("unknown key snapshots." + e.key);
            for (double v : to_doubles(e)) s.snapshot_schedule.push_back(static_cast<int>(v));
        } else {
            throw std::runtime_error("unknown section [" + e.section + "]");
        }
    }
    return s;
}

void write_resolved_spec(const ExperimentSpec& spec, double resolved_beta_alpha,
                         const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# resolved experiment configuration\n";
    out << "[experiment]\n";
    out << "forward_grid_n = " << spec.forward_grid_n << "\n";
    out << "inversion_grid_n = " << spec.inversion_grid_n << "\n";
    out << "noise_level = " << fmt17(spec.noise_level) << "\n";
    out << "seed = " << spec.seed << "\n";
    out << "output_dir = \"" << spec.output_dir.generic_string() << "\"\n\n";

    auto dump_shape = [&](const char* name, const ShapeSpec& sh) {
        out << "[" << name << "]\n";
        for (const auto& r : sh.rects)
            out << "rect = " << fmt17(r.x0) << " " << fmt17(r.y0) << " " << fmt17(r.x1) << " "
                << fmt17(r.y1) << "\n";
        for (const auto& d : sh.disks)
            out << "disk = " << fmt17(d.cx) << " " << fmt17(d.cy) << " " << fmt17(d.r) << "\n";
        out << "\n";
    };
    dump_shape("target_shape", spec.target_shape);
    dump_shape("initial_shape", spec.initial_shape);

    const ReconstructionConfig& c = spec.reconstruction;
    out << "[reconstruction]\n";
    out << "alpha = " << fmt17(c.alpha) << "\n";
    out << "beta_alpha = " << fmt17(resolved_beta_alpha) << "  # resolved";
    if (spec.beta_alpha_mode == BetaAlphaMode::FitToData) out << " (fit-to-data)";
    out << "\n";
    out << "epsilon = " << fmt17(c.epsilon) << "\n";
    out << "h = " << fmt17(c.h) << "\n";
    out << "max_iterations = " << c.max_iterations << "\n";
    out << "inner_fixed_point_steps = " << c.inner_fixed_point_steps << "\n";
    out << "stop_residual = " << fmt17(c.stop_residual) << "\n";
    out << "anchor = " << (c.anchor_mode == AnchorMode::Iterated ? "\"iterated\"" : "\"fixed\"")
        << "\n";
    out << "flip_curvature_sign = " << (c.flip_curvature_sign ? 1 : 0) << "\n\n";

    out << "[snapshots]\n";
    out << "schedule =";
    for (int k : spec.snapshot_schedule) out << " " << k;
    out << "\n";
}

void write_records_csv(const std::vector<IterationRecord>& records,
                       const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "index,residual_sq,bv_value,penalty,functional,component_count\n";
    for (const IterationRecord& r : records)
        out << r.index << "," << fmt17(r.residual_sq) << "," << fmt17(r.bv_value) << ","
            << fmt17(r.penalty) << "," << fmt17(r.functional) << "," << r.component_count
            << "\n";
}

void write_trace_csv(const BoundaryTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "index,value\n";
    for (size_t k = 0; k < trace.values.size(); ++k)
        out << k << "," << fmt17(trace.values[k]) << "\n";
}

BoundaryTrace read_trace_csv(const Grid& grid, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("index,value", 0) != 0)
        throw std::runtime_error(path.string() + ": expected 'index,value' header");
    BoundaryTrace t(grid);
    size_t count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        const size_t idx = static_cast<size_t>(std::stoul(line.substr(0, comma)));
        if (idx >= t.values.size())
            throw std::runtime_error(path.string() + ": trace index out of range");
        t.values[idx] = std::stod(line.substr(comma + 1));
        ++count;
    }
    if (count != t.values.size())
        throw std::runtime_error(path.string() + ": expected " +
                                 std::to_string(t.values.size()) + " rows, got " +
                                 std::to_string(count));
    return t;
}

void write_pgm(const ScalarField& z, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const int n = z.grid.n;
    out << "P5\n" << n << " " << n << "\n255\n";
    // row-major, top row (y = 1) first; 0 maps to black, 1 to white
    std::vector<unsigned char> row(static_cast<size_t>(n));
    for (int j = n - 1; j >= 0; --j) {
        for (int i = 0; i < n; ++i) {
            const double v = std::clamp(z.at(i, j), 0.0, 1.0);
            row[static_cast<size_t>(i)] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()), n);
    }
}

} // namespace lsrec
