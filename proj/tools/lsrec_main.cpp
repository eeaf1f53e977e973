// Command line front end: data generation, reconstruction, parameter sweeps
// and a built-in property self test.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "lsrec/harness.hpp"

namespace {

using namespace lsrec;

struct CommonOpts {
    std::string spec_file;
    std::string preset_name;
    std::string out_dir;
    std::int64_t seed = -1;
    int max_iterations = -1;
};

ExperimentSpec load_spec(const CommonOpts& o) {
    if (o.spec_file.empty() == o.preset_name.empty())
        throw CLI::ValidationError("exactly one of --spec or --preset is required");
    ExperimentSpec s = o.spec_file.empty() ? preset(o.preset_name)
                                           : parse_experiment_file(o.spec_file);
    if (!o.out_dir.empty()) s.output_dir = o.out_dir;
    if (o.seed >= 0) s.seed = static_cast<std::uint64_t>(o.seed);
    if (o.max_iterations >= 0) {
        s.reconstruction.max_iterations = o.max_iterations;
        // keep the final state visible when the budget override extends past
        // the scheduled snapshots
        auto& sched = s.snapshot_schedule;
        sched.erase(std::remove_if(sched.begin(), sched.end(),
                                   [&](int k) { return k > o.max_iterations; }),
                    sched.end());
        if (sched.empty() || sched.back() != o.max_iterations)
            sched.push_back(o.max_iterations);
    }
    return s;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_iters = true) {
    cmd->add_option("--spec", o.spec_file, "experiment file (see README for the format)");
    cmd->add_option("--preset", o.preset_name, "bundled experiment: exact_two_squares, "
                                               "noise10, noise50, nonconvex_L");
    cmd->add_option("--out", o.out_dir, "output directory override");
    cmd->add_option("--seed", o.seed, "noise seed override");
    if (with_iters)
        cmd->add_option("--max-iterations", o.max_iterations, "iteration budget override");
}

int cmd_forward(const CommonOpts& o) {
    ExperimentSpec s = load_spec(o);
    std::filesystem::create_directories(s.output_dir);
    const BoundaryTrace y = generate_data(s);
    write_trace_csv(y, s.output_dir / "data.csv");
    std::cout << "wrote " << (s.output_dir / "data.csv").string() << "\n";
    if (s.noise_level > 0.0) {
        const BoundaryTrace yd = add_noise(y, s.noise_level, s.seed);
        write_trace_csv(yd, s.output_dir / "data_noisy.csv");
        std::cout << "wrote " << (s.output_dir / "data_noisy.csv").string() << "\n";
    }
    return 0;
}

int cmd_invert(const CommonOpts& o, const std::string& data_file) {
    ExperimentSpec s = load_spec(o);
    ExperimentResult res;
    if (!data_file.empty()) {
        const Grid g = make_grid(s.inversion_grid_n);
        res = run_experiment_with_data(s, read_trace_csv(g, data_file));
    } else {
        res = run_experiment(s);
    }
    if (!res.records.empty()) {
        const IterationRecord& last = res.records.back();
        std::printf("final: iteration %d residual_sq %.6e components %d\n", last.index,
                    last.residual_sq, last.component_count);
    }
    std::cout << "artifacts in " << res.output_dir.string() << "\n";
    if (res.run_status == RunStatus::Diverged) std::cerr << "reconstruction diverged\n";
    return res.exit_status;
}

int cmd_sweep(const CommonOpts& o, const std::vector<double>& alphas,
              const std::vector<double>& epsilons, const std::vector<double>& ba_scales) {
    ExperimentSpec base = load_spec(o);
    const std::filesystem::path root = base.output_dir;

    const std::vector<double> as = alphas.empty() ? std::vector<double>{base.reconstruction.alpha}
                                                  : alphas;
    const std::vector<double> es =
        epsilons.empty() ? std::vector<double>{base.reconstruction.epsilon} : epsilons;
    const std::vector<double> bs = ba_scales.empty() ? std::vector<double>{1.0} : ba_scales;

    int failures = 0;
    for (double a : as) {
        for (double e : es) {
            for (double b : bs) {
                ExperimentSpec s = base;
                s.reconstruction.alpha = a;
                s.reconstruction.epsilon = e;
                s.beta_alpha_scale = b;
                if (b == 0.0) s.beta_alpha_mode = BetaAlphaMode::Zero;
                char tag[96];
                std::snprintf(tag, sizeof tag, "sweep_a%g_e%g_s%g", a, e, b);
                s.output_dir = root / tag;
                const ExperimentResult res = run_experiment(s);
                const char* status = res.exit_status == 0 ? "ok" : "DIVERGED";
                std::printf("%-28s %s", tag, status);
                if (!res.records.empty())
                    std::printf("  residual_sq %.6e components %d",
                                res.records.back().residual_sq,
                                res.records.back().component_count);
                std::printf("\n");
                failures += res.exit_status != 0;
            }
        }
    }
    return failures == 0 ? 0 : 3;
}

bool check(bool ok, const char* what, int& failures) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what);
    failures += ok ? 0 : 1;
    return ok;
}

int cmd_selftest() {
    int failures = 0;

    { // index maps round-trip over every node
        const Grid g = make_grid(17);
        bool ok = true;
        for (int k = 0; k < g.num_boundary(); ++k) {
            int i, j;
            g.boundary_coords(k, i, j);
            ok = ok && g.boundary_index(i, j) == k;
        }
        for (int k = 0; k < g.num_interior(); ++k) {
            int i, j;
            g.interior_coords(k, i, j);
            ok = ok && g.interior_index(i, j) == k;
        }
        check(ok, "grid index maps round-trip", failures);
    }

    { // projection range and Lipschitz bound
        const Grid g = make_grid(33);
        std::mt19937_64 rng(7);
        auto randfield = [&] {
            ScalarField f(g);
            for (double& v : f.values)
                v = 2.0 * (static_cast<double>(rng()) / static_cast<double>(rng.max())) - 1.0;
            return f;
        };
        const ProjectionParams pp{0.125, 1e-3};
        bool ok = true;
        for (int t = 0; t < 25 && ok; ++t) {
            const ScalarField a = randfield(), b = randfield();
            const ScalarField za = project_smooth(a, pp), zb = project_smooth(b, pp);
            double l1 = 0.0, l2 = 0.0;
            for (int j = 0; j < g.n; ++j)
                for (int i = 0; i < g.n; ++i) {
                    const double w = g.domain_weight(i, j);
                    l1 += w * std::abs(za.at(i, j) - zb.at(i, j));
                    l2 += w * (a.at(i, j) - b.at(i, j)) * (a.at(i, j) - b.at(i, j));
                    ok = ok && za.at(i, j) >= 0.0 && za.at(i, j) <= 1.0;
                }
            ok = ok && l1 <= (1.0 / pp.epsilon) * std::sqrt(l2) + 1e-12;
        }
        check(ok, "projection range and L1 Lipschitz bound", failures);
    }

    { // adjoint identity of the forward linearization
        const Grid g = make_grid(33);
        std::mt19937_64 rng(11);
        auto uniform = [&] {
            return 2.0 * (static_cast<double>(rng()) / static_cast<double>(rng.max())) - 1.0;
        };
        bool ok = true;
        for (int t = 0; t < 20 && ok; ++t) {
            ScalarField s(g);
            for (int j = 1; j < g.n - 1; ++j)
                for (int i = 1; i < g.n - 1; ++i) s.at(i, j) = uniform();
            BoundaryTrace r(g);
            for (double& v : r.values) v = uniform();
            const BoundaryTrace fs = forward_linearization(g, s);
            const ScalarField v = solve_laplace_dirichlet(g, r);
            const double lhs = inner_boundary(fs, r);
            const double rhs = inner_domain(s, v);
            ok = ok && std::abs(lhs - rhs) <= 1e-6 * std::max(std::abs(rhs), 1e-30);
        }
        check(ok, "adjoint identity <F's,r> = <s,v(r)>", failures);
    }

    { // Helmholtz solve conserves the integral of the right hand side
        const Grid g = make_grid(33);
        std::mt19937_64 rng(13);
        ScalarField rhs(g);
        for (double& v : rhs.values)
            v = 2.0 * (static_cast<double>(rng()) / static_cast<double>(rng.max())) - 1.0;
        const ScalarField w = solve_helmholtz_neumann(g, rhs);
        const ScalarField ones(g, 1.0);
        const double iw = inner_domain(w, ones), ir = inner_domain(rhs, ones);
        check(std::abs(iw - ir) <= 1e-8 * std::max(std::abs(ir), 1e-30),
              "Helmholtz Neumann integral identity", failures);
    }

    { // reproducibility of a short bundled run
        ExperimentSpec s = preset("exact_two_squares");
        s.reconstruction.max_iterations = 3;
        s.snapshot_schedule = {0};
        s.output_dir = std::filesystem::temp_directory_path() / "lsrec_selftest_a";
        const ExperimentResult a = run_experiment(s);
        s.output_dir = std::filesystem::temp_directory_path() / "lsrec_selftest_b";
        const ExperimentResult b = run_experiment(s);
        bool ok = a.records.size() == b.records.size();
        for (size_t k = 0; ok && k < a.records.size(); ++k)
            ok = a.records[k].residual_sq == b.records[k].residual_sq &&
                 a.records[k].functional == b.records[k].functional;
        check(ok, "deterministic short run", failures);
    }

    std::printf("%s\n", failures == 0 ? "selftest: all checks passed"
                                      : "selftest: FAILURES present");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"level set reconstruction of a binary density from one pair "
                 "of boundary potential measurements"};
    app.require_subcommand(1);

    CommonOpts fwd_opts, inv_opts, sweep_opts;
    std::string data_file;
    std::vector<double> alphas, epsilons, ba_scales;

    CLI::App* fwd = app.add_subcommand("forward", "generate measurement data for a spec");
    add_common(fwd, fwd_opts, false);

    CLI::App* inv = app.add_subcommand("invert", "run a full reconstruction");
    add_common(inv, inv_opts);
    inv->add_option("--data", data_file,
                    "measurement csv to invert (skips data generation)");

    CLI::App* sw = app.add_subcommand("sweep", "grid of alpha/epsilon/beta-alpha values");
    add_common(sw, sweep_opts);
    sw->add_option("--alphas", alphas, "alpha values")->delimiter(',');
    sw->add_option("--epsilons", epsilons, "epsilon values")->delimiter(',');
    sw->add_option("--beta-alpha-scales", ba_scales,
                   "multiples of the fit-to-data beta*alpha (0 disables the term)")
        ->delimiter(',');

    app.add_subcommand("selftest", "run the built-in property checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (fwd->parsed()) return cmd_forward(fwd_opts);
        if (inv->parsed()) return cmd_invert(inv_opts, data_file);
        if (sw->parsed()) return cmd_sweep(sweep_opts, alphas, epsilons, ba_scales);
        return cmd_selftest();
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
