// schelling: command-line front end.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "schelling/experiments.hpp"
#include "schelling/math.hpp"
#include "schelling/output.hpp"
#include "schelling/rng.hpp"

namespace fs = std::filesystem;
using namespace schelling;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const CLI::Validator kTau(
    [](std::string& s) -> std::string {
        try {
            const Rational r = Rational::parse(s);
            if (r < Rational(0, 1) || r > Rational(1, 1))
                return "intolerance " + s + " must lie in [0, 1]";
        } catch (const std::exception&) {
            return "malformed intolerance '" + s + "' (expected a decimal or p/q)";
        }
        return {};
    },
    "TAU");

struct ModelFlags {
    int dim = 2;
    int n = 0;
    int w = 1;
    std::string tau_alpha;
    std::string tau_beta;
};

void add_geometry(CLI::App* app, ModelFlags& m, bool n_required = true) {
    app->add_option("--dim", m.dim, "lattice dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
    auto* n = app->add_option("--n", m.n, "torus side length")->check(CLI::PositiveNumber);
    if (n_required)
        n->required();
    app->add_option("--w", m.w, "neighbourhood radius")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_taus(CLI::App* app, ModelFlags& m) {
    app->add_option("--tau-alpha", m.tau_alpha, "alpha intolerance, decimal or p/q")->required()->check(kTau);
    app->add_option("--tau-beta", m.tau_beta, "beta intolerance, decimal or p/q")->required()->check(kTau);
}

ModelParams to_params(const ModelFlags& m) {
    ModelParams p;
    p.dim = m.dim;
    p.n = m.n;
    p.w = m.w;
    p.tau_alpha = m.tau_alpha.empty() ? Rational(1, 2) : Rational::parse(m.tau_alpha);
    p.tau_beta = m.tau_beta.empty() ? Rational(1, 2) : Rational::parse(m.tau_beta);
    try {
        p.validate();
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    return p;
}

std::string default_out_dir() {
    const char* env = std::getenv("SCHELLING_OUT_DIR");
    return env && *env ? env : "out";
}

fs::path prepare_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("output directory " + dir + " is not usable: " + ec.message());
    return dir;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    OutputFile f(path);
    f.stream() << j.dump(2) << '\n';
    f.commit();
}

std::string zero_pad(std::uint64_t v, int width) {
    std::ostringstream s;
    s << std::setw(width) << std::setfill('0') << v;
    return s.str();
}

// ---------------------------------------------------------------- simulate

struct SimulateFlags {
    ModelFlags model;
    std::uint64_t seed = 1;
    int runs = 1;
    std::uint64_t max_stages = 0;
    std::string order = "lexicographic";
    std::uint64_t order_seed = 0;
    double epsilon = 0.1;
    bool ppm = false;
    int snapshot_every = 10;
    bool embed_final = false;
    int jobs = 1;
    std::string out_dir;
};

void snapshot(const fs::path& dir, const std::string& base, const Configuration& c, std::uint64_t stage,
              std::uint64_t seed) {
    const int slices = c.dim() == 3 ? c.n() : 1;
    for (int z = 0; z < slices; ++z) {
        std::string name = base + "_s" + zero_pad(stage, 6);
        if (c.dim() == 3)
            name += "_z" + zero_pad(static_cast<std::uint64_t>(z), 4);
        OutputFile f(dir / (name + ".ppm"));
        write_ppm(f.stream(), c, z,
                  std::string(kVersion) + " " + params_stem(c.params()) + " seed " + std::to_string(seed) +
                      " stage " + std::to_string(stage));
        f.commit();
    }
}

int cmd_simulate(const SimulateFlags& f) {
    const ModelParams params = to_params(f.model);
    RunOptions options;
    options.max_stages = f.max_stages;
    options.order = f.order == "random" ? NodeOrder::SeededRandom : NodeOrder::Lexicographic;
    options.order_seed = f.order_seed;
    const fs::path dir = prepare_out_dir(f.out_dir);
    const std::string base = params_stem(params) + "_seed" + std::to_string(f.seed);

    if (f.runs > 1) {
        std::vector<std::uint64_t> seeds;
        for (int i = 0; i < f.runs; ++i)
            seeds.push_back(derive_seed(f.seed, static_cast<std::uint64_t>(i)));
        const TrialStats stats = run_trials(params, seeds, f.epsilon, options, f.jobs);
        const std::string stem = base + "_runs" + std::to_string(f.runs);
        OutputFile csv(dir / (stem + "_trials.csv"));
        write_trials_csv(csv.stream(), stats);
        csv.commit();
        nlohmann::json j = trial_stats_json(params, stats);
        j["master_seed"] = f.seed;
        j["epsilon"] = f.epsilon;
        write_json(dir / (stem + "_stats.json"), j);
        std::cout << "runs " << stats.runs << ", majority " << to_string(stats.majority())
                  << ", mean final alpha fraction " << stats.mean_alpha_fraction_final << "\n"
                  << "wrote " << (dir / (stem + "_trials.csv")).string() << "\n";
        return 0;
    }

    const Configuration initial = random_config(params, f.seed);
    if (f.ppm)
        snapshot(dir, base, initial, 0, f.seed);
    StageObserver observer;
    if (f.ppm)
        observer = [&](const Configuration& c, const StageReport& r) {
            if (r.stage % static_cast<std::uint64_t>(f.snapshot_every) == 0)
                snapshot(dir, base, c, r.stage, f.seed);
        };
    const RunResult result = run(initial, options, f.seed, observer);
    if (f.ppm && result.final.stage % static_cast<std::uint64_t>(f.snapshot_every) != 0)
        snapshot(dir, base, result.final, result.final.stage, f.seed);

    RunRecordOptions rec;
    rec.epsilon = f.epsilon;
    rec.embed_final = f.embed_final;
    const fs::path json_path = dir / (base + ".json");
    write_json(json_path, run_record_json(initial, result, options, rec));
    std::cout << "stages " << result.reports.size() << ", terminated " << (result.terminated ? "yes" : "no")
              << ", final alpha fraction " << alpha_fraction(result.final) << ", label "
              << to_string(classify_run(initial, result.final, f.epsilon)) << "\n"
              << "wrote " << json_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
    ModelFlags model;
    std::vector<std::string> ta_values;
    std::vector<std::string> tb_values;
    int seeds_per_cell = 3;
    std::uint64_t seed = 1;
    double epsilon = 0.1;
    std::uint64_t max_stages = 0;
    int jobs = 1;
    std::string out_dir;
};

int cmd_sweep(const SweepFlags& f) {
    ModelParams base = to_params(f.model);
    std::vector<std::pair<Rational, Rational>> grid;
    for (const auto& a : f.ta_values)
        for (const auto& b : f.tb_values)
            grid.emplace_back(Rational::parse(a), Rational::parse(b));
    RunOptions options;
    options.max_stages = f.max_stages;
    const auto cells = sweep_phase(grid, base, f.seeds_per_cell, f.seed, f.epsilon, options, f.jobs);

    const fs::path dir = prepare_out_dir(f.out_dir);
    const std::string stem = "sweep_d" + std::to_string(base.dim) + "_n" + std::to_string(base.n) + "_w" +
                             std::to_string(base.w) + "_seed" + std::to_string(f.seed) + "_k" +
                             std::to_string(f.seeds_per_cell);
    OutputFile csv(dir / (stem + ".csv"));
    write_sweep_csv(csv.stream(), cells);
    csv.commit();

    nlohmann::json j;
    j["version"] = kVersion;
    j["dim"] = base.dim;
    j["n"] = base.n;
    j["w"] = base.w;
    j["master_seed"] = f.seed;
    j["seeds_per_cell"] = f.seeds_per_cell;
    j["epsilon"] = f.epsilon;
    j["tau_alpha_values"] = f.ta_values;
    j["tau_beta_values"] = f.tb_values;
    write_json(dir / (stem + ".json"), j);
    std::cout << "cells " << cells.size() << "\nwrote " << (dir / (stem + ".csv")).string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- thresholds

int cmd_thresholds(const std::string& output) {
    std::ostringstream s;
    s << std::setprecision(12);
    const auto k2 = math::kappa_2d();
    const auto k3 = math::kappa_3d();
    s << "constant,value,residual\n";
    s << "kappa," << k2.value << ',' << k2.residual << '\n';
    s << "kappa_star," << k3.value << ',' << k3.residual << '\n';
    s << '\n' << "tau_alpha,min_gap_2d,min_gap_3d\n";
    for (double t : {0.39, 0.40, 0.41, 0.42, 0.43, 0.45, 0.47, 0.49})
        s << t << ',' << math::min_gap(t, math::Relation::TwoD) << ',' << math::min_gap(t, math::Relation::ThreeD)
          << '\n';
    if (output.empty()) {
        std::cout << s.str();
    } else {
        OutputFile f(output);
        f.stream() << s.str();
        f.commit();
    }
    return 0;
}

// ---------------------------------------------------------------- events

struct EventFlags {
    std::string kind = "uh";
    std::string type = "alpha";
    std::string tau;
    std::string gamma;
    int directions = 360;
    int w = 1;
    int dim = 2;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    int jobs = 1;
    int scan_n = 0;
    std::string out_dir;
};

int cmd_events(const EventFlags& f) {
    const auto kind = parse_event_kind(f.kind);
    if (!kind)
        throw UsageError("unknown event kind '" + f.kind + "'");
    EventSpec spec;
    spec.kind = *kind;
    spec.type = f.type == "beta" ? NodeType::Beta : NodeType::Alpha;
    spec.tau = Rational::parse(f.tau);
    if (!f.gamma.empty())
        spec.gamma = Rational::parse(f.gamma);
    spec.directions = f.directions;
    try {
        spec.validate();
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    if (!event_supports_dim(spec.kind, f.dim))
        throw UsageError("event " + f.kind + " is not defined in dimension " + std::to_string(f.dim));

    const EventEstimate e = estimate_event_prob(spec, f.w, f.dim, f.trials, f.seed, f.jobs);
    nlohmann::json j;
    j["version"] = kVersion;
    j["kind"] = f.kind;
    j["type"] = f.type;
    j["tau"] = spec.tau.to_string();
    if (spec.gamma)
        j["gamma"] = spec.gamma->to_string();
    j["w"] = f.w;
    j["dim"] = f.dim;
    j["seed"] = f.seed;
    j["trials"] = e.trials;
    j["hits"] = e.hits;
    j["estimate"] = e.estimate;
    j["ci95"] = {e.ci95.lo, e.ci95.hi};
    try {
        j["exact"] = math::prob_event_exact(spec.kind, f.w, spec.tau, f.dim);
    } catch (const math::DomainError&) {
        j["exact"] = nullptr;
    }
    std::cout << j.dump(2) << '\n';

    if (f.scan_n > 0) {
        ModelParams p;
        p.dim = f.dim;
        p.n = f.scan_n;
        p.w = f.w;
        p.tau_alpha = p.tau_beta = spec.tau;
        try {
            p.validate();
        } catch (const ParameterError& err) {
            throw UsageError(err.what());
        }
        const Configuration c = random_config(p, f.seed);
        std::vector<NodeId> nodes(c.size());
        for (NodeId i = 0; i < c.size(); ++i)
            nodes[i] = i;
        const fs::path dir = prepare_out_dir(f.out_dir);
        const fs::path path = dir / ("events_" + f.kind + "_" + params_stem(p) + "_seed" + std::to_string(f.seed) +
                                     ".csv");
        OutputFile out(path);
        write_event_scan_csv(out.stream(), c, nodes, {spec});
        out.commit();
        std::cout << "wrote " << path.string() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- structures

struct StructureFlags {
    ModelFlags model;
    std::string gamma = "0.55";
    int r_max = 64;
    bool plant = false;
    int radius = 0;
    std::uint64_t seed = 1;
    std::string out_dir;
};

int cmd_structures(const StructureFlags& f) {
    const Rational tau_beta = Rational::parse(f.model.tau_beta.empty() ? "0.4" : f.model.tau_beta);
    const double gamma = Rational::parse(f.gamma).to_double();
    if (!(gamma > 0.5 && gamma < 1.0))
        throw UsageError("gamma must lie in (0.5, 1)");

    std::cout << "r,interior_ok,boundary_ok\n";
    const auto r_star = find_min_r(f.model.w, tau_beta, gamma, f.r_max);
    const int shown = r_star ? std::min(f.r_max, *r_star + 3) : f.r_max;
    for (int r = 1; r <= shown; ++r) {
        const DaggerReport d = check_dagger(r, f.model.w, tau_beta, gamma);
        std::cout << r << ',' << d.a << ',' << d.b << '\n';
    }
    std::cout << "r_star," << (r_star ? std::to_string(*r_star) : "none") << '\n';
    if (!f.plant)
        return 0;

    if (f.model.n == 0)
        throw UsageError("--plant needs --n");
    ModelFlags m = f.model;
    if (m.tau_alpha.empty())
        m.tau_alpha = "0.6";
    if (m.tau_beta.empty())
        m.tau_beta = "0.4";
    const ModelParams params = to_params(m);
    if (params.dim != 2)
        throw UsageError("--plant supports dim 2 only");
    int radius = f.radius;
    if (radius == 0) {
        if (!r_star)
            throw UsageError("no r in [1, r-max] satisfies the disc conditions; pass --radius");
        radius = *r_star * params.w;
    }
    const Coord centre{params.n / 2, params.n / 2, 0};
    Region disc = [&] {
        try {
            return Region::disc(params, centre, Rational(radius, 1));
        } catch (const ParameterError& e) {
            throw UsageError(e.what());
        }
    }();
    const PlantResult r = plant_and_run(params, disc, NodeType::Beta, f.seed);

    nlohmann::json j;
    j["version"] = kVersion;
    j["params"] = params_json(params);
    j["seed"] = f.seed;
    j["gamma"] = f.gamma;
    j["plant_radius"] = radius;
    j["centre"] = {centre.x, centre.y};
    j["terminated"] = r.run.terminated;
    j["stages"] = r.run.reports.size();
    j["final_beta_fraction"] = 1.0 - alpha_fraction(r.run.final);
    j["plant_preserved"] = r.plant_preserved;
    j["radius_trace"] = r.radius_trace;
    const fs::path dir = prepare_out_dir(f.out_dir);
    const fs::path path = dir / ("plant_" + params_stem(params) + "_r" + std::to_string(radius) + "_seed" +
                                 std::to_string(f.seed) + ".json");
    write_json(path, j);
    std::cout << "plant radius " << radius << ", stages " << r.run.reports.size() << ", final beta fraction "
              << 1.0 - alpha_fraction(r.run.final) << "\nwrote " << path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- oracle-check

int cmd_oracle(int instances, int n, std::uint64_t seed) {
    int agree = 0;
    for (int i = 0; i < instances; ++i) {
        const OracleInstance inst = oracle_instance(n, seed, static_cast<std::uint64_t>(i));
        const OracleReport r = compare_with_reference(random_config(inst.params, inst.seed));
        if (r.agree) {
            ++agree;
        } else {
            std::cout << "mismatch: instance " << i << " " << params_stem(inst.params) << " seed " << inst.seed
                      << " stage " << r.first_mismatch_stage << '\n';
        }
    }
    std::cout << "oracle-check: " << agree << "/" << instances << " instances identical at every stage\n";
    return agree == instances ? 0 : 1;
}

// Expands `--config FILE` into `--key=value` tokens placed before the other
// flags of the subcommand, so explicit flags take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> from_file, rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw UsageError("--config needs a file");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
            continue;
        }
        for (const auto& [k, v] : read_config_file(path))
            from_file.push_back("--" + k + "=" + v);
    }
    if (from_file.empty())
        return rest;
    if (rest.empty() || rest[0].rfind("-", 0) == 0)
        throw UsageError("--config must follow a subcommand");
    std::vector<std::string> out{rest[0]};
    out.insert(out.end(), from_file.begin(), from_file.end());
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Staged Schelling segregation dynamics on the 2D and 3D torus"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    const std::string out_default = default_out_dir();
    std::string config_path;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "file of 'key = value' lines; flags override it");
    };
    auto add_out = [&](CLI::App* sub, std::string& target) {
        target = out_default;
        sub->add_option("--out-dir", target, "output directory (default $SCHELLING_OUT_DIR or ./out)");
    };

    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "run the process from random initial configurations");
    add_config(simulate);
    add_geometry(simulate, sim.model);
    add_taus(simulate, sim.model);
    simulate->add_option("--seed", sim.seed, "initial configuration seed")->capture_default_str();
    simulate->add_option("--runs", sim.runs, "independent runs (seeds derived from --seed)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_option("--max-stages", sim.max_stages, "stage cap (0 = 4n)")->capture_default_str();
    simulate->add_option("--order", sim.order, "node order within a stage")
        ->check(CLI::IsMember({"lexicographic", "random"}))
        ->capture_default_str();
    simulate->add_option("--order-seed", sim.order_seed, "seed of the random order")->capture_default_str();
    simulate->add_option("--epsilon", sim.epsilon, "classifier tolerance")
        ->check(CLI::Range(1e-9, 0.5 - 1e-9))
        ->capture_default_str();
    simulate->add_flag("--ppm,!--no-ppm", sim.ppm, "write PPM snapshots");
    simulate->add_option("--snapshot-every", sim.snapshot_every, "stages between snapshots")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_flag("--embed-final", sim.embed_final, "embed the final configuration in the JSON record");
    simulate->add_option("--jobs", sim.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    add_out(simulate, sim.out_dir);

    SweepFlags sw;
    auto* sweep = app.add_subcommand("sweep", "phase-diagram sweep over intolerance pairs");
    add_config(sweep);
    add_geometry(sweep, sw.model);
    sweep->add_option("--tau-alpha-values", sw.ta_values, "comma separated")
        ->required()
        ->delimiter(',')
        ->check(kTau)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sweep->add_option("--tau-beta-values", sw.tb_values, "comma separated")
        ->required()
        ->delimiter(',')
        ->check(kTau)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sweep->add_option("--seeds-per-cell", sw.seeds_per_cell)->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--seed", sw.seed, "master seed")->capture_default_str();
    sweep->add_option("--epsilon", sw.epsilon)->check(CLI::Range(1e-9, 0.5 - 1e-9))->capture_default_str();
    sweep->add_option("--max-stages", sw.max_stages, "stage cap (0 = 4n)")->capture_default_str();
    sweep->add_option("--jobs", sw.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    add_out(sweep, sw.out_dir);

    std::string thresholds_output;
    auto* thresholds = app.add_subcommand("thresholds", "print kappa, kappa_star and the minimal-gap table");
    add_config(thresholds);
    thresholds->add_option("--output", thresholds_output, "write to a file instead of stdout");

    EventFlags ev;
    auto* events = app.add_subcommand("events", "Monte Carlo estimate of a threshold event");
    add_config(events);
    events->add_option("--kind", ev.kind, "uh ruh ln rn pn ju rju euh eju pn3d")->capture_default_str();
    events->add_option("--type", ev.type)->check(CLI::IsMember({"alpha", "beta"}))->capture_default_str();
    events->add_option("--tau", ev.tau)->required()->check(kTau);
    events->add_option("--gamma", ev.gamma, "pn and pn3d only");
    events->add_option("--directions", ev.directions)->check(CLI::PositiveNumber)->capture_default_str();
    events->add_option("--w", ev.w)->check(CLI::PositiveNumber)->capture_default_str();
    events->add_option("--dim", ev.dim)->check(CLI::IsMember({2, 3}))->capture_default_str();
    events->add_option("--trials", ev.trials)->check(CLI::PositiveNumber)->capture_default_str();
    events->add_option("--seed", ev.seed)->capture_default_str();
    events->add_option("--jobs", ev.jobs)->check(CLI::PositiveNumber)->capture_default_str();
    events->add_option("--scan", ev.scan_n, "also write a per-node CSV for a random torus of this side");
    add_out(events, ev.out_dir);

    StructureFlags st;
    auto* structures = app.add_subcommand("structures", "disc conditions and planted firewall runs");
    add_config(structures);
    add_geometry(structures, st.model, false);
    structures->add_option("--tau-alpha", st.model.tau_alpha)->check(kTau);
    structures->add_option("--tau-beta", st.model.tau_beta, "default 0.4")->check(kTau);
    structures->add_option("--gamma", st.gamma)->capture_default_str();
    structures->add_option("--r-max", st.r_max)->check(CLI::PositiveNumber)->capture_default_str();
    structures->add_flag("--plant", st.plant, "plant a beta disc and run");
    structures->add_option("--radius", st.radius, "plant radius (default r_star * w)");
    structures->add_option("--seed", st.seed)->capture_default_str();
    add_out(structures, st.out_dir);

    int oracle_instances = 100, oracle_n = 20;
    std::uint64_t oracle_seed = 1;
    auto* oracle = app.add_subcommand("oracle-check", "compare the fast engine with the naive engine");
    add_config(oracle);
    oracle->add_option("--instances", oracle_instances)->check(CLI::PositiveNumber)->capture_default_str();
    oracle->add_option("--n", oracle_n)->check(CLI::Range(7, 60))->capture_default_str();
    oracle->add_option("--seed", oracle_seed)->capture_default_str();

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*simulate)
            return cmd_simulate(sim);
        if (*sweep)
            return cmd_sweep(sw);
        if (*thresholds)
            return cmd_thresholds(thresholds_output);
        if (*events)
            return cmd_events(ev);
        if (*structures)
            return cmd_structures(st);
        if (*oracle)
            return cmd_oracle(oracle_instances, oracle_n, oracle_seed);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
