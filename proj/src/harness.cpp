#include "adoptnet/harness.hpp"

#include "adoptnet/amplification.hpp"
#include "adoptnet/csv.hpp"
#include "adoptnet/dynamics.hpp"
#include "adoptnet/empirical.hpp"
#include "adoptnet/errors.hpp"
#include "adoptnet/feynman_kac.hpp"
#include "adoptnet/graph.hpp"
#include "adoptnet/intervention.hpp"
#include "adoptnet/jumps.hpp"
#include "adoptnet/presets.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace adoptnet::cli {

namespace {

namespace fs = std::filesystem;

// Flag values applied over the preset/config-file result; only flags the user
// actually passed are applied.
struct Overrides {
    std::optional<double> nu_s, nu_n, lambda_x, kappa, dt, t_end;
    std::optional<double> lambda0, lambda1, tau_star;
    std::optional<std::string> net;
    std::optional<int> n;
    std::optional<double> shock_intensity, shock_duration;
    std::optional<int> shock_nodes;
    std::optional<int> fk_paths;
    std::optional<double> fk_time;
    std::optional<std::uint64_t> seed;
};

struct SubOpts {
    std::string preset_name = "baseline";
    std::string config_path;
    std::string out;
    Overrides ov;
};

void add_common_options(CLI::App* sub, SubOpts& opts, const std::string& default_out) {
    opts.out = default_out;
    sub->add_option("--preset", opts.preset_name,
                    "parameter preset: baseline, fig1, fig2, fig3, table2")
        ->capture_default_str();
    sub->add_option("--config", opts.config_path, "JSON config file applied over the preset");
    sub->add_option("--out", opts.out, "output path")->capture_default_str();
    sub->add_option("--seed", opts.ov.seed, "base RNG seed");
    sub->add_option("--net", opts.ov.net, "network kind: random, scale_free, clustered");
    sub->add_option("--n", opts.ov.n, "number of nodes");
    sub->add_option("--nu-s", opts.ov.nu_s, "spatial diffusion rate");
    sub->add_option("--nu-n", opts.ov.nu_n, "relational diffusion rate");
    sub->add_option("--lambda-x", opts.ov.lambda_x, "cross-layer rate");
    sub->add_option("--kappa", opts.ov.kappa, "abandonment rate");
    sub->add_option("--dt", opts.ov.dt, "integration step");
    sub->add_option("--t-end", opts.ov.t_end, "horizon");
    sub->add_option("--lambda0", opts.ov.lambda0, "quiet-regime firing rate");
    sub->add_option("--lambda1", opts.ov.lambda1, "excited-regime firing rate");
    sub->add_option("--tau-star", opts.ov.tau_star, "critical-mass threshold");
    sub->add_option("--shock-intensity", opts.ov.shock_intensity, "pulse intensity per node");
    sub->add_option("--shock-duration", opts.ov.shock_duration, "pulse length");
    sub->add_option("--shock-nodes", opts.ov.shock_nodes, "number of targeted nodes");
}

RunConfig resolve_config(const SubOpts& opts) {
    RunConfig config = preset(opts.preset_name);
    if (!opts.config_path.empty()) config = load_config_file(opts.config_path, config);
    const Overrides& o = opts.ov;
    if (o.nu_s) config.model.nu_s = *o.nu_s;
    if (o.nu_n) config.model.nu_n = *o.nu_n;
    if (o.lambda_x) config.model.lambda_x = *o.lambda_x;
    if (o.kappa) config.model.kappa = *o.kappa;
    if (o.dt) config.model.dt = *o.dt;
    if (o.t_end) config.model.t_end = *o.t_end;
    if (o.lambda0) config.jumps.lambda0 = *o.lambda0;
    if (o.lambda1) config.jumps.lambda1 = *o.lambda1;
    if (o.tau_star) config.jumps.tau_star = *o.tau_star;
    if (o.net) config.net_kind = parse_network_kind(*o.net);
    if (o.n) config.n = *o.n;
    if (o.shock_intensity) config.shock.intensity = *o.shock_intensity;
    if (o.shock_duration) config.shock.duration = *o.shock_duration;
    if (o.shock_nodes) config.shock.node_count = *o.shock_nodes;
    if (o.fk_paths) config.fk_paths = *o.fk_paths;
    if (o.fk_time) config.fk_time = *o.fk_time;
    if (o.seed) config.seed = *o.seed;
    config.validate();
    return config;
}

void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& config, const std::vector<std::string>& outputs) {
    nlohmann::json manifest;
    manifest["schema_version"] = "1";
    manifest["command"] = command;
    manifest["config"] = nlohmann::json::parse(config_to_json(config));
    manifest["config_hash"] = config_hash(config);
    manifest["seed"] = config.seed;
    manifest["outputs"] = outputs;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    out << manifest.dump(2) << "\n";
}

std::vector<std::uint64_t> seed_range(std::uint64_t base, int count) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
    return seeds;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

struct Instance {
    SpatialNetwork net;
    OperatorSet ops;
};

Instance build_instance(const RunConfig& config) {
    Instance inst{build_network(config), {}};
    inst.ops = build_operators(inst.net, config.kernel());
    return inst;
}

int cmd_simulate(const SubOpts& opts) {
    RunConfig config = resolve_config(opts);
    Instance inst = build_instance(config);
    AmplificationReport report = build_report(inst.ops, config.model);
    SourceSchedule schedule = shock_schedule(report, config.shock);
    Eigen::VectorXd tau0 = Eigen::VectorXd::Zero(inst.net.n);
    Trajectory traj =
        simulate_jump_diffusion(inst.ops, config.model, config.jumps, schedule, tau0, config.seed);
    RegimeReport regime = regime_summary(traj, config.jumps);

    ensure_dir(opts.out);
    write_trajectory_csv(traj, opts.out + "/trajectory.csv");
    write_events_csv(traj, opts.out + "/events.csv");
    write_manifest(opts.out + "/manifest.json", "simulate", config,
                   {"trajectory.csv", "events.csv"});

    std::cout << "simulate: n=" << inst.net.n << " t_end=" << config.model.t_end
              << " terminal_mean=" << traj.final_mean() << " events=" << traj.events.size()
              << (regime.crossed ? " crossed_at=" + std::to_string(regime.crossing_time)
                                 : std::string(" never_crossed"))
              << "\noutputs in " << opts.out << "\n";
    return 0;
}

int cmd_amplify(const SubOpts& opts) {
    RunConfig config = resolve_config(opts);
    Instance inst = build_instance(config);
    AmplificationReport report = build_report(inst.ops, config.model);
    write_amplification_csv(report, opts.out);
    write_manifest(opts.out + ".manifest.json", "amplify", config, {opts.out});

    const std::vector<int> top = report.top_nodes(std::min(5, inst.net.n));
    std::cout << "amplify: n=" << inst.net.n << " mean_total=" << report.mean_total()
              << " top_nodes=";
    for (std::size_t i = 0; i < top.size(); ++i) std::cout << (i ? "," : "") << top[i];
    std::cout << "\nwrote " << opts.out << "\n";
    return 0;
}

int cmd_fk_validate(const SubOpts& opts) {
    RunConfig config = resolve_config(opts);
    Instance inst = build_instance(config);
    WalkGenerator gen = make_walk_generator(inst.ops, config.model);
    AmplificationReport report = build_report(inst.ops, config.model);
    SourceSchedule schedule = shock_schedule(report, config.shock);
    Eigen::VectorXd tau0 = Eigen::VectorXd::Zero(inst.net.n);

    ModelParams ref = config.model;
    ref.t_end = config.fk_time;
    Trajectory pde = integrate(inst.ops, ref, schedule, tau0, /*clamp=*/false);
    const Eigen::VectorXd& reference = pde.final_state();

    csv::Writer writer(opts.out, {"node", "fk_estimate", "se", "pde_value"});
    double worst_gap = 0.0;
    for (int node = 0; node < inst.net.n; ++node) {
        FkEstimate est = estimate(gen, config.model.kappa, schedule, tau0, node,
                                  config.fk_time, config.fk_paths, config.seed);
        writer.row({csv::format_double(node), csv::format_double(est.value),
                    csv::format_double(est.std_error), csv::format_double(reference[node])});
        if (est.std_error > 0.0)
            worst_gap = std::max(worst_gap,
                                 std::abs(est.value - reference[node]) / est.std_error);
    }
    write_manifest(opts.out + ".manifest.json", "fk-validate", config, {opts.out});

    std::cout << "fk-validate: n=" << inst.net.n << " paths=" << config.fk_paths
              << " t=" << config.fk_time << " worst |estimate-reference|/se=" << worst_gap
              << "\nwrote " << opts.out << "\n";
    return 0;
}

int cmd_intervene(const SubOpts& opts, int seed_count,
                  const std::vector<double>& durations_override) {
    RunConfig config = resolve_config(opts);
    if (!durations_override.empty()) {
        config.durations = durations_override;
        config.validate();
    }
    Instance inst = build_instance(config);
    AmplificationReport report = build_report(inst.ops, config.model);
    Eigen::VectorXd tau0 = Eigen::VectorXd::Zero(inst.net.n);
    std::vector<std::uint64_t> seeds = seed_range(config.seed, seed_count);

    std::vector<ShockOutcome> outcomes = run_duration_sweep(
        inst.ops, config.model, config.jumps, report, config.shock, config.durations, seeds, tau0);
    write_sweep_csv(outcomes, opts.out);
    write_manifest(opts.out + ".manifest.json", "intervene", config, {opts.out});

    std::cout << "intervene: " << seeds.size() << " seeds x " << config.durations.size()
              << " durations\n";
    for (const DurationSummary& s : summarize_durations(outcomes)) {
        ShockSpec spec = config.shock;
        spec.duration = s.duration;
        SourceSchedule schedule = shock_schedule(report, spec);
        ThresholdCheck check = threshold_check(report, config.jumps, schedule, tau0.mean());
        std::cout << "  duration=" << s.duration << " median_terminal=" << s.median_terminal
                  << " iqr=[" << s.lower_quartile << "," << s.upper_quartile << "]"
                  << " crossed_fraction=" << s.crossed_fraction
                  << " predicted_permanent=" << (check.predicted_permanent ? "yes" : "no")
                  << "\n";
    }
    std::cout << "wrote " << opts.out << "\n";
    return 0;
}

int cmd_montecarlo(const SubOpts& opts, int seed_count,
                   const std::vector<double>& intensities_override) {
    RunConfig config = resolve_config(opts);
    if (!intensities_override.empty()) {
        config.intensities = intensities_override;
        config.validate();
    }
    Instance inst = build_instance(config);
    AmplificationReport report = build_report(inst.ops, config.model);
    Eigen::VectorXd tau0 = Eigen::VectorXd::Zero(inst.net.n);
    std::vector<std::uint64_t> seeds = seed_range(config.seed, seed_count);

    std::vector<ShockOutcome> outcomes =
        run_shock_grid(inst.ops, config.model, config.jumps, report, config.shock,
                       config.intensities, seeds, tau0);
    write_shock_grid_csv(outcomes, opts.out);
    write_manifest(opts.out + ".manifest.json", "montecarlo", config, {opts.out});

    std::cout << "montecarlo: " << seeds.size() << " seeds x " << config.intensities.size()
              << " intensities\n";
    for (double intensity : config.intensities) {
        std::vector<double> terminals;
        double crossed = 0.0;
        for (const ShockOutcome& o : outcomes)
            if (o.shock_intensity == intensity) {
                terminals.push_back(o.terminal_mean);
                crossed += o.crossed ? 1.0 : 0.0;
            }
        if (terminals.empty()) continue;
        std::cout << "  intensity=" << intensity
                  << " median_terminal=" << stats::median(terminals)
                  << " crossed_fraction=" << crossed / static_cast<double>(terminals.size())
                  << "\n";
    }
    std::cout << "wrote " << opts.out << "\n";
    return 0;
}

int cmd_empirical(const SubOpts& opts, const std::string& panel_path,
                  const std::string& exposures_path) {
    RunConfig config = resolve_config(opts);
    auto [panel, net] = ingest(panel_path, exposures_path, config.kernel());
    PipelineResult result = run_pipeline(panel, std::move(net), config.model, config.kernel());

    ensure_dir(opts.out);
    write_regression_table(result.regressions, opts.out + "/regression_table.csv");
    write_group_report(result.groups, opts.out + "/group_report.csv");
    write_scurve_json(result, opts.out + "/scurve.json");
    write_manifest(opts.out + "/manifest.json", "empirical", config,
                   {"regression_table.csv", "group_report.csv", "scurve.json"});

    std::cout << "empirical: " << panel.size() << " institutions\n";
    for (const GroupStats& g : result.groups.groups)
        std::cout << "  " << to_string(g.group) << ": count=" << g.count
                  << " mean_days=" << g.mean_days
                  << " mean_amplification=" << g.mean_amplification
                  << " share=" << g.amplification_share << "\n";
    std::cout << "  spearman(days, amplification)=" << result.spearman_days_amp
              << " p=" << result.spearman_days_amp_p << "\n";
    std::cout << "  adoption curve: ceiling=" << result.scurve.ceiling
              << " steepness=" << result.scurve.steepness
              << " midpoint=" << result.scurve.midpoint << " days\n";
    std::cout << "outputs in " << opts.out << "\n";
    return 0;
}

int cmd_reductions() {
    bool all_pass = true;
    for (const ReductionCheck& check : run_reduction_checks()) {
        all_pass = all_pass && check.pass;
        std::cout << (check.pass ? "PASS" : "FAIL") << "  " << check.name << " — "
                  << check.detail << "\n";
    }
    if (!all_pass) {
        std::cerr << "numerical error: a limiting-case check failed\n";
        return 3;
    }
    return 0;
}

} // namespace

std::vector<ReductionCheck> run_reduction_checks() {
    std::vector<ReductionCheck> checks;
    std::ostringstream detail;

    // Stationary fixed point of the relational channel: the direct solve must
    // satisfy the per-node balance (kappa + nu_n d_i) tau_i = S_i +
    // nu_n sum_j w_ij tau_j.
    {
        SpatialNetwork net = generate_network(NetworkKind::random, 8,
                                              GeneratorParams{0.5, 2, 3}, 7);
        OperatorSet ops = build_operators(net, SpatialKernel::knn(3, 1.0));
        ModelParams params;
        params.nu_s = 0.0;
        params.nu_n = 0.8;
        params.lambda_x = 0.0;
        params.kappa = 0.15;
        Eigen::VectorXd source(net.n);
        for (int i = 0; i < net.n; ++i) source[i] = 0.05 + 0.01 * i;
        Eigen::VectorXd tau = steady_state(ops, params, source);
        Eigen::VectorXd degree = net.adjacency.rowwise().sum();
        double worst = 0.0;
        for (int i = 0; i < net.n; ++i) {
            double balance = (params.kappa + params.nu_n * degree[i]) * tau[i] - source[i] -
                             params.nu_n * net.adjacency.row(i).dot(tau);
            worst = std::max(worst, std::abs(balance));
        }
        detail.str("");
        detail << "max fixed-point residual " << worst << " (tolerance 1e-8)";
        checks.push_back({"steady-state fixed point", worst < 1e-8, detail.str()});
    }

    // Free decay halves in ln2/kappa regardless of the operators.
    {
        SpatialNetwork net = generate_network(NetworkKind::random, 8,
                                              GeneratorParams{0.5, 2, 3}, 7);
        OperatorSet ops = build_operators(net, SpatialKernel::knn(3, 1.0));
        bool pass = true;
        detail.str("");
        detail << "half-life vs ln2/kappa:";
        for (double kappa : {0.1, 0.15, 0.5}) {
            ModelParams params;
            params.nu_s = 0.0;
            params.nu_n = 0.0;
            params.lambda_x = 0.0;
            params.kappa = kappa;
            params.dt = 0.01;
            params.t_end = 2.0 * std::log(2.0) / kappa + 1.0;
            Eigen::VectorXd tau0 = Eigen::VectorXd::Constant(net.n, 0.8);
            Trajectory traj = integrate(ops, params, SourceSchedule{}, tau0);
            double crossing = traj.times.back();
            for (std::size_t k = 0; k < traj.step_count(); ++k)
                if (traj.mean_at(k) <= 0.4) {
                    crossing = traj.times[k];
                    break;
                }
            double expected = std::log(2.0) / kappa;
            double err = std::abs(crossing - expected);
            pass = pass && err <= params.dt + 1e-12;
            detail << " kappa=" << kappa << " err=" << err;
        }
        detail << " (tolerance one step)";
        checks.push_back({"free-decay half-life", pass, detail.str()});
    }

    // With all diffusion off, nodes evolve independently: perturbing one node
    // leaves every other node's path bitwise unchanged.
    {
        SpatialNetwork net = generate_network(NetworkKind::random, 8,
                                              GeneratorParams{0.5, 2, 3}, 7);
        OperatorSet ops = build_operators(net, SpatialKernel::knn(3, 1.0));
        ModelParams params;
        params.nu_s = 0.0;
        params.nu_n = 0.0;
        params.lambda_x = 0.0;
        params.kappa = 0.3;
        params.dt = 0.05;
        params.t_end = 2.0;
        Eigen::VectorXd tau0(net.n);
        for (int i = 0; i < net.n; ++i) tau0[i] = 0.1 + 0.08 * i;
        Eigen::VectorXd perturbed = tau0;
        perturbed[0] = std::min(1.0, tau0[0] + 0.17);
        Trajectory a = integrate(ops, params, SourceSchedule{}, tau0);
        Trajectory b = integrate(ops, params, SourceSchedule{}, perturbed);
        bool pass = true;
        for (std::size_t k = 0; k < a.step_count() && pass; ++k)
            for (int i = 1; i < net.n; ++i)
                if (a.states[k][i] != b.states[k][i]) {
                    pass = false;
                    break;
                }
        checks.push_back({"zero-diffusion independence", pass,
                          pass ? "perturbing one node left all others bitwise unchanged"
                               : "cross-node leakage detected with diffusion off"});
    }

    // On a complete graph a uniform state stays uniform and the mean follows
    // the scalar decay-plus-source equation.
    {
        const int n = 6;
        SpatialNetwork net;
        net.n = n;
        net.coords.resize(n, 2);
        for (int i = 0; i < n; ++i) {
            double angle = 2.0 * M_PI * i / n;
            net.coords(i, 0) = std::cos(angle);
            net.coords(i, 1) = std::sin(angle);
        }
        net.adjacency = Eigen::MatrixXd::Ones(n, n);
        net.adjacency.diagonal().setZero();
        net.spatial_weights = Eigen::MatrixXd::Zero(n, n);
        OperatorSet ops = build_operators(net, SpatialKernel::knn(3, 1.0));
        ModelParams params;
        params.nu_s = 0.4;
        params.nu_n = 0.6;
        params.lambda_x = 0.2;
        params.kappa = 0.15;
        params.dt = 0.01;
        params.t_end = 5.0;
        const double rate = 0.05;
        SourceSchedule source;
        std::vector<int> all_nodes(n);
        for (int i = 0; i < n; ++i) all_nodes[i] = i;
        source.add({0.0, params.t_end + 1.0, all_nodes, rate});
        Eigen::VectorXd tau0 = Eigen::VectorXd::Constant(n, 0.2);
        Trajectory traj = integrate(ops, params, source, tau0);
        double max_spread = 0.0;
        for (const Eigen::VectorXd& state : traj.states)
            max_spread = std::max(max_spread, state.maxCoeff() - state.minCoeff());
        const double level = rate / params.kappa;
        double expected = level + (0.2 - level) * std::exp(-params.kappa * params.t_end);
        double mean_err = std::abs(traj.final_mean() - expected);
        bool pass = max_spread <= 1e-12 && mean_err <= 5e-3;
        detail.str("");
        detail << "max cross-node spread " << max_spread << " (tolerance 1e-12), mean error "
               << mean_err << " vs scalar law (tolerance 5e-3)";
        checks.push_back({"complete-graph aggregate", pass, detail.str()});
    }

    return checks;
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"coupled spatial-network adoption dynamics toolkit"};
    app.name("adoptnet");
    app.require_subcommand(0, 1);

    SubOpts sim_opts, amp_opts, fk_opts, int_opts, mc_opts, emp_opts;
    int intervene_seeds = 50;
    int montecarlo_seeds = 50;
    std::vector<double> durations_override, intensities_override;
    std::string panel_path, exposures_path;

    CLI::App* sim = app.add_subcommand(
        "simulate", "run one jump-diffusion path and write the trajectory");
    add_common_options(sim, sim_opts, "simulate_out");

    CLI::App* amp = app.add_subcommand(
        "amplify", "closed-form amplification factors and channel decomposition");
    add_common_options(amp, amp_opts, "amp.csv");

    CLI::App* fk = app.add_subcommand(
        "fk-validate", "probabilistic estimates vs the deterministic solver at every node");
    add_common_options(fk, fk_opts, "fk.csv");
    fk->add_option("--paths", fk_opts.ov.fk_paths, "Monte Carlo paths per node");
    fk->add_option("--time", fk_opts.ov.fk_time, "evaluation time");

    CLI::App* intervene = app.add_subcommand(
        "intervene", "targeted-subsidy duration sweep over a seed ensemble");
    add_common_options(intervene, int_opts, "sweep.csv");
    intervene->add_option("--seeds", intervene_seeds, "ensemble size")->capture_default_str();
    intervene->add_option("--durations", durations_override, "pulse-length grid");

    CLI::App* mc = app.add_subcommand(
        "montecarlo", "shock-intensity grid over a seed ensemble");
    add_common_options(mc, mc_opts, "mc.csv");
    mc->add_option("--seeds", montecarlo_seeds, "ensemble size")->capture_default_str();
    mc->add_option("--intensities", intensities_override, "pulse-intensity grid");

    CLI::App* emp = app.add_subcommand(
        "empirical", "panel + exposure network analysis pipeline");
    add_common_options(emp, emp_opts, "report");
    emp->add_option("--panel", panel_path, "institution panel CSV")->required();
    emp->add_option("--exposures", exposures_path, "bilateral exposure CSV")->required();

    CLI::App* red = app.add_subcommand(
        "reductions", "limiting-case checks: fixed point, half-life, independence, aggregate");

    std::vector<std::string> argv_like = args;
    argv_like.insert(argv_like.begin(), "adoptnet");
    std::vector<const char*> argv_ptrs;
    argv_ptrs.reserve(argv_like.size());
    for (const std::string& arg : argv_like) argv_ptrs.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(argv_ptrs.size()), argv_ptrs.data());
        if (app.get_subcommands().empty()) {
            std::cout << app.help();
            return 0;
        }
        if (sim->parsed()) return cmd_simulate(sim_opts);
        if (amp->parsed()) return cmd_amplify(amp_opts);
        if (fk->parsed()) return cmd_fk_validate(fk_opts);
        if (intervene->parsed())
            return cmd_intervene(int_opts, intervene_seeds, durations_override);
        if (mc->parsed()) return cmd_montecarlo(mc_opts, montecarlo_seeds, intensities_override);
        if (emp->parsed()) return cmd_empirical(emp_opts, panel_path, exposures_path);
        if (red->parsed()) return cmd_reductions();
        std::cout << app.help();
        return 0;
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

} // namespace adoptnet::cli
