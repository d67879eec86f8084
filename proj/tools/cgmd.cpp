// Command-line experiment runner.
//
// Subcommands:
//   simulate   integrate the configured reduction, write trajectory + diagnostics CSV
//   reflect    wave-packet reflection experiment, write report JSON + energy CSV
//   kernel     memory-kernel traces near the interface, write CSV
//   stability  pencil eigenvalue audit, write JSON
//   sweep      run a list of configs, each into its own output directory
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>

#include "cgmd/cgmd.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;  // overrides config when nonempty
    std::optional<std::uint64_t> seed;
};

cgmd::ExperimentConfig load_config(const CommonArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) throw cgmd::config_error("cannot open config file: " + args.config_path);
    cgmd::json j;
    try {
        in >> j;
    } catch (const cgmd::json::exception& e) {
        throw cgmd::config_error(std::string("config parse error: ") + e.what());
    }
    cgmd::ExperimentConfig cfg = cgmd::parse_config(j);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed) cfg.initial.seed = *args.seed;
    return cfg;
}

void run_simulate(const cgmd::ExperimentConfig& cfg) {
    const cgmd::LatticeModel model = cgmd::make_model(cfg.model);
    const cgmd::BasisSet basis = cgmd::make_basis(model, cfg.basis);
    const cgmd::WavePacket init = cgmd::make_initial(model, cfg.initial);
    if (init.truncated)
        std::cerr << "warning: initial packet has significant amplitude outside the chain\n";
    const cgmd::AssembledSystem sys = cgmd::assemble_system(model, basis, cfg.reduction);
    auto [x0, w0] = cgmd::project_initial(model, basis, sys, init.u0, init.v0);

    cgmd::IntegratorConfig icfg;
    icfg.dt = cfg.dt;
    icfg.n_steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
    icfg.record_every = cfg.record_every;
    const cgmd::Trajectory traj = sys.full ? cgmd::verlet_integrate(model, x0, w0, icfg)
                                           : cgmd::verlet_integrate(sys.reduced, x0, w0, icfg);

    std::vector<cgmd::DiagnosticsRow> rows;
    for (int k = 0; k < traj.snapshots(); ++k) {
        const cgmd::RegionEnergy e = cgmd::region_wave_energy(
            model, traj.displacement(k), traj.velocity_field(k), basis.interface_atom());
        rows.push_back({traj.times[k], e.total, e.left, e.right});
    }
    const fs::path dir(cfg.out_dir);
    cgmd::write_trajectory_csv(dir / "trajectory.csv", model, traj);
    cgmd::write_diagnostics_csv(dir / "diagnostics.csv", rows);
}

void run_reflect(const cgmd::ExperimentConfig& cfg) {
    const cgmd::ReflectionResult result = cgmd::run_reflection_experiment(cfg);
    const fs::path dir(cfg.out_dir);
    auto out = cgmd::open_output(dir / "report.json");
    out << cgmd::reflection_report_json(result.report).dump(2) << '\n';
    cgmd::write_diagnostics_csv(dir / "energy.csv", result.diagnostics);
}

void run_kernel(const cgmd::ExperimentConfig& cfg) {
    const std::vector<cgmd::KernelRow> rows = cgmd::kernel_report(cfg);
    cgmd::write_kernel_csv(fs::path(cfg.out_dir) / "kernel.csv", rows);
}

void run_stability(const cgmd::ExperimentConfig& cfg) {
    auto out = cgmd::open_output(fs::path(cfg.out_dir) / "stability.json");
    out << cgmd::stability_report(cfg).dump(2) << '\n';
}

void dispatch(const cgmd::ExperimentConfig& cfg) {
    if (cfg.task == "simulate")
        run_simulate(cfg);
    else if (cfg.task == "reflect")
        run_reflect(cfg);
    else if (cfg.task == "kernel")
        run_kernel(cfg);
    else if (cfg.task == "stability")
        run_stability(cfg);
}

void run_sweep(const CommonArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) throw cgmd::config_error("cannot open sweep file: " + args.config_path);
    cgmd::json j;
    try {
        in >> j;
    } catch (const cgmd::json::exception& e) {
        throw cgmd::config_error(std::string("sweep parse error: ") + e.what());
    }
    if (!j.contains("configs") || !j.at("configs").is_array())
        throw cgmd::config_error("sweep file needs a 'configs' array");

    const fs::path base = args.out_dir.empty() ? fs::path("out") : fs::path(args.out_dir);
    const fs::path sweep_dir = fs::path(args.config_path).parent_path();
    std::vector<cgmd::ExperimentConfig> configs;
    for (const auto& entry : j.at("configs")) {
        const fs::path rel(entry.get<std::string>());
        CommonArgs sub;
        sub.config_path = (rel.is_absolute() ? rel : sweep_dir / rel).string();
        sub.seed = args.seed;
        cgmd::ExperimentConfig cfg = load_config(sub);
        cfg.out_dir = (base / rel.stem()).string();
        configs.push_back(std::move(cfg));
    }
    // independent runs, each owning its output directory
    std::vector<std::future<void>> jobs;
    for (const auto& cfg : configs)
        jobs.push_back(std::async(std::launch::async, [&cfg] { dispatch(cfg); }));
    for (auto& job : jobs) job.get();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coarse-grained molecular dynamics experiment runner"};
    app.require_subcommand(1);

    CommonArgs args;
    const char* names[] = {"simulate", "reflect", "kernel", "stability", "sweep"};
    const char* descs[] = {"integrate and write trajectory + diagnostics",
                           "wave-packet reflection experiment",
                           "memory-kernel traces near the interface",
                           "pencil stability audit",
                           "run a list of configs"};
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", args.config_path, "JSON config path")->required();
        sub->add_option("--out", args.out_dir, "output directory (overrides config)");
        sub->add_option("--seed", args.seed, "seed for randomized initial states");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "sweep") {
            run_sweep(args);
        } else {
            cgmd::ExperimentConfig cfg = load_config(args);
            cfg.task = sub;
            dispatch(cfg);
        }
    } catch (const cgmd::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
