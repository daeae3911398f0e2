// gapsim: run scheduling experiments and self-checks.
//
//   gapsim run --tasks 200 --vms 20 --algorithms gap,fcfs --out out/
//   gapsim run --sweep paper --seeds 10 --emit csv,svg
//   gapsim verify

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gapsched/gapsched.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvariant = 2, kIo = 3 };

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> seeds;
    std::vector<std::string> algorithms;
    std::optional<int> tasks;
    std::optional<int> vms;
    std::optional<std::string> out;
    std::vector<std::string> emit;
    std::string sweep;
    std::optional<std::string> instance;
    std::optional<double> lambda0;
    std::optional<std::string> detection;
    std::optional<unsigned> workers;
    std::string dump_instance;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON experiment config");
    cmd->add_option("--seed", o.seed, "master seed");
}

gapsched::ExperimentConfig resolve(const Overrides& o) {
    using namespace gapsched;
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.seeds) cfg.seeds = *o.seeds;
    if (!o.algorithms.empty()) cfg.algorithms = parse_algorithms(o.algorithms);
    if (o.tasks) cfg.workload.n_tasks = *o.tasks;
    if (o.vms) cfg.workload.n_vms = *o.vms;
    if (o.out) cfg.output_dir = *o.out;
    if (!o.emit.empty()) cfg.emit = parse_emit(o.emit);
    if (!o.sweep.empty()) {
        if (o.sweep != "paper") throw ConfigError("--sweep accepts only 'paper'");
        cfg.paper_sweep = true;
    }
    if (o.instance) cfg.instance_path = *o.instance;
    if (o.lambda0) cfg.fault_model.lambda0 = *o.lambda0;
    if (o.detection) {
        if (*o.detection == "immediate") cfg.gap.detection = DetectionMode::Immediate;
        else if (*o.detection == "at_completion") cfg.gap.detection = DetectionMode::AtCompletion;
        else throw ConfigError("--detection must be immediate or at_completion");
    }
    if (o.workers) cfg.workers = *o.workers;
    return cfg;
}

int cmd_run(const Overrides& o) {
    using namespace gapsched;
    const auto cfg = resolve(o);
    if (auto errs = config_errors(cfg); !errs.empty()) throw InvalidInstance(std::move(errs));
    if (!o.dump_instance.empty()) {
        const auto cells = build_cells(cfg);
        if (!cells.empty()) save_instance(cells.front().instance, o.dump_instance);
    }
    const auto res = run_experiment(cfg);
    std::cout << res.rows.size() << " runs written to " << cfg.output_dir << "\n";
    return kOk;
}

int cmd_verify(const Overrides& o) {
    using namespace gapsched;
    const auto cfg = resolve(o);
    const auto report = verify(cfg);
    print_report(std::cout, report);
    if (report.all_passed()) return kOk;
    for (const auto& c : report.checks)
        if (!c.passed) std::cerr << "gapsim: invariant violated: " << c.name << "\n";
    return kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fog task scheduling experiments (GAP, WGAP and baselines)"};
    app.require_subcommand(1);
    Overrides o;

    auto* run = app.add_subcommand("run", "schedule, simulate and report");
    add_common(run, o);
    run->add_option("--seeds", o.seeds, "replicas per scenario");
    run->add_option("--algorithms", o.algorithms, "gap,wgap,fcfs,sjf,rr,pso")->delimiter(',');
    run->add_option("--tasks", o.tasks, "tasks per generated instance");
    run->add_option("--vms", o.vms, "fog nodes per generated instance");
    run->add_option("--out", o.out, "output directory");
    run->add_option("--emit", o.emit, "csv,svg,trace")->delimiter(',');
    run->add_option("--sweep", o.sweep, "'paper' for the task/VM count sweep");
    run->add_option("--instance", o.instance, "JSON instance file instead of a generated workload");
    run->add_option("--lambda0", o.lambda0, "fault rate at full speed (per second)");
    run->add_option("--detection", o.detection, "immediate or at_completion");
    run->add_option("--workers", o.workers, "worker threads (0 = all cores)");
    run->add_option("--dump-instance", o.dump_instance, "also write the first generated instance here");

    auto* ver = app.add_subcommand("verify", "run the property and oracle checks");
    add_common(ver, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        return run->parsed() ? cmd_run(o) : cmd_verify(o);
    } catch (const gapsched::ConfigError& e) {
        std::cerr << "gapsim: " << e.what() << "\n";
        return kUsage;
    } catch (const gapsched::InvalidInstance& e) {
        std::cerr << "gapsim: " << e.what() << "\n";
        return kInvariant;
    } catch (const gapsched::IoError& e) {
        std::cerr << "gapsim: " << e.what() << "\n";
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "gapsim: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "gapsim: " << e.what() << "\n";
        return kInvariant;
    }
}
