#ifndef GAPSCHED_WORKLOAD_HPP
#define GAPSCHED_WORKLOAD_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gapsched/model.hpp"
#include "gapsched/random.hpp"

namespace gapsched {

template <class T>
struct Range {
    T lo{};
    T hi{};

    bool operator==(const Range&) const = default;
};

enum class SubmitModel { AllZero, Uniform };

/// Physical constants shared by every generated node.
struct HostProfile {
    double v_max = 1.2;
    double f_max = 1e9;
    double activity = 0.5;
    double load_cap = 2e-9;
    double static_power = 0.0;
    double vm_ram = 256.0;
    double vm_bandwidth = 1000.0;
    // Host-level values, carried for reference only.
    double host_ram = 2048.0;
    double host_bandwidth = 10000.0;

    bool operator==(const HostProfile&) const = default;
};

struct WorkloadSpec {
    int n_tasks = 0;
    int n_vms = 0;
    Range<std::int64_t> length{1000, 2000};
    Range<std::int64_t> mips{1000, 2000};
    Range<int> npe{1, 8};
    Range<int> vm_npe{1, 8};
    /// deadline = submit + (length / mips.lo) * slack, slack ~ U(slack_factor)
    Range<double> slack_factor{1.5, 4.0};
    SubmitModel submit_model = SubmitModel::AllZero;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    HostProfile host;
    // Sweep bookkeeping.
    std::string scenario;
    int scenario_index = 0;
    int seed_index = 0;

    bool operator==(const WorkloadSpec&) const = default;
};

/// Default ranges with the given counts.
inline WorkloadSpec sized_workload(int n_tasks, int n_vms, std::uint64_t seed = 0) {
    WorkloadSpec w;
    w.n_tasks = n_tasks;
    w.n_vms = n_vms;
    w.seed = seed;
    return w;
}

inline std::vector<ValidationError> workload_errors(const WorkloadSpec& s) {
    std::vector<ValidationError> out;
    auto err = [&](const char* f, const char* m) { out.push_back({"workload", -1, f, m}); };
    if (s.n_tasks < 0) err("n_tasks", "n_tasks must be non-negative");
    if (s.n_vms < 0) err("n_vms", "n_vms must be non-negative");
    if (s.length.lo > s.length.hi || s.length.lo <= 0) err("length", "length range must be non-empty and positive");
    if (s.mips.lo > s.mips.hi || s.mips.lo <= 0) err("mips", "mips range must be non-empty and positive");
    if (s.npe.lo > s.npe.hi || s.npe.lo < 1 || s.npe.hi > 8) err("npe", "npe range must be non-empty within [1, 8]");
    if (s.vm_npe.lo > s.vm_npe.hi || s.vm_npe.lo < 1 || s.vm_npe.hi > 64)
        err("vm_npe", "vm_npe range must be non-empty within [1, 64]");
    if (s.slack_factor.lo > s.slack_factor.hi || !(s.slack_factor.lo > 0))
        err("slack_factor", "slack_factor range must be non-empty and positive");
    if (s.submit_model == SubmitModel::Uniform && !(s.horizon >= 0)) err("horizon", "horizon must be non-negative");
    return out;
}

/// Draws an instance. Tasks and nodes come from separate streams so changing
/// one count leaves the other population untouched.
inline std::pair<std::vector<Task>, std::vector<FogNode>> generate(const WorkloadSpec& spec) {
    if (auto errs = workload_errors(spec); !errs.empty()) throw InvalidInstance(std::move(errs));
    Stream task_rng(derive_seed(spec.seed, {1}));
    Stream node_rng(derive_seed(spec.seed, {2}));

    std::vector<Task> tasks;
    tasks.reserve(static_cast<std::size_t>(spec.n_tasks));
    const double pessimistic_mips = static_cast<double>(spec.mips.lo);
    for (int i = 0; i < spec.n_tasks; ++i) {
        Task t;
        t.id = i;
        t.length = task_rng.integer(spec.length.lo, spec.length.hi);
        t.npe = static_cast<int>(task_rng.integer(spec.npe.lo, spec.npe.hi));
        const double submit = task_rng.uniform(0.0, spec.horizon);
        t.submit_time = spec.submit_model == SubmitModel::Uniform ? submit : 0.0;
        const double slack = task_rng.uniform(spec.slack_factor.lo, spec.slack_factor.hi);
        t.deadline = t.submit_time + static_cast<double>(t.length) / pessimistic_mips * slack;
        tasks.push_back(t);
    }

    std::vector<FogNode> nodes;
    nodes.reserve(static_cast<std::size_t>(spec.n_vms));
    for (int j = 0; j < spec.n_vms; ++j) {
        FogNode n;
        n.id = j;
        n.mips = static_cast<double>(node_rng.integer(spec.mips.lo, spec.mips.hi));
        n.npe_slots = static_cast<int>(node_rng.integer(spec.vm_npe.lo, spec.vm_npe.hi));
        n.bandwidth = spec.host.vm_bandwidth;
        n.ram = spec.host.vm_ram;
        n.v_max = spec.host.v_max;
        n.f_max = spec.host.f_max;
        n.activity = spec.host.activity;
        n.load_cap = spec.host.load_cap;
        n.static_power = spec.host.static_power;
        nodes.push_back(n);
    }
    return {std::move(tasks), std::move(nodes)};
}

inline constexpr int kSweepTaskCounts[] = {200, 400, 600, 800, 1000};
inline constexpr int kSweepVmCounts[] = {20, 50, 80, 100};

/// Task-count sweep at 100 VMs followed by the VM-count sweep at 1000 tasks,
/// `seeds` replicas each. Every spec's seed derives from
/// (master_seed, scenario_index, seed_index).
inline std::vector<WorkloadSpec> paper_sweep(std::uint64_t master_seed = 1, int seeds = 10,
                                             const WorkloadSpec& base = {}) {
    std::vector<std::pair<int, int>> shapes;
    for (int n : kSweepTaskCounts) shapes.emplace_back(n, 100);
    for (int m : kSweepVmCounts) shapes.emplace_back(1000, m);
    std::vector<WorkloadSpec> out;
    out.reserve(shapes.size() * static_cast<std::size_t>(seeds));
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        const bool task_axis = s < std::size(kSweepTaskCounts);
        for (int k = 0; k < seeds; ++k) {
            WorkloadSpec w = base;
            w.n_tasks = shapes[s].first;
            w.n_vms = shapes[s].second;
            w.scenario_index = static_cast<int>(s);
            w.seed_index = k;
            w.scenario = std::string(task_axis ? "tasks" : "vms") + "/t" + std::to_string(w.n_tasks) + "-v" +
                         std::to_string(w.n_vms);
            w.seed = derive_seed(master_seed, {static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(k)});
            out.push_back(std::move(w));
        }
    }
    return out;
}

}  // namespace gapsched

#endif  // GAPSCHED_WORKLOAD_HPP
