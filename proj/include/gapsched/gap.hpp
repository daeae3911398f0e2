#ifndef GAPSCHED_GAP_HPP
#define GAPSCHED_GAP_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "gapsched/model.hpp"
#include "gapsched/power.hpp"
#include "gapsched/reliability.hpp"
#include "gapsched/slots.hpp"

namespace gapsched {

struct PayoffWeights {
    double slack = 1.0;
    double energy = 1.0;
};

struct GapOptions {
    PayoffWeights weights;
    DetectionMode detection = DetectionMode::Immediate;
};

/// A task player's reward for one (node, rho) choice. Infeasible sorts below
/// every finite value.
struct Payoff {
    bool feasible = false;
    double value = 0.0;
    double slack_norm = 0.0;
    double energy_norm = 0.0;

    static Payoff infeasible() { return {}; }

    friend bool operator<(const Payoff& a, const Payoff& b) {
        if (a.feasible != b.feasible) return !a.feasible;
        return a.feasible && a.value < b.value;
    }
    friend bool operator==(const Payoff& a, const Payoff& b) {
        return a.feasible == b.feasible && (!a.feasible || a.value == b.value);
    }
};

/// Seconds to run `task` on `node` at scale factor `rho`.
inline double exec_time(const Task& task, const FogNode& node, double rho) {
    return static_cast<double>(task.length) / (node.mips * rho);
}

/// Deadline order with (submit_time, id) tie-break.
inline bool edf_before(const Task& a, const Task& b) {
    return std::tie(a.deadline, a.submit_time, a.id) < std::tie(b.deadline, b.submit_time, b.id);
}

/// Earliest-deadline-first order, by heap sort.
inline std::vector<Task> edf_sort(std::vector<Task> tasks) {
    std::make_heap(tasks.begin(), tasks.end(), edf_before);
    std::sort_heap(tasks.begin(), tasks.end(), edf_before);
    return tasks;
}

/// Payoff of finishing `task` on `node` when it can start at `start`.
inline Payoff payoff_at(const Task& task, const FogNode& node, double rho, double start,
                        const PayoffWeights& w = {}) {
    const double exec = exec_time(task, node, rho);
    const double completion = start + exec;
    if (completion > task.deadline) return Payoff::infeasible();
    const double energy = run_energy(node, rho, exec);
    const double energy_full = run_energy(node, 1.0, exec_time(task, node, 1.0));
    Payoff p;
    p.feasible = true;
    p.slack_norm = (task.deadline - completion) / task.deadline;
    p.energy_norm = energy_full > 0 ? energy / energy_full : 0.0;
    p.value = w.slack * p.slack_norm - w.energy * p.energy_norm;
    return p;
}

/// A pending backup: where it may start, its remaining time budget, and the
/// node it must avoid (its primary's).
struct BackupRequest {
    TaskId task_id = 0;
    double ready = 0.0;
    double remaining = 0.0;
    std::optional<NodeId> exclude;
};

struct GapState {
    std::vector<Task> lt;
    std::map<TaskId, double> lct;
    std::vector<BackupRequest> backup_queue;
    std::map<TaskId, double> remaining;
    SlotBoard node_free;
    int cp = 0;
    int cb = 0;
    std::int64_t payoff_evaluations = 0;

    GapState() = default;
    explicit GapState(const std::vector<FogNode>& nodes) : node_free(nodes) {}
};

/// Payoff of `task` on node `node_pos` against the live slot state.
inline Payoff payoff(const Task& task, const std::vector<FogNode>& nodes, std::size_t node_pos, double rho,
                     const GapState& state, const PayoffWeights& w = {}) {
    const auto probe = state.node_free.probe(node_pos, task.npe, task.submit_time);
    if (!probe.fits) return Payoff::infeasible();
    return payoff_at(task, nodes[node_pos], rho, probe.start, w);
}

namespace detail {

struct Candidate {
    std::size_t node = 0;
    Payoff payoff;
    SlotProbe probe;
    double exec = 0.0;
    double energy = 0.0;
    std::size_t rank = 0;  // position in the node preference order
};

// Higher payoff, then lower energy, then earlier in the preference order.
inline bool better(const Candidate& a, const Candidate& b) {
    if (b.payoff < a.payoff) return true;
    if (a.payoff < b.payoff) return false;
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.rank < b.rank;
}

inline std::vector<std::size_t> by_id(const std::vector<FogNode>& nodes) {
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return nodes[a].id < nodes[b].id; });
    return order;
}

inline std::vector<std::size_t> by_power_desc(const std::vector<FogNode>& nodes) {
    auto order = by_id(nodes);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return nodes[a].mips > nodes[b].mips; });
    return order;
}

inline const Task& find_task(const std::vector<Task>& tasks, const std::map<TaskId, std::size_t>& pos, TaskId id) {
    return tasks[pos.at(id)];
}

}  // namespace detail

/// Phase one: each task (already in EDF order) takes the node with the best
/// finite payoff; tasks with none are queued for phase two.
inline void map_primaries(const std::vector<Task>& sorted, const std::vector<FogNode>& nodes, double rho,
                          GapState& state, Schedule& out, const GapOptions& opt = {}) {
    const auto order = detail::by_id(nodes);
    state.lt = sorted;
    for (const auto& task : sorted) {
        std::optional<detail::Candidate> best;
        for (std::size_t r = 0; r < order.size(); ++r) {
            const std::size_t n = order[r];
            const auto probe = state.node_free.probe(n, task.npe, task.submit_time);
            ++state.payoff_evaluations;
            if (!probe.fits) continue;
            detail::Candidate c;
            c.node = n;
            c.probe = probe;
            c.payoff = payoff_at(task, nodes[n], rho, probe.start, opt.weights);
            if (!c.payoff.feasible) continue;
            c.exec = exec_time(task, nodes[n], rho);
            c.energy = run_energy(nodes[n], rho, c.exec);
            c.rank = r;
            if (!best || detail::better(c, *best)) best = c;
        }
        if (best) {
            ScheduleEntry e;
            e.task_id = task.id;
            e.node_id = nodes[best->node].id;
            e.start = best->probe.start;
            e.exec_time = best->exec;
            e.completion = e.start + e.exec_time;
            e.rho = rho;
            e.phase = Phase::Primary;
            e.slot_mask = best->probe.mask;
            state.node_free.reserve(best->node, e.slot_mask, e.completion);
            state.lct[task.id] = e.completion;
            // Budget left for a backup if the primary faults; T_i is unknown
            // at planning time, so immediate detection assumes T_i = 0.
            const double detected = opt.detection == DetectionMode::Immediate ? e.start : e.completion;
            state.remaining[task.id] = task.deadline - detected;
            out.assignment[task.id] = e.node_id;
            out.entries.push_back(e);
        } else {
            state.remaining[task.id] = task.deadline - task.submit_time;
            state.backup_queue.push_back({task.id, task.submit_time, task.deadline - task.submit_time, std::nullopt});
            out.backup_list.push_back(task.id);
            ++state.cp;
        }
    }
    out.cp = state.cp;
}

/// Phase two: place queued backups, smallest remaining budget first, on
/// nodes other than the primary's, preferring faster nodes. A backup must
/// meet its deadline and fit inside its remaining budget; otherwise the
/// task is recorded as failed.
inline void map_backups(const std::vector<Task>& tasks, const std::vector<FogNode>& nodes, double rho,
                        GapState& state, Schedule& out, const std::map<TaskId, NodeId>& primary_assignment,
                        const GapOptions& opt = {}) {
    std::map<TaskId, std::size_t> pos;
    for (std::size_t i = 0; i < tasks.size(); ++i) pos.emplace(tasks[i].id, i);
    const auto order = detail::by_power_desc(nodes);

    auto queue = std::move(state.backup_queue);
    state.backup_queue.clear();
    std::stable_sort(queue.begin(), queue.end(), [](const BackupRequest& a, const BackupRequest& b) {
        return std::tie(a.remaining, a.task_id) < std::tie(b.remaining, b.task_id);
    });

    for (const auto& req : queue) {
        const Task& task = detail::find_task(tasks, pos, req.task_id);
        std::optional<NodeId> exclude = req.exclude;
        if (auto it = primary_assignment.find(req.task_id); it != primary_assignment.end()) exclude = it->second;

        std::optional<detail::Candidate> best;
        for (std::size_t r = 0; r < order.size(); ++r) {
            const std::size_t n = order[r];
            if (exclude && nodes[n].id == *exclude) continue;
            const auto probe = state.node_free.probe(n, task.npe, req.ready);
            ++state.payoff_evaluations;
            if (!probe.fits) continue;
            const double exec = exec_time(task, nodes[n], rho);
            if (!(req.remaining > exec)) continue;
            detail::Candidate c;
            c.node = n;
            c.probe = probe;
            c.payoff = payoff_at(task, nodes[n], rho, probe.start, opt.weights);
            if (!c.payoff.feasible) continue;
            c.exec = exec;
            c.energy = run_energy(nodes[n], rho, exec);
            c.rank = r;
            if (!best || detail::better(c, *best)) best = c;
        }
        if (best) {
            ScheduleEntry e;
            e.task_id = task.id;
            e.node_id = nodes[best->node].id;
            e.start = best->probe.start;
            e.exec_time = best->exec;
            e.completion = e.start + e.exec_time;
            e.rho = rho;
            e.phase = Phase::Backup;
            e.slot_mask = best->probe.mask;
            state.node_free.reserve(best->node, e.slot_mask, e.completion);
            state.lct[task.id] = e.completion;
            out.entries.push_back(e);
        } else {
            out.failed.push_back(task.id);
            ++state.cb;
        }
    }
    out.cb = state.cb;
}

/// One candidate schedule at a fixed scale factor.
inline Schedule gap_candidate(const std::vector<Task>& sorted, const std::vector<FogNode>& nodes, double rho,
                              const GapOptions& opt = {}) {
    GapState state(nodes);
    Schedule s;
    s.selected_rho = rho;
    map_primaries(sorted, nodes, rho, state, s, opt);
    map_backups(sorted, nodes, rho, state, s, s.assignment, opt);
    s.stats.candidates_built = 1;
    s.stats.payoff_evaluations = state.payoff_evaluations;
    return s;
}

/// Lexicographic score used to pick among DVFS candidates: (|Lf|, cp, energy).
inline std::tuple<std::size_t, int, double> candidate_score(const Schedule& s, const std::vector<FogNode>& nodes) {
    return {s.failed.size(), s.cp, schedule_energy(nodes, s.entries)};
}

/// Runs both mapping phases at every DVFS level and keeps the candidate with
/// the fewest failures, then fewest deferred primaries, then least energy.
/// Ties go to the lowest level.
inline Schedule gap_schedule(const std::vector<Task>& tasks, const std::vector<FogNode>& nodes, const DvfsConfig& dvfs,
                             const FaultModel& fm, const GapOptions& opt = {}) {
    validate_instance(Instance{tasks, nodes, dvfs, fm});
    const auto sorted = edf_sort(primary_tasks(tasks));
    std::optional<Schedule> best;
    std::tuple<std::size_t, int, double> best_score{};
    ScheduleStats total;
    for (double rho : dvfs.levels) {
        auto cand = gap_candidate(sorted, nodes, rho, opt);
        total.candidates_built += 1;
        total.payoff_evaluations += cand.stats.payoff_evaluations;
        auto score = candidate_score(cand, nodes);
        if (!best || score < best_score) {
            best = std::move(cand);
            best_score = score;
        }
    }
    best->stats = total;
    return *best;
}

/// GAP with DVFS disabled (full speed only).
inline Schedule wgap_schedule(const std::vector<Task>& tasks, const std::vector<FogNode>& nodes, const FaultModel& fm,
                              const GapOptions& opt = {}) {
    return gap_schedule(tasks, nodes, DvfsConfig{{1.0}}, fm, opt);
}

}  // namespace gapsched

#endif  // GAPSCHED_GAP_HPP
