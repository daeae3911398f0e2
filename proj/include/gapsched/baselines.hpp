#ifndef GAPSCHED_BASELINES_HPP
#define GAPSCHED_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <tuple>
#include <vector>

#include "gapsched/gap.hpp"
#include "gapsched/model.hpp"
#include "gapsched/power.hpp"
#include "gapsched/random.hpp"
#include "gapsched/slots.hpp"

// Comparison schedulers. All run at full speed, emit one primary entry per
// task and never refuse a task for its deadline; misses show up in the
// metrics. A task whose npe exceeds every node's slot count cannot run
// anywhere and is reported as failed.

namespace gapsched {

struct PsoConfig {
    int swarm_size = 30;
    int iterations = 100;
    double w = 0.7;
    double c1 = 1.5;
    double c2 = 1.5;
    /// Joules per missed deadline; when unset, 10x the largest single-task
    /// full-speed energy of the instance.
    std::optional<double> penalty;
};

inline std::vector<ValidationError> pso_config_errors(const PsoConfig& c) {
    std::vector<ValidationError> out;
    auto err = [&](const char* f, const char* m) { out.push_back({"pso", -1, f, m}); };
    if (c.swarm_size < 2) err("swarm_size", "swarm_size must be at least 2");
    if (c.iterations < 1) err("iterations", "iterations must be at least 1");
    if (!(c.w >= 0 && c.w <= 1)) err("w", "w must lie in [0, 1]");
    if (!(c.c1 > 0)) err("c1", "c1 must be positive");
    if (!(c.c2 > 0)) err("c2", "c2 must be positive");
    if (c.penalty && !(*c.penalty > 0)) err("penalty", "penalty must be positive");
    return out;
}

namespace detail {

inline std::vector<Task> fcfs_order(std::vector<Task> tasks) {
    std::sort(tasks.begin(), tasks.end(),
              [](const Task& a, const Task& b) { return std::tie(a.submit_time, a.id) < std::tie(b.submit_time, b.id); });
    return tasks;
}

inline ScheduleEntry place(SlotBoard& board, const Task& t, const std::vector<FogNode>& nodes, std::size_t n,
                           const SlotProbe& probe) {
    ScheduleEntry e;
    e.task_id = t.id;
    e.node_id = nodes[n].id;
    e.start = probe.start;
    e.exec_time = exec_time(t, nodes[n], 1.0);
    e.completion = e.start + e.exec_time;
    e.rho = 1.0;
    e.phase = Phase::Primary;
    e.slot_mask = probe.mask;
    board.reserve(n, e.slot_mask, e.completion);
    return e;
}

/// List scheduling onto the node with the earliest feasible start
/// (ties to the lower node id).
inline Schedule earliest_start(const std::vector<Task>& ordered, const std::vector<FogNode>& nodes) {
    const auto order = by_id(nodes);
    SlotBoard board(nodes);
    Schedule s;
    for (const auto& t : ordered) {
        std::optional<std::pair<std::size_t, SlotProbe>> best;
        for (std::size_t n : order) {
            auto p = board.probe(n, t.npe, t.submit_time);
            if (p.fits && (!best || p.start < best->second.start)) best.emplace(n, p);
        }
        if (!best) {
            s.failed.push_back(t.id);
            continue;
        }
        auto e = place(board, t, nodes, best->first, best->second);
        s.assignment[t.id] = e.node_id;
        s.entries.push_back(e);
    }
    s.cb = static_cast<int>(s.failed.size());
    return s;
}

/// Sequences `ordered` onto a fixed node choice per task (positions into
/// `nodes`, aligned with `ordered`). Returns the schedule.
inline Schedule sequence(const std::vector<Task>& ordered, const std::vector<FogNode>& nodes,
                         const std::vector<std::size_t>& choice) {
    SlotBoard board(nodes);
    Schedule s;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const auto& t = ordered[i];
        auto p = board.probe(choice[i], t.npe, t.submit_time);
        if (!p.fits) {
            s.failed.push_back(t.id);
            continue;
        }
        auto e = place(board, t, nodes, choice[i], p);
        s.assignment[t.id] = e.node_id;
        s.entries.push_back(e);
    }
    s.cb = static_cast<int>(s.failed.size());
    return s;
}

/// Nearest node position (by distance, lower first) whose slots fit `npe`.
inline std::optional<std::size_t> nearest_fit(const std::vector<FogNode>& by_pos, std::size_t want, int npe) {
    const std::size_t m = by_pos.size();
    for (std::size_t dist = 0; dist < m; ++dist) {
        if (want >= dist && by_pos[want - dist].npe_slots >= npe) return want - dist;
        if (dist > 0 && want + dist < m && by_pos[want + dist].npe_slots >= npe) return want + dist;
    }
    return std::nullopt;
}

}  // namespace detail

inline Schedule fcfs_schedule(const std::vector<Task>& tasks, const std::vector<FogNode>& nodes) {
    return detail::earliest_start(detail::fcfs_order(primary_tasks(tasks)), nodes);
}

inline Schedule sjf_schedule(const std::vector<Task>& tasks, const std::vector<FogNode>& nodes) {
    auto ordered = primary_tasks(tasks);
    std::sort(ordered.begin(), ordered.end(),
              [](const Task& a, const Task& b) { return std::tie(a.length, a.id) < std::tie(b.length, b.id); });
    return detail::earliest_start(ordered, nodes);
}

/// Cyclic node choice by task index; a node too small for the task passes
/// the turn to the next one that fits.
inline Schedule rr_schedule(const std::vector<Task>& tasks, const std::vector<FogNode>& nodes) {
    const auto ordered = detail::fcfs_order(primary_tasks(tasks));
    const auto order = detail::by_id(nodes);
    const std::size_t m = order.size();
    std::vector<std::size_t> choice(ordered.size(), 0);
    for (std::size_t i = 0; i < ordered.size() && m > 0; ++i) {
        choice[i] = order[i % m];
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t n = order[(i + k) % m];
            if (nodes[n].npe_slots >= ordered[i].npe) {
                choice[i] = n;
                break;
            }
        }
    }
    if (m == 0) {
        Schedule s;
        for (const auto& t : ordered) s.failed.push_back(t.id);
        s.cb = static_cast<int>(s.failed.size());
        return s;
    }
    return detail::sequence(ordered, nodes, choice);
}

/// Default miss penalty: 10x the largest single-task full-speed energy.
inline double default_pso_penalty(const std::vector<Task>& tasks, const std::vector<FogNode>& nodes) {
    double worst = 0.0;
    for (const auto& t : tasks)
        for (const auto& n : nodes) worst = std::max(worst, run_energy(n, 1.0, exec_time(t, n, 1.0)));
    return worst > 0 ? 10.0 * worst : 1.0;
}

/// Fitness used by the swarm: full-speed energy plus a penalty per missed
/// deadline and per task that could not be placed.
inline double pso_fitness(const Schedule& s, const std::vector<Task>& ordered, const std::vector<FogNode>& nodes,
                          double penalty) {
    std::map<TaskId, double> deadline;
    for (const auto& t : ordered) deadline.emplace(t.id, t.deadline);
    int misses = static_cast<int>(s.failed.size());
    for (const auto& e : s.entries)
        if (e.completion > deadline.at(e.task_id)) ++misses;
    return schedule_energy(nodes, s.entries) + penalty * misses;
}

/// Particle swarm over real-valued node indices, decoded by clamped rounding.
inline Schedule pso_schedule(const std::vector<Task>& tasks, const std::vector<FogNode>& nodes,
                             const PsoConfig& cfg, std::uint64_t seed) {
    if (auto errs = pso_config_errors(cfg); !errs.empty()) throw InvalidInstance(std::move(errs));
    const auto ordered = detail::fcfs_order(primary_tasks(tasks));
    const auto order = detail::by_id(nodes);
    const std::size_t n = ordered.size();
    const std::size_t m = order.size();
    if (n == 0 || m == 0) return rr_schedule(tasks, nodes);

    std::vector<FogNode> by_pos;
    by_pos.reserve(m);
    for (auto i : order) by_pos.push_back(nodes[i]);
    const double penalty = cfg.penalty.value_or(default_pso_penalty(ordered, by_pos));
    const double hi = static_cast<double>(m - 1);
    const double vmax = std::max(1.0, static_cast<double>(m) / 2.0);

    auto decode = [&](const std::vector<double>& x) {
        std::vector<std::size_t> choice(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::clamp(std::round(x[i]), 0.0, hi);
            auto fit = detail::nearest_fit(by_pos, static_cast<std::size_t>(r), ordered[i].npe);
            choice[i] = fit.value_or(static_cast<std::size_t>(r));
        }
        return choice;
    };
    // Same result as pso_fitness(sequence(...)) without materializing a schedule.
    auto evaluate = [&](const std::vector<double>& x) {
        const auto choice = decode(x);
        SlotBoard board(by_pos);
        CompensatedSum energy;
        int misses = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& t = ordered[i];
            const auto p = board.probe(choice[i], t.npe, t.submit_time);
            if (!p.fits) {
                ++misses;
                continue;
            }
            const double exec = exec_time(t, by_pos[choice[i]], 1.0);
            board.reserve(choice[i], p.mask, p.start + exec);
            energy.add(run_energy(by_pos[choice[i]], 1.0, exec));
            if (p.start + exec > t.deadline) ++misses;
        }
        return energy.value() + penalty * misses;
    };

    Stream rng(derive_seed(seed, {0x950}));
    const std::size_t swarm = static_cast<std::size_t>(cfg.swarm_size);
    std::vector<std::vector<double>> pos(swarm, std::vector<double>(n));
    std::vector<std::vector<double>> vel(swarm, std::vector<double>(n));
    for (std::size_t p = 0; p < swarm; ++p) {
        for (std::size_t i = 0; i < n; ++i) {
            pos[p][i] = rng.uniform(0.0, hi);
            vel[p][i] = rng.uniform(-vmax, vmax);
        }
    }
    auto pbest = pos;
    std::vector<double> pbest_fit(swarm);
    std::size_t g = 0;
    for (std::size_t p = 0; p < swarm; ++p) {
        pbest_fit[p] = evaluate(pos[p]);
        if (pbest_fit[p] < pbest_fit[g]) g = p;
    }
    std::vector<double> gbest = pbest[g];
    double gbest_fit = pbest_fit[g];

    for (int it = 0; it < cfg.iterations; ++it) {
        for (std::size_t p = 0; p < swarm; ++p) {
            for (std::size_t i = 0; i < n; ++i) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                double v = cfg.w * vel[p][i] + cfg.c1 * r1 * (pbest[p][i] - pos[p][i]) +
                           cfg.c2 * r2 * (gbest[i] - pos[p][i]);
                v = std::clamp(v, -vmax, vmax);
                vel[p][i] = v;
                pos[p][i] = std::clamp(pos[p][i] + v, 0.0, hi);
            }
            const double f = evaluate(pos[p]);
            if (f < pbest_fit[p]) {
                pbest_fit[p] = f;
                pbest[p] = pos[p];
                if (f < gbest_fit) {
                    gbest_fit = f;
                    gbest = pos[p];
                }
            }
        }
    }
    return detail::sequence(ordered, by_pos, decode(gbest));
}

}  // namespace gapsched

#endif  // GAPSCHED_BASELINES_HPP
