#ifndef GAPSCHED_SIM_HPP
#define GAPSCHED_SIM_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gapsched/gap.hpp"
#include "gapsched/model.hpp"
#include "gapsched/power.hpp"
#include "gapsched/reliability.hpp"
#include "gapsched/slots.hpp"

namespace gapsched {

/// Declaration order is the tie-break rank for events at the same instant.
enum class EventKind { Completion, Fault, Arrival, Start, BackupDispatch };

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Completion: return "Completion";
        case EventKind::Fault: return "Fault";
        case EventKind::Arrival: return "Arrival";
        case EventKind::Start: return "Start";
        case EventKind::BackupDispatch: return "BackupDispatch";
    }
    return "?";
}

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::Arrival;
    TaskId task_id = 0;
    NodeId node_id = -1;

    bool operator==(const Event&) const = default;
};

enum class TaskStatus { Completed, CompletedViaBackup, Failed };

inline const char* to_string(TaskStatus s) {
    switch (s) {
        case TaskStatus::Completed: return "Completed";
        case TaskStatus::CompletedViaBackup: return "CompletedViaBackup";
        case TaskStatus::Failed: return "Failed";
    }
    return "?";
}

/// One stretch of time a task actually occupied a node.
struct Execution {
    TaskId task_id = 0;
    NodeId node_id = 0;
    Phase phase = Phase::Primary;
    double start = 0.0;
    double duration = 0.0;  // time the node was busy (and drawing power)
    double exec_time = 0.0; // full execution time at this rho
    double rho = 1.0;
    std::uint64_t slot_mask = 0;
    bool faulted = false;

    bool operator==(const Execution&) const = default;
};

struct RunTrace {
    std::vector<Event> events;
    std::map<TaskId, TaskStatus> status;
    std::vector<FaultEvent> faults;
    std::vector<Execution> executions;
    std::map<TaskId, double> completion;
    std::map<TaskId, double> wait;
    int primary_faults = 0;

    bool operator==(const RunTrace&) const = default;
};

struct RunOptions {
    /// Dispatch a backup when a primary faults. Off for schedulers without
    /// replication: a fault then fails the task.
    bool cpb = true;
    DetectionMode detection = DetectionMode::Immediate;
    GapOptions gap;

    static RunOptions with_cpb(bool on) {
        RunOptions o;
        o.cpb = on;
        return o;
    }
};

struct RunResult {
    RunTrace trace;
    MetricsReport report;
};

/// Eq. CT = ST + Exec for a planned or executed entry.
inline double completion_time(const ScheduleEntry& e) { return e.start + e.exec_time; }

/// W = s - ST; negative means the entry started before the task existed.
inline double wait_time(const ScheduleEntry& e, const Task& t) {
    const double w = e.start - t.submit_time;
    if (w < 0) throw std::logic_error("wait_time: task " + std::to_string(t.id) + " started before submission");
    return w;
}

/// Mean completion and wait over tasks that did not fail; absent when none did.
inline std::pair<std::optional<double>, std::optional<double>> averages(const RunTrace& trace) {
    CompensatedSum ct, wt;
    std::size_t n = 0;
    for (const auto& [id, st] : trace.status) {
        if (st == TaskStatus::Failed) continue;
        ct.add(trace.completion.at(id));
        wt.add(trace.wait.at(id));
        ++n;
    }
    if (n == 0) return {std::nullopt, std::nullopt};
    const double dn = static_cast<double>(n);
    return {ct.value() / dn, wt.value() / dn};
}

/// Energy of every executed stretch, including time lost to faults.
inline double trace_energy(const RunTrace& trace, const std::vector<FogNode>& nodes) {
    const NodeIndex index(nodes);
    std::vector<const Execution*> order;
    for (const auto& x : trace.executions) order.push_back(&x);
    std::sort(order.begin(), order.end(), [](const Execution* a, const Execution* b) {
        return std::tie(a->task_id, a->phase, a->start) < std::tie(b->task_id, b->phase, b->start);
    });
    CompensatedSum sum;
    for (const auto* x : order) sum.add(run_energy(nodes[index.at(x->node_id)], x->rho, x->duration));
    return sum.value();
}

inline MetricsReport report(const RunTrace& trace, const Instance& inst, const Schedule& schedule) {
    MetricsReport r;
    const NodeIndex index(inst.nodes);
    r.total_energy = trace_energy(trace, inst.nodes);

    std::map<TaskId, const Task*> tasks;
    for (const auto& t : inst.tasks)
        if (t.role == Role::Primary) tasks.emplace(t.id, &t);

    const auto [act, awt] = averages(trace);
    r.avg_completion = act;
    r.avg_wait = awt;

    double first_submit = 0.0;
    bool any = false;
    for (const auto& [id, t] : tasks) {
        first_submit = any ? std::min(first_submit, t->submit_time) : t->submit_time;
        any = true;
    }
    double last_end = first_submit;
    for (const auto& x : trace.executions) last_end = std::max(last_end, x.start + x.duration);
    r.makespan = trace.executions.empty() ? 0.0 : last_end - first_submit;
    r.avg_power = r.makespan > 0 ? r.total_energy / r.makespan : 0.0;

    for (const auto& [id, st] : trace.status) {
        switch (st) {
            case TaskStatus::Completed: ++r.completed; break;
            case TaskStatus::CompletedViaBackup: ++r.completed_via_backup; break;
            case TaskStatus::Failed: ++r.failed; break;
        }
        if (st != TaskStatus::Failed && trace.completion.at(id) > tasks.at(id)->deadline) ++r.missed_deadlines;
    }
    r.faults = static_cast<int>(trace.faults.size());
    r.cp = schedule.cp + trace.primary_faults;
    r.cb = r.failed;
    r.reliability_estimate =
        trace.status.empty() ? 1.0
                             : static_cast<double>(r.completed + r.completed_via_backup) /
                                   static_cast<double>(trace.status.size());

    // Voltage-side cross-check: mean survival probability of the planned
    // primary runs under the voltage-based fault rate.
    CompensatedSum rel;
    std::size_t runs = 0;
    for (const auto& e : schedule.entries) {
        if (e.phase != Phase::Primary) continue;
        const auto& node = inst.nodes[index.at(e.node_id)];
        rel.add(reliability(fault_rate_volt(inst.fault_model, node, e.rho * node.v_max), e.exec_time));
        ++runs;
    }
    r.model_reliability = runs ? rel.value() / static_cast<double>(runs) : 1.0;
    return r;
}

namespace detail {

struct Job {
    const Task* task = nullptr;
    std::size_t node = 0;
    Phase phase = Phase::Primary;
    double planned = 0.0;
    double exec = 0.0;
    double rho = 1.0;
    std::uint64_t mask = 0;
    bool reserved = false;  // backups reserve their slots at dispatch
    bool faulted = false;
    double fault_at = 0.0;
    std::size_t execution = 0;
};

struct QueuedEvent {
    double time;
    EventKind kind;
    TaskId task;
    std::uint64_t seq;
    std::size_t job;

    bool operator>(const QueuedEvent& o) const {
        return std::tie(time, kind, task, seq) > std::tie(o.time, o.kind, o.task, o.seq);
    }
};

}  // namespace detail

/// Executes `schedule` against the fault model. Primaries start at their
/// planned time on their planned slots, later if those slots are still
/// busy. A faulted primary hands its task to map_backups against the live
/// node state; backups are fault-prone too.
inline RunResult run(const Schedule& schedule, const Instance& inst, const FaultModel& fm, FaultSampler& sampler,
                     const RunOptions& opt = {}) {
    using detail::Job;
    using detail::QueuedEvent;

    const NodeIndex index(inst.nodes);
    std::vector<Task> primaries = primary_tasks(inst.tasks);
    std::sort(primaries.begin(), primaries.end(), [](const Task& a, const Task& b) { return a.id < b.id; });
    std::map<TaskId, const Task*> task_by_id;
    for (const auto& t : primaries) task_by_id.emplace(t.id, &t);

    RunTrace trace;
    std::vector<Job> jobs;
    jobs.reserve(schedule.entries.size() * 2 + 1);
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue;
    std::uint64_t seq = 0;
    auto push = [&](double time, EventKind kind, TaskId task, std::size_t job) {
        queue.push({time, kind, task, seq++, job});
    };
    constexpr std::size_t no_job = static_cast<std::size_t>(-1);

    std::map<TaskId, NodeId> primary_node;
    for (const auto& e : schedule.entries) {
        auto it = task_by_id.find(e.task_id);
        if (it == task_by_id.end()) throw std::invalid_argument("schedule references unknown task " + std::to_string(e.task_id));
        if (!index.contains(e.node_id)) throw std::invalid_argument("schedule references unknown node " + std::to_string(e.node_id));
        if (!primary_node.emplace(e.task_id, e.node_id).second)
            throw std::invalid_argument("schedule has more than one entry for task " + std::to_string(e.task_id));
        Job j;
        j.task = it->second;
        j.node = index.at(e.node_id);
        j.phase = e.phase;
        j.planned = std::max(e.start, it->second->submit_time);
        j.exec = e.exec_time;
        j.rho = e.rho;
        j.mask = e.slot_mask;
        if (j.mask == 0) {
            const auto p = SlotBoard(inst.nodes).probe(j.node, j.task->npe, 0.0);
            if (!p.fits) throw std::invalid_argument("task " + std::to_string(e.task_id) + " does not fit its node");
            j.mask = p.mask;
        }
        jobs.push_back(j);
        push(j.planned, EventKind::Start, e.task_id, jobs.size() - 1);
    }
    for (const auto& t : primaries) {
        push(t.submit_time, EventKind::Arrival, t.id, no_job);
        if (!primary_node.contains(t.id)) trace.status[t.id] = TaskStatus::Failed;
    }

    GapState live(inst.nodes);
    auto draw = [&](const Job& j) {
        const double p = fault_probability(fault_rate_freq(fm, j.rho), j.exec);
        return sampler.sample(p);
    };
    auto record = [&](Job& j, double start, double busy) {
        j.execution = trace.executions.size();
        trace.executions.push_back({j.task->id, inst.nodes[j.node].id, j.phase, start, busy, j.exec, j.rho, j.mask,
                                    j.faulted});
    };
    auto log = [&](double t, EventKind k, TaskId task, NodeId node) { trace.events.push_back({t, k, task, node}); };

    while (!queue.empty()) {
        const QueuedEvent ev = queue.top();
        queue.pop();
        const double now = ev.time;
        if (ev.job == no_job) {
            if (ev.kind == EventKind::Arrival) log(now, ev.kind, ev.task, -1);
            continue;
        }
        Job& job = jobs[ev.job];
        const NodeId node_id = inst.nodes[job.node].id;
        const TaskId tid = job.task->id;

        switch (ev.kind) {
            case EventKind::Start: {
                if (!job.reserved) {
                    const double start = live.node_free.start_on(job.node, job.mask, now);
                    if (start > now) {
                        push(start, EventKind::Start, tid, ev.job);
                        break;
                    }
                    const auto f = draw(job);
                    job.faulted = f.occurred;
                    const double elapsed = f.elapsed_fraction * job.exec;
                    const double busy =
                        job.faulted && opt.detection == DetectionMode::Immediate ? elapsed : job.exec;
                    live.node_free.reserve(job.node, job.mask, now + busy);
                    record(job, now, busy);
                    if (job.phase == Phase::Primary || !trace.wait.contains(tid)) trace.wait[tid] = now - job.task->submit_time;
                    if (trace.wait[tid] < 0) throw std::logic_error("task started before submission");
                    if (job.faulted) {
                        job.fault_at = now + elapsed;
                        push(job.fault_at, EventKind::Fault, tid, ev.job);
                    } else {
                        push(now + job.exec, EventKind::Completion, tid, ev.job);
                    }
                }
                log(now, EventKind::Start, tid, node_id);
                break;
            }
            case EventKind::Fault: {
                log(now, EventKind::Fault, tid, node_id);
                trace.faults.push_back({tid, node_id, now - trace.executions[job.execution].start});
                const bool is_primary_run = job.phase == Phase::Primary && !job.reserved;
                if (is_primary_run) ++trace.primary_faults;
                if (is_primary_run && opt.cpb) {
                    const double detect = opt.detection == DetectionMode::Immediate
                                              ? now
                                              : trace.executions[job.execution].start + job.exec;
                    push(detect, EventKind::BackupDispatch, tid, ev.job);
                } else {
                    trace.status[tid] = TaskStatus::Failed;
                }
                break;
            }
            case EventKind::BackupDispatch: {
                log(now, EventKind::BackupDispatch, tid, node_id);
                Schedule placed;
                live.backup_queue = {{tid, now, job.task->deadline - now, node_id}};
                live.cb = 0;
                map_backups(primaries, inst.nodes, job.rho, live, placed, {}, opt.gap);
                if (placed.entries.empty()) {
                    trace.status[tid] = TaskStatus::Failed;
                    break;
                }
                const auto& e = placed.entries.front();
                Job b;
                b.task = job.task;
                b.node = index.at(e.node_id);
                b.phase = Phase::Backup;
                b.planned = e.start;
                b.exec = e.exec_time;
                b.rho = e.rho;
                b.mask = e.slot_mask;
                b.reserved = true;
                const auto f = draw(b);
                b.faulted = f.occurred;
                const double elapsed = f.elapsed_fraction * b.exec;
                const double busy = b.faulted && opt.detection == DetectionMode::Immediate ? elapsed : b.exec;
                live.node_free.reserve(b.node, b.mask, e.start + busy);
                jobs.push_back(b);
                const std::size_t bj = jobs.size() - 1;
                record(jobs[bj], e.start, busy);
                push(e.start, EventKind::Start, tid, bj);
                if (b.faulted) {
                    jobs[bj].fault_at = e.start + elapsed;
                    push(e.start + elapsed, EventKind::Fault, tid, bj);
                } else {
                    push(e.start + b.exec, EventKind::Completion, tid, bj);
                }
                break;
            }
            case EventKind::Completion: {
                log(now, EventKind::Completion, tid, node_id);
                trace.status[tid] = job.reserved ? TaskStatus::CompletedViaBackup : TaskStatus::Completed;
                trace.completion[tid] = now;
                break;
            }
            case EventKind::Arrival: break;
        }
    }

    for (const auto& t : primaries)
        if (!trace.status.contains(t.id)) throw std::logic_error("task " + std::to_string(t.id) + " never settled");

    RunResult out;
    out.report = report(trace, inst, schedule);
    out.trace = std::move(trace);
    return out;
}

/// Sum of npe of concurrently running executions never exceeds a node's slots.
inline bool capacity_respected(const RunTrace& trace, const Instance& inst) {
    const NodeIndex index(inst.nodes);
    std::map<TaskId, int> npe;
    for (const auto& t : inst.tasks) npe.emplace(t.id, t.npe);
    std::map<NodeId, std::vector<std::pair<double, int>>> sweep;
    for (const auto& x : trace.executions) {
        if (x.duration <= 0) continue;
        sweep[x.node_id].push_back({x.start, npe.at(x.task_id)});
        sweep[x.node_id].push_back({x.start + x.duration, -npe.at(x.task_id)});
    }
    for (auto& [node, pts] : sweep) {
        // Releases before acquisitions at the same instant.
        std::sort(pts.begin(), pts.end());
        int used = 0;
        for (const auto& [t, delta] : pts) {
            used += delta;
            if (used > inst.nodes[index.at(node)].npe_slots) return false;
        }
    }
    return true;
}

}  // namespace gapsched

#endif  // GAPSCHED_SIM_HPP
