#ifndef GAPSCHED_VERIFY_HPP
#define GAPSCHED_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gapsched/baselines.hpp"
#include "gapsched/experiment.hpp"
#include "gapsched/gap.hpp"
#include "gapsched/io.hpp"
#include "gapsched/oracle.hpp"
#include "gapsched/power.hpp"
#include "gapsched/random.hpp"
#include "gapsched/reliability.hpp"
#include "gapsched/sim.hpp"
#include "gapsched/workload.hpp"

// Self-check suite behind `gapsim verify`. Every check is deterministic in
// the master seed.

namespace gapsched {

struct SmallShape {
    int max_tasks = 5;
    int max_nodes = 3;
    int max_levels = 3;
    double max_submit = 2.0;
};

/// Random instance for property checks. Always has 1.0 among the levels.
inline Instance random_instance(Stream& rng, const SmallShape& shape, const FaultModel& fm = {}) {
    Instance inst;
    inst.fault_model = fm;
    const auto n = rng.integer(1, shape.max_tasks);
    const auto m = rng.integer(1, shape.max_nodes);
    for (std::int64_t j = 0; j < m; ++j) {
        FogNode node;
        node.id = j;
        node.mips = static_cast<double>(rng.integer(500, 2000));
        node.npe_slots = static_cast<int>(rng.integer(1, 4));
        inst.nodes.push_back(node);
    }
    for (std::int64_t i = 0; i < n; ++i) {
        Task t;
        t.id = i;
        t.length = rng.integer(500, 3000);
        t.npe = static_cast<int>(rng.integer(1, 3));
        t.submit_time = rng.uniform(0.0, shape.max_submit);
        t.deadline = t.submit_time + static_cast<double>(t.length) / 1000.0 * rng.uniform(0.8, 4.0);
        inst.tasks.push_back(t);
    }
    std::vector<double> pool{0.5, 0.6, 0.7, 0.8, 0.9};
    const auto k = rng.integer(0, shape.max_levels - 1);
    std::vector<double> levels;
    for (std::int64_t i = 0; i < k; ++i) {
        const auto pick = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(pool.size()) - 1));
        levels.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    levels.push_back(1.0);
    std::sort(levels.begin(), levels.end());
    inst.dvfs.levels = levels;
    return inst;
}

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    std::vector<double> oracle_ratios;  // GAP / oracle energy on fully feasible instances

    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
};

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

namespace detail {

/// Collects the first few counterexamples of a property.
struct Failures {
    int count = 0;
    std::string first;

    void add(const std::string& what) {
        if (count++ == 0) first = what;
    }
    CheckResult result(std::string name, std::string ok_detail) const {
        if (count == 0) return {std::move(name), true, std::move(ok_detail)};
        return {std::move(name), false, std::to_string(count) + " violation(s); first: " + first};
    }
};

inline bool gap_schedule_consistent(const Schedule& s, const std::vector<Task>& tasks, std::string& why) {
    std::map<TaskId, int> primaries;
    for (const auto& e : s.entries)
        if (e.phase == Phase::Primary) ++primaries[e.task_id];
    std::set<TaskId> failed(s.failed.begin(), s.failed.end());
    for (const auto& t : primary_tasks(tasks)) {
        const int placed = primaries.count(t.id) ? primaries[t.id] : 0;
        const bool lost = failed.count(t.id) > 0;
        if (placed > 1 || (placed == 1) == lost) {
            why = "task " + std::to_string(t.id) + " placed " + std::to_string(placed) + "x, failed=" +
                  (lost ? "yes" : "no");
            return false;
        }
    }
    if (s.cb != static_cast<int>(s.failed.size())) {
        why = "cb " + std::to_string(s.cb) + " != |failed| " + std::to_string(s.failed.size());
        return false;
    }
    return true;
}

}  // namespace detail

inline CheckResult check_config(const ExperimentConfig& cfg) {
    std::vector<ValidationError> errs;
    check_dvfs(cfg.dvfs, errs);
    check_fault_model(cfg.fault_model, errs);
    if (errs.empty() && cfg.dvfs.levels.front() < cfg.fault_model.f_min)
        errs.push_back({"dvfs", -1, "levels", "lowest level must not fall below fault_model.f_min"});
    if (errs.empty()) return {"config.valid", true, "dvfs and fault model satisfy their invariants"};
    std::string d;
    for (const auto& e : errs) d += (d.empty() ? "" : "; ") + e.record + "." + e.field + ": " + e.message;
    return {"config.valid", false, d};
}

inline CheckResult check_cubic_power(std::uint64_t seed, int pairs = 1000) {
    Stream rng(derive_seed(seed, {0xc0b1c}));
    detail::Failures f;
    for (int i = 0; i < pairs; ++i) {
        FogNode n;
        n.v_max = rng.uniform(0.8, 1.5);
        n.f_max = rng.uniform(5e8, 3e9);
        n.activity = rng.uniform(0.1, 1.0);
        n.load_cap = rng.uniform(1e-10, 5e-9);
        const double rho = rng.uniform(0.1, 1.0);
        const double got = operating_point(n, rho).watts;
        const double want = rho * rho * rho * full_power(n);
        if (!close_rel(got, want, 1e-12)) f.add("rho=" + format_number(rho));
    }
    return f.result("power.cubic_identity", std::to_string(pairs) + " random (node, rho) pairs");
}

inline CheckResult check_rate_anchors(const FaultModel& fm) {
    detail::Failures f;
    if (!close_rel(fault_rate_freq(fm, 1.0), fm.lambda0, 1e-12)) f.add("lambda(f_max) != lambda0");
    FogNode n;
    if (!close_rel(fault_rate_volt(fm, n, n.v_max), fm.lambda0, 1e-12)) f.add("lambda(v_max) != lambda0");
    for (double x = fm.f_min; x < 1.0; x += 0.01)
        if (!(fault_rate_freq(fm, x) >= fault_rate_freq(fm, std::min(1.0, x + 0.01)))) f.add("not monotone");
    return f.result("reliability.rate_monotone", "rate is lambda0 at full speed and grows as frequency drops");
}

inline CheckResult check_sampler(std::uint64_t seed) {
    detail::Failures f;
    const std::pair<double, double> points[] = {{1e-3, 100.0}, {0.5, 1.0}, {2.0, 1.0}};
    std::string summary;
    for (std::size_t k = 0; k < std::size(points); ++k) {
        const auto [lambda, t] = points[k];
        FaultSampler s(derive_seed(seed, {0x5a, k}));
        const double p = fault_probability(lambda, t);
        int hits = 0;
        const int N = 100000;
        for (int i = 0; i < N; ++i) hits += s.sample(p).occurred ? 1 : 0;
        const double emp = static_cast<double>(hits) / N;
        if (std::abs(emp - p) > 0.01) f.add("lambda=" + format_number(lambda) + " t=" + format_number(t));
        summary += (summary.empty() ? "" : ", ") + format_number(emp) + " vs " + format_number(p);
    }
    return f.result("reliability.sampler_frequency", summary);
}

inline CheckResult check_lambda_zero(std::uint64_t seed) {
    Stream rng(derive_seed(seed, {0x1a0}));
    detail::Failures f;
    FaultModel fm;
    fm.lambda0 = 0.0;
    for (int i = 0; i < 50; ++i) {
        auto inst = random_instance(rng, {8, 3, 3, 2.0}, fm);
        for (auto a : {Algorithm::Gap, Algorithm::Fcfs}) {
            const auto s = a == Algorithm::Gap ? gap_schedule(inst.tasks, inst.nodes, inst.dvfs, fm)
                                               : fcfs_schedule(inst.tasks, inst.nodes);
            FaultSampler sampler(derive_seed(seed, {0x1a1, static_cast<std::uint64_t>(i)}));
            RunOptions opt;
            opt.cpb = a == Algorithm::Gap;
            const auto r = run(s, inst, fm, sampler, opt);
            if (r.report.faults != 0 || (r.report.failed == 0 && r.report.reliability_estimate != 1.0))
                f.add("instance " + std::to_string(i));
        }
    }
    return f.result("reliability.lambda_zero", "no faults and reliability 1 with lambda0 = 0");
}

inline CheckResult check_edf_order(std::uint64_t seed) {
    Stream rng(derive_seed(seed, {0xedf}));
    detail::Failures f;
    for (int i = 0; i < 200; ++i) {
        auto inst = random_instance(rng, {30, 4, 3, 5.0});
        const auto sorted = edf_sort(inst.tasks);
        for (std::size_t k = 1; k < sorted.size(); ++k)
            if (edf_before(sorted[k], sorted[k - 1])) f.add("instance " + std::to_string(i));
    }
    return f.result("gap.edf_order", "heap-sorted order is non-decreasing in (deadline, submit, id)");
}

inline CheckResult check_deadline_safety(std::uint64_t seed, int instances = 500) {
    Stream rng(derive_seed(seed, {0xdead}));
    detail::Failures f;
    for (int i = 0; i < instances; ++i) {
        auto inst = random_instance(rng, {50, 6, 5, 10.0});
        for (bool weighted : {false, true}) {
            const auto s = weighted ? wgap_schedule(inst.tasks, inst.nodes, inst.fault_model)
                                    : gap_schedule(inst.tasks, inst.nodes, inst.dvfs, inst.fault_model);
            for (const auto& e : s.entries) {
                const auto& t = *std::find_if(inst.tasks.begin(), inst.tasks.end(),
                                              [&](const Task& x) { return x.id == e.task_id; });
                if (e.completion > t.deadline) f.add("instance " + std::to_string(i) + " task " + std::to_string(t.id));
            }
            std::string why;
            if (!detail::gap_schedule_consistent(s, inst.tasks, why)) f.add("instance " + std::to_string(i) + ": " + why);
        }
    }
    return f.result("gap.deadline_safety", std::to_string(instances) + " instances, GAP and WGAP");
}

inline CheckResult check_backup_separation(std::uint64_t seed, int runs = 500) {
    Stream rng(derive_seed(seed, {0xbac}));
    detail::Failures f;
    FaultModel fm;
    fm.lambda0 = 1e-3;
    int backups = 0;
    for (int i = 0; i < runs; ++i) {
        auto inst = random_instance(rng, {20, 4, 5, 5.0}, fm);
        const auto s = gap_schedule(inst.tasks, inst.nodes, inst.dvfs, fm);
        FaultSampler sampler(derive_seed(seed, {0xbad, static_cast<std::uint64_t>(i)}));
        RunOptions opt;
        opt.detection = i % 2 ? DetectionMode::AtCompletion : DetectionMode::Immediate;
        const auto r = run(s, inst, fm, sampler, opt);
        std::map<TaskId, NodeId> primary_node;
        for (const auto& x : r.trace.executions)
            if (x.phase == Phase::Primary) primary_node[x.task_id] = x.node_id;
        for (const auto& x : r.trace.executions) {
            if (x.phase != Phase::Backup) continue;
            ++backups;
            if (primary_node.count(x.task_id) && primary_node[x.task_id] == x.node_id)
                f.add("run " + std::to_string(i) + " task " + std::to_string(x.task_id));
        }
        for (const auto& e : s.entries)
            if (e.phase == Phase::Backup && s.assignment.count(e.task_id) && s.assignment.at(e.task_id) == e.node_id)
                f.add("planned backup on primary node, run " + std::to_string(i));
        if (!capacity_respected(r.trace, inst)) f.add("capacity exceeded, run " + std::to_string(i));
    }
    return f.result("gap.backup_separation",
                    std::to_string(runs) + " runs at lambda0=1e-3, " + std::to_string(backups) + " backups dispatched");
}

inline CheckResult check_dvfs_dominance(std::uint64_t seed) {
    Stream rng(derive_seed(seed, {0xd0f5}));
    detail::Failures f;
    for (int i = 0; i < 300; ++i) {
        auto inst = random_instance(rng, {30, 5, 5, 5.0});
        const auto g = gap_schedule(inst.tasks, inst.nodes, inst.dvfs, inst.fault_model);
        const auto w = wgap_schedule(inst.tasks, inst.nodes, inst.fault_model);
        if (candidate_score(w, inst.nodes) < candidate_score(g, inst.nodes)) f.add("instance " + std::to_string(i));
    }
    return f.result("gap.dvfs_dominance", "GAP never scores worse than full-speed WGAP");
}

inline CheckResult check_fault_free(std::uint64_t seed) {
    Stream rng(derive_seed(seed, {0xf4ee}));
    detail::Failures f;
    FaultModel fm;
    fm.lambda0 = 0.0;
    for (int i = 0; i < 200; ++i) {
        auto inst = random_instance(rng, {25, 4, 4, 5.0}, fm);
        const auto s = gap_schedule(inst.tasks, inst.nodes, inst.dvfs, fm);
        FaultSampler sampler(derive_seed(seed, {0xf4ef, static_cast<std::uint64_t>(i)}));
        const auto r = run(s, inst, fm, sampler);
        std::map<TaskId, const ScheduleEntry*> plan;
        for (const auto& e : s.entries) plan[e.task_id] = &e;
        if (r.trace.executions.size() != s.entries.size()) f.add("instance " + std::to_string(i) + " execution count");
        for (const auto& x : r.trace.executions) {
            auto it = plan.find(x.task_id);
            if (it == plan.end() || it->second->start != x.start || it->second->node_id != x.node_id)
                f.add("instance " + std::to_string(i) + " task " + std::to_string(x.task_id));
        }
        const double planned = schedule_energy(inst.nodes, s.entries);
        if (!close_rel(r.report.total_energy, planned, 1e-9) && planned > 0)
            f.add("instance " + std::to_string(i) + " energy " + format_number(r.report.total_energy) + " vs " +
                  format_number(planned));
    }
    return f.result("sim.fault_free_equivalence", "fault-free runs replay the plan and its energy");
}

inline CheckResult check_capacity(std::uint64_t seed) {
    Stream rng(derive_seed(seed, {0xcab}));
    detail::Failures f;
    FaultModel fm;
    fm.lambda0 = 5e-3;
    for (int i = 0; i < 200; ++i) {
        auto inst = random_instance(rng, {25, 4, 4, 5.0}, fm);
        for (auto a : kAllAlgorithms) {
            ExperimentConfig cfg;
            cfg.pso.iterations = 10;
            const auto s = schedule_with(a, inst, cfg, derive_seed(seed, {0xcac, static_cast<std::uint64_t>(i)}));
            FaultSampler sampler(derive_seed(seed, {0xcad, static_cast<std::uint64_t>(i)}));
            RunOptions opt;
            opt.cpb = a == Algorithm::Gap || a == Algorithm::Wgap;
            const auto r = run(s, inst, fm, sampler, opt);
            if (!capacity_respected(r.trace, inst)) f.add(std::string(to_string(a)) + " instance " + std::to_string(i));
        }
    }
    return f.result("sim.capacity", "no node ever runs more slots than it has");
}

inline CheckResult check_determinism(std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.master_seed = seed;
    cfg.seeds = 2;
    cfg.workload = sized_workload(40, 5);
    cfg.fault_model.lambda0 = 1e-3;
    cfg.pso.iterations = 20;
    const auto a = strip_wall_clock(run_experiment(cfg, false).csv);
    cfg.workers = 2;
    const auto b = strip_wall_clock(run_experiment(cfg, false).csv);
    if (a != b) return {"sim.determinism", false, "results differ between identical runs"};
    return {"sim.determinism", true, "identical config gives identical results"};
}

inline CheckResult check_oracle(std::uint64_t seed, VerifyReport& report, int instances = 200) {
    Stream rng(derive_seed(seed, {0x0a}));
    detail::Failures f;
    int full = 0;
    for (int i = 0; i < instances; ++i) {
        auto inst = random_instance(rng, {5, 3, 3, 2.0});
        const auto g = gap_schedule(inst.tasks, inst.nodes, inst.dvfs, inst.fault_model);
        const double ge = schedule_energy(inst.nodes, g.entries);
        const auto o = exhaustive(inst.tasks, inst.nodes, inst.dvfs);
        if (g.failed.empty()) {
            ++full;
            if (!o.best_energy) f.add("instance " + std::to_string(i) + ": GAP feasible, oracle not");
            else if (ge < *o.best_energy * (1 - 1e-12)) f.add("instance " + std::to_string(i) + ": below optimum");
            else report.oracle_ratios.push_back(ge / *o.best_energy);
        }
        // Restricted to the tasks GAP kept, GAP's own plan is a candidate.
        std::vector<Task> kept;
        for (const auto& t : inst.tasks)
            if (g.assignment.count(t.id)) kept.push_back(t);
        if (!kept.empty()) {
            const auto ok = exhaustive(kept, inst.nodes, inst.dvfs);
            if (!ok.best_energy || ge < *ok.best_energy * (1 - 1e-12))
                f.add("instance " + std::to_string(i) + ": kept subset");
        }
        if (o.best_energy) {
            std::vector<std::size_t> choice;
            for (auto id : o.best_assignment) choice.push_back(NodeIndex(inst.nodes).at(id));
            auto s = materialize(edf_sort(primary_tasks(inst.tasks)), inst.nodes, choice, o.best_rho);
            if (!s || !close_rel(schedule_energy(inst.nodes, s->entries), *o.best_energy, 1e-12))
                f.add("instance " + std::to_string(i) + ": oracle witness does not replay");
        }
    }
    std::ostringstream d;
    d << instances << " instances, " << full << " fully feasible; median GAP/oracle energy ratio "
      << format_number(median(report.oracle_ratios));
    return f.result("oracle.bounding", d.str());
}

inline CheckResult check_baselines(std::uint64_t seed) {
    Stream rng(derive_seed(seed, {0xba5e}));
    detail::Failures f;
    for (int i = 0; i < 100; ++i) {
        auto inst = random_instance(rng, {20, 1, 1, 5.0});
        const auto a = fcfs_schedule(inst.tasks, inst.nodes);
        const auto b = rr_schedule(inst.tasks, inst.nodes);
        if (a.entries.size() != b.entries.size()) f.add("instance " + std::to_string(i));
        for (std::size_t k = 0; k < std::min(a.entries.size(), b.entries.size()); ++k)
            if (a.entries[k].start != b.entries[k].start || a.entries[k].task_id != b.entries[k].task_id)
                f.add("instance " + std::to_string(i));
    }
    return f.result("baselines.single_node", "RR equals FCFS on one node");
}

inline CheckResult check_workload(std::uint64_t seed) {
    detail::Failures f;
    const WorkloadSpec w = sized_workload(300, 40, seed);
    const auto [t1, n1] = generate(w);
    const auto [t2, n2] = generate(w);
    if (dump_instance({t1, n1, {}, {}}) != dump_instance({t2, n2, {}, {}})) f.add("same seed, different instance");
    for (const auto& t : t1)
        if (t.length < w.length.lo || t.length > w.length.hi || t.npe < w.npe.lo || t.npe > w.npe.hi ||
            t.deadline <= t.submit_time)
            f.add("task " + std::to_string(t.id));
    for (const auto& n : n1)
        if (n.mips < w.mips.lo || n.mips > w.mips.hi || n.npe_slots < w.vm_npe.lo || n.npe_slots > w.vm_npe.hi)
            f.add("node " + std::to_string(n.id));
    return f.result("workload.ranges", "generated values stay in range and replay from the seed");
}

/// Runs the whole suite. Later checks still run when an early one fails.
inline VerifyReport verify(const ExperimentConfig& cfg) {
    VerifyReport r;
    const auto s = cfg.master_seed;
    r.checks.push_back(check_config(cfg));
    r.checks.push_back(check_cubic_power(s));
    if (r.checks.front().passed) r.checks.push_back(check_rate_anchors(cfg.fault_model));
    r.checks.push_back(check_sampler(s));
    r.checks.push_back(check_lambda_zero(s));
    r.checks.push_back(check_edf_order(s));
    r.checks.push_back(check_deadline_safety(s));
    r.checks.push_back(check_backup_separation(s));
    r.checks.push_back(check_dvfs_dominance(s));
    r.checks.push_back(check_fault_free(s));
    r.checks.push_back(check_capacity(s));
    r.checks.push_back(check_determinism(s));
    r.checks.push_back(check_oracle(s, r));
    r.checks.push_back(check_baselines(s));
    r.checks.push_back(check_workload(s));
    return r;
}

inline void print_report(std::ostream& out, const VerifyReport& r) {
    std::size_t width = 0;
    for (const auto& c : r.checks) width = std::max(width, c.name.size());
    for (const auto& c : r.checks) {
        out << (c.passed ? "PASS  " : "FAIL  ") << c.name << std::string(width - c.name.size() + 2, ' ') << c.detail
            << '\n';
    }
    const auto failed = std::count_if(r.checks.begin(), r.checks.end(), [](const CheckResult& c) { return !c.passed; });
    out << r.checks.size() - static_cast<std::size_t>(failed) << "/" << r.checks.size() << " checks passed\n";
}

}  // namespace gapsched

#endif  // GAPSCHED_VERIFY_HPP
