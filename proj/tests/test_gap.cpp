#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "gapsched/gap.hpp"
#include "gapsched/oracle.hpp"
#include "gapsched/verify.hpp"
#include "support.hpp"

using namespace gapsched;

namespace {

// t2 is more urgent and only fits its deadline on the fast node.
Instance two_by_two() {
    Instance inst;
    inst.tasks = {mk_task(1, 1000, 2.0), mk_task(2, 1500, 1.0)};
    inst.nodes = {mk_node(1, 1000), mk_node(2, 2000)};
    return inst;
}

const ScheduleEntry& entry_of(const Schedule& s, TaskId id) {
    return *std::find_if(s.entries.begin(), s.entries.end(), [&](const ScheduleEntry& e) { return e.task_id == id; });
}

}  // namespace

TEST(ExecTime, Examples) {
    EXPECT_TRUE(rel_near(exec_time(mk_task(0, 1000, 9), mk_node(0, 1000), 1.0), 1.0));
    EXPECT_TRUE(rel_near(exec_time(mk_task(0, 1000, 9), mk_node(0, 1000), 0.5), 2.0));
    EXPECT_TRUE(rel_near(exec_time(mk_task(0, 2000, 9), mk_node(0, 2000), 1.0), 1.0));
}

TEST(EdfSort, Examples) {
    const auto sorted = edf_sort({mk_task(0, 1000, 3), mk_task(1, 1000, 1), mk_task(2, 1000, 2)});
    EXPECT_EQ(sorted[0].deadline, 1);
    EXPECT_EQ(sorted[1].deadline, 2);
    EXPECT_EQ(sorted[2].deadline, 3);
    EXPECT_TRUE(edf_sort({}).empty());
}

TEST(EdfSort, TiesBreakOnSubmitThenId) {
    std::vector<Task> in;
    for (int i = 9; i >= 0; --i) in.push_back(mk_task(i, 1000, 5.0, (i % 3) * 0.1));
    const auto out = edf_sort(in);
    for (std::size_t k = 1; k < out.size(); ++k)
        EXPECT_LT(std::tie(out[k - 1].submit_time, out[k - 1].id), std::tie(out[k].submit_time, out[k].id));
}

TEST(Payoff, Examples) {
    const auto n = mk_node(0, 1000);
    const auto p = payoff_at(mk_task(0, 1000, 2.0), n, 1.0, 0.0, {});
    ASSERT_TRUE(p.feasible);
    EXPECT_TRUE(rel_near(p.value, -0.5));
    EXPECT_FALSE(payoff_at(mk_task(0, 1000, 0.9), n, 1.0, 0.0, {}).feasible);
    EXPECT_TRUE(Payoff::infeasible() < p);
}

TEST(Payoff, SmallerExecTimeStrictlyBetter) {
    const auto t = mk_task(0, 1000, 5.0);
    const auto slow = payoff_at(t, mk_node(0, 1000), 1.0, 0.0, {});
    const auto fast = payoff_at(t, mk_node(1, 1000), 1.0, 0.0, {});
    EXPECT_EQ(slow.value, fast.value);
    const auto later = payoff_at(t, mk_node(1, 1000), 1.0, 0.5, {});
    EXPECT_TRUE(later < slow);
}

TEST(MapPrimaries, TwoTaskExample) {
    const auto inst = two_by_two();
    const auto sorted = edf_sort(inst.tasks);
    ASSERT_EQ(sorted[0].id, 2);
    GapState st(inst.nodes);
    Schedule s;
    map_primaries(sorted, inst.nodes, 1.0, st, s);
    EXPECT_EQ(s.assignment.at(2), 2);
    EXPECT_EQ(s.assignment.at(1), 1);
    EXPECT_TRUE(rel_near(entry_of(s, 2).completion, 0.75));
    EXPECT_TRUE(rel_near(entry_of(s, 1).completion, 1.0));
    EXPECT_EQ(st.cp, 0);
    EXPECT_TRUE(st.backup_queue.empty());
}

TEST(MapPrimaries, SingleTaskSingleNode) {
    const std::vector<FogNode> nodes{mk_node(4, 1000)};
    GapState st(nodes);
    Schedule s;
    map_primaries({mk_task(0, 1000, 10)}, nodes, 1.0, st, s);
    EXPECT_EQ(s.assignment.at(0), 4);
}

TEST(MapPrimaries, HopelessTaskIsDeferred) {
    const std::vector<FogNode> nodes{mk_node(0, 1000), mk_node(1, 2000)};
    GapState st(nodes);
    Schedule s;
    map_primaries({mk_task(0, 5000, 2.0)}, nodes, 1.0, st, s);
    EXPECT_EQ(st.cp, 1);
    EXPECT_EQ(s.cp, 1);
    EXPECT_EQ(s.backup_list, std::vector<TaskId>{0});
    EXPECT_TRUE(s.entries.empty());
}

TEST(MapBackups, AvoidsPrimaryNode) {
    const std::vector<FogNode> nodes{mk_node(1, 1000), mk_node(2, 1000)};
    const std::vector<Task> tasks{mk_task(0, 1000, 10)};
    GapState st(nodes);
    st.backup_queue.push_back({0, 0.0, 10.0, std::nullopt});
    Schedule s;
    map_backups(tasks, nodes, 1.0, st, s, {{0, 1}});
    ASSERT_EQ(s.entries.size(), 1u);
    EXPECT_EQ(s.entries[0].node_id, 2);
    EXPECT_EQ(s.entries[0].phase, Phase::Backup);
}

TEST(MapBackups, OnlyNodeTakenByPrimary) {
    const std::vector<FogNode> nodes{mk_node(1, 1000)};
    const std::vector<Task> tasks{mk_task(0, 1000, 10)};
    GapState st(nodes);
    st.backup_queue.push_back({0, 0.0, 10.0, std::nullopt});
    Schedule s;
    map_backups(tasks, nodes, 1.0, st, s, {{0, 1}});
    EXPECT_EQ(s.failed, std::vector<TaskId>{0});
    EXPECT_EQ(s.cb, 1);
}

TEST(MapBackups, BudgetTooShort) {
    // 600 MI on the 1000 MIPS node takes 0.6 s against a 0.5 s budget.
    const std::vector<FogNode> nodes{mk_node(1, 1000), mk_node(2, 1000)};
    const std::vector<Task> tasks{mk_task(0, 600, 10)};
    GapState st(nodes);
    st.backup_queue.push_back({0, 0.0, 0.5, std::nullopt});
    Schedule s;
    map_backups(tasks, nodes, 1.0, st, s, {{0, 1}});
    EXPECT_EQ(s.failed, std::vector<TaskId>{0});
    EXPECT_EQ(st.cb, 1);
}

TEST(MapBackups, PrefersFasterNode) {
    const std::vector<FogNode> nodes{mk_node(1, 1000), mk_node(2, 1500), mk_node(3, 2000)};
    const std::vector<Task> tasks{mk_task(0, 1000, 10)};
    GapState st(nodes);
    st.backup_queue.push_back({0, 0.0, 10.0, std::nullopt});
    Schedule s;
    map_backups(tasks, nodes, 1.0, st, s, {{0, 3}});
    ASSERT_EQ(s.entries.size(), 1u);
    EXPECT_EQ(s.entries[0].node_id, 2);
}

TEST(GapSchedule, PicksLowestFeasibleLevel) {
    Instance inst;
    inst.tasks = {mk_task(0, 1000, 5.0)};
    inst.nodes = {mk_node(0, 1000)};
    inst.dvfs.levels = {0.6, 1.0};
    const auto s = gap_schedule(inst.tasks, inst.nodes, inst.dvfs, inst.fault_model);
    EXPECT_EQ(s.selected_rho, 0.6);
    const auto w = wgap_schedule(inst.tasks, inst.nodes, inst.fault_model);
    const double ge = schedule_energy(inst.nodes, s.entries);
    const double we = schedule_energy(inst.nodes, w.entries);
    EXPECT_LE(ge, we);
    // Power scales with rho^3 while time scales with 1/rho.
    EXPECT_TRUE(rel_near(ge, we * 0.6 * 0.6));
}

TEST(GapSchedule, FullSpeedWhenOnlyThatFits) {
    Instance inst;
    inst.tasks = {mk_task(0, 1000, 1.05)};
    inst.nodes = {mk_node(0, 1000)};
    const auto s = gap_schedule(inst.tasks, inst.nodes, inst.dvfs, inst.fault_model);
    EXPECT_EQ(s.selected_rho, 1.0);
    EXPECT_TRUE(s.failed.empty());
}

TEST(GapSchedule, EmptyInput) {
    const DvfsConfig dvfs;
    const auto s = gap_schedule({}, {mk_node(0, 1000)}, dvfs, {});
    EXPECT_TRUE(s.entries.empty());
    EXPECT_EQ(s.selected_rho, dvfs.levels.front());
}

TEST(GapSchedule, RejectsInvalidInstance) {
    EXPECT_THROW(gap_schedule({mk_task(0, 0, 1)}, {mk_node(0, 1000)}, {}, {}), InvalidInstance);
}

TEST(Wgap, IsGapAtFullSpeed) {
    Stream rng(derive_seed(3, {}));
    for (int i = 0; i < 50; ++i) {
        auto inst = random_instance(rng, {20, 4, 4, 3.0});
        const auto w = wgap_schedule(inst.tasks, inst.nodes, inst.fault_model);
        const auto g = gap_schedule(inst.tasks, inst.nodes, DvfsConfig{{1.0}}, inst.fault_model);
        EXPECT_EQ(w, g);
        EXPECT_EQ(w.selected_rho, 1.0);
    }
}

TEST(GapProperties, DeadlineSafetyAndCounters) {
    Stream rng(derive_seed(4, {}));
    for (int i = 0; i < 300; ++i) {
        auto inst = random_instance(rng, {40, 5, 5, 8.0});
        const auto s = gap_schedule(inst.tasks, inst.nodes, inst.dvfs, inst.fault_model);
        std::map<TaskId, Task> by_id;
        for (const auto& t : inst.tasks) by_id[t.id] = t;
        std::set<TaskId> placed;
        for (const auto& e : s.entries) {
            EXPECT_LE(e.completion, by_id[e.task_id].deadline);
            EXPECT_GE(e.start, by_id[e.task_id].submit_time);
            EXPECT_TRUE(placed.insert(e.task_id).second);
        }
        for (auto id : s.failed) EXPECT_FALSE(placed.count(id));
        EXPECT_EQ(placed.size() + s.failed.size(), inst.tasks.size());
        EXPECT_EQ(s.cp, static_cast<int>(s.backup_list.size()));
        EXPECT_EQ(s.cb, static_cast<int>(s.failed.size()));
    }
}

TEST(GapProperties, DvfsDominance) {
    Stream rng(derive_seed(5, {}));
    for (int i = 0; i < 300; ++i) {
        auto inst = random_instance(rng, {30, 4, 5, 4.0});
        const auto g = gap_schedule(inst.tasks, inst.nodes, inst.dvfs, inst.fault_model);
        const auto w = wgap_schedule(inst.tasks, inst.nodes, inst.fault_model);
        if (g.failed.size() != w.failed.size() || g.cp != w.cp) continue;
        EXPECT_LE(schedule_energy(inst.nodes, g.entries), schedule_energy(inst.nodes, w.entries));
    }
}

// On idle identical nodes the chosen node attains the minimum execution time.
TEST(GapProperties, HomogeneousIdleNodesMinimizeExecTime) {
    Stream rng(derive_seed(6, {}));
    for (int i = 0; i < 100; ++i) {
        const auto m = rng.integer(1, 6);
        std::vector<FogNode> nodes;
        for (std::int64_t j = 0; j < m; ++j) nodes.push_back(mk_node(j, 1500, 8));
        const auto t = mk_task(0, rng.integer(500, 3000), 10.0, 0.0, static_cast<int>(rng.integer(1, 8)));
        GapState st(nodes);
        Schedule s;
        map_primaries({t}, nodes, 1.0, st, s);
        ASSERT_EQ(s.entries.size(), 1u);
        double best = 1e300;
        for (const auto& n : nodes) best = std::min(best, exec_time(t, n, 1.0));
        EXPECT_EQ(s.entries[0].exec_time, best);
        EXPECT_EQ(s.entries[0].node_id, 0);  // id tie-break
    }
}

TEST(GapProperties, ConvergenceBounds) {
    Stream rng(derive_seed(8, {}));
    for (int i = 0; i < 100; ++i) {
        auto inst = random_instance(rng, {30, 5, 5, 4.0});
        const auto s = gap_schedule(inst.tasks, inst.nodes, inst.dvfs, inst.fault_model);
        const auto levels = static_cast<std::int64_t>(inst.dvfs.levels.size());
        EXPECT_EQ(s.stats.candidates_built, levels);
        EXPECT_LE(s.stats.payoff_evaluations,
                  2 * levels * static_cast<std::int64_t>(inst.tasks.size() * inst.nodes.size()));
    }
}

TEST(GapProperties, RemainingBudgetFollowsDetectionMode) {
    const auto inst = two_by_two();
    const auto sorted = edf_sort(inst.tasks);
    GapState a(inst.nodes), b(inst.nodes);
    Schedule sa, sb;
    map_primaries(sorted, inst.nodes, 1.0, a, sa, {{}, DetectionMode::Immediate});
    map_primaries(sorted, inst.nodes, 1.0, b, sb, {{}, DetectionMode::AtCompletion});
    EXPECT_TRUE(rel_near(a.remaining.at(2), 1.0));
    EXPECT_TRUE(rel_near(b.remaining.at(2), 0.25));
}
