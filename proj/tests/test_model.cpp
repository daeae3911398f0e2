#include <functional>
#include <string>
#include <vector>

#include "gapsched/random.hpp"
#include "gapsched/verify.hpp"
#include "support.hpp"

using namespace gapsched;

namespace {

Instance two_by_two() {
    Instance inst;
    inst.tasks = {mk_task(1, 1000, 2.0), mk_task(2, 1500, 1.0)};
    inst.nodes = {mk_node(1, 1000), mk_node(2, 2000)};
    return inst;
}

using Mutation = std::pair<std::string, std::function<void(Instance&)>>;

std::vector<Mutation> mutations() {
    return {
        {"task.length", [](Instance& i) { i.tasks[0].length = 0; }},
        {"task.submit_time", [](Instance& i) { i.tasks[0].submit_time = -1.0; }},
        {"task.deadline", [](Instance& i) { i.tasks[0].deadline = i.tasks[0].submit_time; }},
        {"task.npe", [](Instance& i) { i.tasks[0].npe = 9; }},
        {"task.npe", [](Instance& i) { i.tasks[0].npe = 0; }},
        {"task.backup_of", [](Instance& i) { i.tasks[0].role = Role::Backup; }},
        {"task.backup_of", [](Instance& i) { i.tasks[0].backup_of = 12345; }},
        {"task.id", [](Instance& i) { i.tasks.push_back(i.tasks[0]); }},
        {"node.mips", [](Instance& i) { i.nodes[0].mips = 0; }},
        {"node.v_max", [](Instance& i) { i.nodes[0].v_max = -1; }},
        {"node.f_max", [](Instance& i) { i.nodes[0].f_max = 0; }},
        {"node.npe_slots", [](Instance& i) { i.nodes[0].npe_slots = 0; }},
        {"node.npe_slots", [](Instance& i) { i.nodes[0].npe_slots = 65; }},
        {"node.activity", [](Instance& i) { i.nodes[0].activity = 1.5; }},
        {"node.load_cap", [](Instance& i) { i.nodes[0].load_cap = -1e-9; }},
        {"node.static_power", [](Instance& i) { i.nodes[0].static_power = -1; }},
        {"node.id", [](Instance& i) { i.nodes.push_back(i.nodes[0]); }},
        {"dvfs.levels", [](Instance& i) { i.dvfs.levels = {0.6, 0.8}; }},
        {"dvfs.levels", [](Instance& i) { i.dvfs.levels = {0.8, 0.7, 1.0}; }},
        {"dvfs.levels", [](Instance& i) { i.dvfs.levels = {1.0, 1.5}; }},
        {"dvfs.levels", [](Instance& i) { i.dvfs.levels = {0.4, 1.0}; }},
        {"fault_model.lambda0", [](Instance& i) { i.fault_model.lambda0 = -1e-6; }},
        {"fault_model.d", [](Instance& i) { i.fault_model.d = 0; }},
        {"fault_model.f_min", [](Instance& i) { i.fault_model.f_min = 1.0; }},
        {"fault_model.d_volt", [](Instance& i) { i.fault_model.d_volt = 0; }},
    };
}

}  // namespace

TEST(Validation, WellFormedInstanceAccepted) {
    EXPECT_TRUE(validation_errors(two_by_two()).empty());
    EXPECT_NO_THROW(validate_instance(two_by_two()));
}

TEST(Validation, DeadlineAtSubmitRejected) {
    auto inst = two_by_two();
    inst.tasks[0].deadline = inst.tasks[0].submit_time;
    const auto errs = validation_errors(inst);
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_EQ(errs[0].message, "deadline must exceed submit_time");
    EXPECT_THROW(validate_instance(inst), InvalidInstance);
}

TEST(Validation, DvfsWithoutFullSpeedRejected) {
    auto inst = two_by_two();
    inst.dvfs.levels = {0.6, 0.8};
    const auto errs = validation_errors(inst);
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_EQ(errs[0].message, "levels must contain 1.0");
}

TEST(Validation, BackupRecordsMustNamePrimary) {
    auto inst = two_by_two();
    auto b = mk_task(3, 1000, 2.0);
    b.role = Role::Backup;
    b.backup_of = 1;
    inst.tasks.push_back(b);
    EXPECT_TRUE(validation_errors(inst).empty());
    EXPECT_EQ(primary_tasks(inst.tasks).size(), 2u);
}

TEST(Validation, ExceptionCarriesEveryError) {
    auto inst = two_by_two();
    inst.tasks[0].length = -5;
    inst.nodes[1].mips = 0;
    try {
        validate_instance(inst);
        FAIL() << "expected InvalidInstance";
    } catch (const InvalidInstance& e) {
        EXPECT_EQ(e.errors().size(), 2u);
        EXPECT_NE(std::string(e.what()).find("task 1 length"), std::string::npos);
    }
}

// Each mutation breaks exactly one invariant and must surface as exactly one
// error naming that field.
TEST(Validation, SingleMutationGivesSingleError) {
    Stream rng(derive_seed(7, {1}));
    const auto muts = mutations();
    for (int trial = 0; trial < 500; ++trial) {
        auto inst = random_instance(rng, {6, 3, 3, 3.0});
        ASSERT_TRUE(validation_errors(inst).empty());
        const auto& [field, mutate] = muts[static_cast<std::size_t>(trial) % muts.size()];
        mutate(inst);
        const auto errs = validation_errors(inst);
        ASSERT_EQ(errs.size(), 1u) << field << " trial " << trial;
        EXPECT_EQ(errs[0].record + "." + errs[0].field, field);
    }
}

TEST(Records, EqualityIsStructural) {
    auto a = two_by_two();
    auto b = two_by_two();
    EXPECT_EQ(a, b);
    b.nodes[0].ram = 512;
    EXPECT_NE(a, b);
}

TEST(NodeIndex, UnknownIdThrows) {
    NodeIndex idx(two_by_two().nodes);
    EXPECT_EQ(idx.at(2), 1u);
    EXPECT_THROW(idx.at(7), std::invalid_argument);
}
