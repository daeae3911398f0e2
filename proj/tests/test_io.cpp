#include <filesystem>
#include <fstream>
#include <sstream>

#include "gapsched/io.hpp"
#include "gapsched/workload.hpp"
#include "support.hpp"

using namespace gapsched;

namespace {

Instance sample() {
    auto [tasks, nodes] = generate(sized_workload(20, 4, 8));
    auto b = mk_task(100, 1200, 3.5, 0.25, 2);
    b.role = Role::Backup;
    b.backup_of = 0;
    tasks.push_back(b);
    Instance inst{tasks, nodes, {}, {}};
    inst.fault_model.lambda0 = 3e-4;
    return inst;
}

}  // namespace

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(1e-5), "1e-05");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(InstanceJson, RoundTripIsByteIdentical) {
    const auto inst = sample();
    const auto text = dump_instance(inst);
    const auto back = parse_instance(text);
    EXPECT_EQ(back, inst);
    EXPECT_EQ(dump_instance(back), text);
}

TEST(InstanceJson, OptionalFieldsDefault) {
    const auto inst = parse_instance(R"({"tasks":[{"id":1,"length":1000,"deadline":2}],"nodes":[{"id":3,"mips":1500}]})");
    ASSERT_EQ(inst.tasks.size(), 1u);
    EXPECT_EQ(inst.tasks[0].npe, 1);
    EXPECT_EQ(inst.tasks[0].role, Role::Primary);
    EXPECT_EQ(inst.nodes[0].npe_slots, 1);
    EXPECT_EQ(inst.dvfs, DvfsConfig{});
}

TEST(InstanceJson, Errors) {
    EXPECT_THROW(parse_instance("{"), std::invalid_argument);
    EXPECT_THROW(parse_instance(R"({"tasks":[{"id":1,"deadline":2}]})"), std::invalid_argument);
    EXPECT_THROW(parse_instance(R"({"tasks":[{"id":1,"length":5,"deadline":2,"role":"Spare"}]})"),
                 std::invalid_argument);
    EXPECT_THROW(load_instance("/nonexistent/instance.json"), IoError);
}

TEST(InstanceJson, LoadValidates) {
    const auto dir = std::filesystem::temp_directory_path() / "gapsched_io_test";
    std::filesystem::create_directories(dir);
    auto inst = sample();
    save_instance(inst, (dir / "ok.json").string());
    EXPECT_EQ(load_instance((dir / "ok.json").string()), inst);
    inst.dvfs.levels = {0.7, 0.9};
    save_instance(inst, (dir / "bad.json").string());
    EXPECT_THROW(load_instance((dir / "bad.json").string()), InvalidInstance);
    std::filesystem::remove_all(dir);
}

TEST(Trace, OneJsonObjectPerLine) {
    RunTrace t;
    t.events = {{0.0, EventKind::Arrival, 1, -1}, {0.5, EventKind::Start, 1, 2}};
    std::ostringstream out;
    write_trace(out, t);
    EXPECT_EQ(out.str(),
              "{\"time\":0,\"kind\":\"Arrival\",\"task\":1,\"node\":null}\n"
              "{\"time\":0.5,\"kind\":\"Start\",\"task\":1,\"node\":2}\n");
}
