#include <cmath>
#include <vector>

#include "gapsched/power.hpp"
#include "gapsched/random.hpp"
#include "support.hpp"

using namespace gapsched;

namespace {

// Independent reference: alpha * C * V^2 * f written out.
double ref_power(double alpha, double c, double v, double f) { return alpha * c * v * v * f; }

FogNode paper_node() {
    FogNode n;
    n.activity = 0.5;
    n.load_cap = 2e-9;
    n.v_max = 1.2;
    n.f_max = 1e9;
    return n;
}

}  // namespace

TEST(DynamicPower, HandEvaluated) {
    const auto n = paper_node();
    EXPECT_TRUE(rel_near(dynamic_power(n, 1.2, 1e9), 1.44));
    EXPECT_TRUE(rel_near(dynamic_power(n, 1.2, 1e9), ref_power(0.5, 2e-9, 1.2, 1e9)));
}

TEST(DynamicPower, ZeroActivity) {
    auto n = paper_node();
    n.activity = 0;
    EXPECT_EQ(dynamic_power(n, 1.2, 1e9), 0.0);
    EXPECT_EQ(dynamic_power(n, 0.3, 2e8), 0.0);
}

TEST(DynamicPower, HalfScaleIsOneEighth) {
    const auto n = paper_node();
    EXPECT_TRUE(rel_near(operating_point(n, 0.5).watts, 0.18));
}

TEST(DynamicPower, OutOfRangeThrows) {
    const auto n = paper_node();
    EXPECT_THROW(dynamic_power(n, 1.3, 1e9), RangeError);
    EXPECT_THROW(dynamic_power(n, 1.2, 2e9), RangeError);
    EXPECT_THROW(dynamic_power(n, -0.1, 1e9), RangeError);
}

TEST(DynamicPower, StrictlyIncreasingInEachArgument) {
    const auto n = paper_node();
    double prev = 0;
    for (double v = 0.1; v <= 1.2; v += 0.1) {
        const double p = dynamic_power(n, v, 5e8);
        EXPECT_GT(p, prev);
        prev = p;
    }
    prev = 0;
    for (double f = 1e8; f <= 1e9; f += 1e8) {
        const double p = dynamic_power(n, 0.9, f);
        EXPECT_GT(p, prev);
        prev = p;
    }
}

TEST(ScaledVf, Examples) {
    auto n = paper_node();
    EXPECT_EQ(scaled_vf(n, 1.0), std::make_pair(1.2, 1e9));
    n.f_max = 2e9;
    const auto [v, f] = scaled_vf(n, 0.8);
    EXPECT_TRUE(rel_near(v, 0.96));
    EXPECT_TRUE(rel_near(f, 1.6e9));
    EXPECT_THROW(scaled_vf(n, 1.1), RangeError);
    EXPECT_THROW(scaled_vf(n, 0.0), RangeError);
}

TEST(ScaledVf, CubicIdentity) {
    Stream rng(derive_seed(11, {}));
    for (int i = 0; i < 1000; ++i) {
        FogNode n;
        n.v_max = rng.uniform(0.5, 2.0);
        n.f_max = rng.uniform(1e8, 4e9);
        n.activity = rng.uniform(0.01, 1.0);
        n.load_cap = rng.uniform(1e-11, 1e-8);
        const double rho = rng.uniform(0.05, 1.0);
        const double want = rho * rho * rho * ref_power(n.activity, n.load_cap, n.v_max, n.f_max);
        ASSERT_TRUE(rel_near(operating_point(n, rho).watts, want, 1e-12)) << "rho=" << rho;
    }
}

TEST(Energy, HandEvaluated) {
    const auto n = paper_node();
    EXPECT_TRUE(rel_near(run_energy(n, 1.0, 2.0), 2.88));
    EXPECT_EQ(run_energy(n, 1.0, 0.0), 0.0);
}

TEST(Energy, StaticPowerAdds) {
    auto n = paper_node();
    n.static_power = 0.5;
    EXPECT_TRUE(rel_near(run_energy(n, 1.0, 2.0), (1.44 + 0.5) * 2.0));
}

TEST(Energy, AdditiveAndOrderIndependent) {
    const std::vector<FogNode> nodes{paper_node()};
    std::vector<ScheduleEntry> entries;
    Stream rng(derive_seed(12, {}));
    double sum = 0;
    for (int i = 0; i < 50; ++i) {
        ScheduleEntry e;
        e.task_id = i;
        e.exec_time = rng.uniform(0.1, 3.0);
        e.rho = 0.5 + 0.1 * (i % 6);
        entries.push_back(e);
        sum += entry_energy(nodes[0], e);
    }
    const double forward = schedule_energy(nodes, entries);
    std::reverse(entries.begin(), entries.end());
    EXPECT_EQ(forward, schedule_energy(nodes, entries));
    EXPECT_TRUE(rel_near(forward, sum, 1e-12));
}

TEST(TotalPower, Examples) {
    const std::vector<FogNode> nodes{paper_node()};
    EXPECT_EQ(total_power_full(nodes, {}), 0.0);
    ScheduleEntry e;
    e.exec_time = 1.0;
    const std::vector<ScheduleEntry> two{e, e};
    EXPECT_TRUE(rel_near(total_power_full(nodes, two), 2.88));
    std::vector<ScheduleEntry> slow = two;
    for (auto& x : slow) x.rho = 0.6;
    EXPECT_LE(total_power(nodes, slow), total_power_full(nodes, slow));
    EXPECT_TRUE(rel_near(total_power(nodes, slow), 2 * 0.216 * 1.44));
}
