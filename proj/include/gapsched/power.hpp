#ifndef GAPSCHED_POWER_HPP
#define GAPSCHED_POWER_HPP

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include "gapsched/model.hpp"
#include "gapsched/random.hpp"

namespace gapsched {

struct PowerSample {
    double watts = 0.0;
    double volts = 0.0;
    double hertz = 0.0;
};

/// CMOS switching power alpha * C_L * V^2 * f.
inline double dynamic_power(const FogNode& node, double volts, double hertz) {
    if (!(volts >= 0 && volts <= node.v_max)) throw RangeError("dynamic_power: volts outside [0, v_max]");
    if (!(hertz >= 0 && hertz <= node.f_max)) throw RangeError("dynamic_power: hertz outside [0, f_max]");
    return node.activity * node.load_cap * volts * volts * hertz;
}

/// Operating point at DVFS factor rho: (rho * v_max, rho * f_max).
inline std::pair<double, double> scaled_vf(const FogNode& node, double rho) {
    if (!(rho > 0 && rho <= 1)) throw RangeError("scaled_vf: rho outside (0, 1]");
    return {rho * node.v_max, rho * node.f_max};
}

inline PowerSample operating_point(const FogNode& node, double rho) {
    const auto [v, f] = scaled_vf(node, rho);
    return {dynamic_power(node, v, f), v, f};
}

inline double full_power(const FogNode& node) { return dynamic_power(node, node.v_max, node.f_max); }

/// Energy of running `seconds` on `node` at factor `rho` (dynamic + static draw).
inline double run_energy(const FogNode& node, double rho, double seconds) {
    return (operating_point(node, rho).watts + node.static_power) * seconds;
}

inline double entry_energy(const FogNode& node, const ScheduleEntry& entry) {
    return run_energy(node, entry.rho, entry.exec_time);
}

/// Sum of full-speed power over the nodes the entries run on.
inline double total_power_full(const std::vector<FogNode>& nodes, std::span<const ScheduleEntry> entries) {
    const NodeIndex index(nodes);
    CompensatedSum sum;
    for (const auto& e : entries) sum.add(full_power(nodes[index.at(e.node_id)]));
    return sum.value();
}

/// Same as total_power_full but at each entry's own scale factor.
inline double total_power(const std::vector<FogNode>& nodes, std::span<const ScheduleEntry> entries) {
    const NodeIndex index(nodes);
    CompensatedSum sum;
    for (const auto& e : entries) sum.add(operating_point(nodes[index.at(e.node_id)], e.rho).watts);
    return sum.value();
}

/// Total energy of a set of entries. Summed in (task, phase, start) order so
/// the result does not depend on the order entries were produced in.
inline double schedule_energy(const std::vector<FogNode>& nodes, std::span<const ScheduleEntry> entries) {
    const NodeIndex index(nodes);
    std::vector<const ScheduleEntry*> order;
    order.reserve(entries.size());
    for (const auto& e : entries) order.push_back(&e);
    std::sort(order.begin(), order.end(), [](const ScheduleEntry* a, const ScheduleEntry* b) {
        if (a->task_id != b->task_id) return a->task_id < b->task_id;
        if (a->phase != b->phase) return a->phase < b->phase;
        return a->start < b->start;
    });
    CompensatedSum sum;
    for (const auto* e : order) sum.add(entry_energy(nodes[index.at(e->node_id)], *e));
    return sum.value();
}

}  // namespace gapsched

#endif  // GAPSCHED_POWER_HPP
