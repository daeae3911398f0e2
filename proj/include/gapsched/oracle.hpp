#ifndef GAPSCHED_ORACLE_HPP
#define GAPSCHED_ORACLE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gapsched/gap.hpp"
#include "gapsched/model.hpp"
#include "gapsched/power.hpp"
#include "gapsched/slots.hpp"

// Brute-force reference for small instances. Every (assignment, global rho)
// pair is sequenced per node in EDF order and checked against deadlines.
// Energy does not depend on sequencing, so fixing EDF keeps the minimum
// energy exact.

namespace gapsched {

class OracleTooLarge : public std::length_error {
  public:
    using std::length_error::length_error;
};

inline constexpr double kOracleLimit = 1e7;

struct OracleResult {
    std::optional<double> best_energy;
    std::vector<NodeId> best_assignment;  // aligned with EDF-sorted tasks
    std::vector<TaskId> task_order;
    double best_rho = 1.0;
    std::int64_t feasible_count = 0;
    std::int64_t enumerated = 0;
};

/// Sequences EDF-sorted `tasks` onto node positions `choice` at `rho`.
/// Returns nullopt if any task misses its deadline or does not fit.
inline std::optional<Schedule> materialize(const std::vector<Task>& sorted, const std::vector<FogNode>& nodes,
                                           const std::vector<std::size_t>& choice, double rho) {
    SlotBoard board(nodes);
    Schedule s;
    s.selected_rho = rho;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& t = sorted[i];
        const auto p = board.probe(choice[i], t.npe, t.submit_time);
        if (!p.fits) return std::nullopt;
        const double exec = exec_time(t, nodes[choice[i]], rho);
        if (p.start + exec > t.deadline) return std::nullopt;
        board.reserve(choice[i], p.mask, p.start + exec);
        ScheduleEntry e{t.id, nodes[choice[i]].id, p.start, exec, p.start + exec, rho, Phase::Primary, p.mask};
        s.assignment[t.id] = e.node_id;
        s.entries.push_back(e);
    }
    return s;
}

inline OracleResult exhaustive(const std::vector<Task>& tasks, const std::vector<FogNode>& nodes,
                               const DvfsConfig& dvfs) {
    const auto sorted = edf_sort(primary_tasks(tasks));
    const std::size_t n = sorted.size();
    const std::size_t m = nodes.size();
    const double space = std::pow(static_cast<double>(m), static_cast<double>(n)) *
                         static_cast<double>(dvfs.levels.size());
    if (space > kOracleLimit) throw OracleTooLarge("oracle: search space exceeds 1e7 candidates");

    OracleResult r;
    for (const auto& t : sorted) r.task_order.push_back(t.id);
    std::vector<std::size_t> best_choice;
    if (m == 0 && n > 0) return r;

    for (double rho : dvfs.levels) {
        std::vector<std::size_t> choice(n, 0);
        while (true) {
            ++r.enumerated;
            if (auto s = materialize(sorted, nodes, choice, rho)) {
                ++r.feasible_count;
                const double e = schedule_energy(nodes, s->entries);
                const bool better =
                    !r.best_energy || e < *r.best_energy || (e == *r.best_energy && choice < best_choice);
                if (better) {
                    r.best_energy = e;
                    best_choice = choice;
                    r.best_rho = rho;
                }
            }
            // Odometer increment over node positions.
            std::size_t i = 0;
            while (i < n && ++choice[i] == m) choice[i++] = 0;
            if (i == n) break;
        }
    }
    for (auto c : best_choice) r.best_assignment.push_back(nodes[c].id);
    return r;
}

}  // namespace gapsched

#endif  // GAPSCHED_ORACLE_HPP
