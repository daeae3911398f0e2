#ifndef GAPSCHED_MODEL_HPP
#define GAPSCHED_MODEL_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gapsched {

using TaskId = std::int64_t;
using NodeId = std::int64_t;

/// Thrown when an argument lies outside the domain of a model function.
class RangeError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

enum class Role { Primary, Backup };
enum class Phase { Primary, Backup };

inline const char* to_string(Role r) { return r == Role::Primary ? "Primary" : "Backup"; }
inline const char* to_string(Phase p) { return p == Phase::Primary ? "Primary" : "Backup"; }

/// A unit of user work. Times are seconds from the time origin, length is in MI.
struct Task {
    TaskId id = 0;
    std::int64_t length = 0;
    double deadline = 0.0;
    double submit_time = 0.0;
    int npe = 1;
    Role role = Role::Primary;
    std::optional<TaskId> backup_of;

    bool operator==(const Task&) const = default;
};

/// A fog resource (VM). `mips` is the throughput at full frequency.
struct FogNode {
    NodeId id = 0;
    double mips = 1000.0;
    double bandwidth = 1000.0;
    double ram = 256.0;
    int npe_slots = 1;
    double v_max = 1.2;
    double f_max = 1e9;
    double activity = 0.5;
    double load_cap = 2e-9;
    double static_power = 0.0;

    bool operator==(const FogNode&) const = default;
};

/// Ordered DVFS scale factors; the last level is always full speed.
struct DvfsConfig {
    std::vector<double> levels{0.6, 0.7, 0.8, 0.9, 1.0};

    bool operator==(const DvfsConfig&) const = default;
};

/// Transient-fault model parameters.
///
/// `d` is the dimensionless sensitivity of the frequency-based rate; `d_volt`
/// is the voltage-based sensitivity in volts. The two are independent knobs.
/// With the defaults both rates coincide at every scale factor for a 1.2 V node.
struct FaultModel {
    double lambda0 = 1e-5;
    double d = 3.0;
    double f_min = 0.5;
    double d_volt = 0.2;

    bool operator==(const FaultModel&) const = default;
};

struct ScheduleEntry {
    TaskId task_id = 0;
    NodeId node_id = 0;
    double start = 0.0;
    double exec_time = 0.0;
    double completion = 0.0;
    double rho = 1.0;
    Phase phase = Phase::Primary;
    /// Node slots occupied by this entry (bit i = slot i).
    std::uint64_t slot_mask = 0;

    bool operator==(const ScheduleEntry&) const = default;
};

/// Bookkeeping emitted by the schedulers; not part of the schedule proper.
struct ScheduleStats {
    int candidates_built = 0;
    std::int64_t payoff_evaluations = 0;

    bool operator==(const ScheduleStats&) const = default;
};

struct Schedule {
    std::vector<ScheduleEntry> entries;
    std::map<TaskId, NodeId> assignment;
    double selected_rho = 1.0;
    std::vector<TaskId> backup_list;
    std::vector<TaskId> failed;
    int cp = 0;
    int cb = 0;
    ScheduleStats stats;

    bool operator==(const Schedule&) const = default;
};

struct FaultEvent {
    TaskId task_id = 0;
    NodeId node_id = 0;
    double elapsed = 0.0;

    bool operator==(const FaultEvent&) const = default;
};

struct MetricsReport {
    double total_energy = 0.0;
    std::optional<double> avg_completion;
    std::optional<double> avg_wait;
    double avg_power = 0.0;
    int cp = 0;
    int cb = 0;
    int missed_deadlines = 0;
    double reliability_estimate = 1.0;
    // Extras beyond the headline metrics.
    double makespan = 0.0;
    double model_reliability = 1.0;
    int completed = 0;
    int completed_via_backup = 0;
    int failed = 0;
    int faults = 0;

    bool operator==(const MetricsReport&) const = default;
};

struct Instance {
    std::vector<Task> tasks;
    std::vector<FogNode> nodes;
    DvfsConfig dvfs;
    FaultModel fault_model;

    bool operator==(const Instance&) const = default;
};

/// One violated invariant, naming the offending record and field.
struct ValidationError {
    std::string record;  // "task", "node", "dvfs", "fault_model"
    std::int64_t id = -1;
    std::string field;
    std::string message;

    bool operator==(const ValidationError&) const = default;
};

inline std::string describe(const ValidationError& e) {
    std::string s = e.record;
    if (e.id >= 0) s += " " + std::to_string(e.id);
    return s + " " + e.field + ": " + e.message;
}

/// Thrown by loaders and schedulers when handed an invalid instance.
class InvalidInstance : public std::runtime_error {
  public:
    explicit InvalidInstance(std::vector<ValidationError> errors)
        : std::runtime_error(summary(errors)), errors_(std::move(errors)) {}

    const std::vector<ValidationError>& errors() const noexcept { return errors_; }

  private:
    static std::string summary(const std::vector<ValidationError>& errors) {
        std::string s = "invalid instance";
        for (const auto& e : errors) s += "; " + describe(e);
        return s;
    }
    std::vector<ValidationError> errors_;
};

inline void check_task(const Task& t, std::vector<ValidationError>& out) {
    auto err = [&](const char* field, const char* msg) { out.push_back({"task", t.id, field, msg}); };
    if (t.length <= 0) err("length", "length must be positive");
    if (t.submit_time < 0) err("submit_time", "submit_time must be non-negative");
    if (!(t.deadline > t.submit_time)) err("deadline", "deadline must exceed submit_time");
    if (t.npe < 1 || t.npe > 8) err("npe", "npe must lie in [1, 8]");
    if ((t.role == Role::Backup) != t.backup_of.has_value())
        err("backup_of", "backup_of must be set iff role is Backup");
}

inline void check_node(const FogNode& n, std::vector<ValidationError>& out) {
    auto err = [&](const char* field, const char* msg) { out.push_back({"node", n.id, field, msg}); };
    if (!(n.mips > 0)) err("mips", "mips must be positive");
    if (!(n.v_max > 0)) err("v_max", "v_max must be positive");
    if (!(n.f_max > 0)) err("f_max", "f_max must be positive");
    if (n.npe_slots < 1 || n.npe_slots > 64) err("npe_slots", "npe_slots must lie in [1, 64]");
    if (!(n.activity >= 0 && n.activity <= 1)) err("activity", "activity must lie in [0, 1]");
    if (!(n.load_cap >= 0)) err("load_cap", "load_cap must be non-negative");
    if (!(n.static_power >= 0)) err("static_power", "static_power must be non-negative");
}

inline void check_dvfs(const DvfsConfig& d, std::vector<ValidationError>& out) {
    auto err = [&](const char* msg) { out.push_back({"dvfs", -1, "levels", msg}); };
    if (std::find(d.levels.begin(), d.levels.end(), 1.0) == d.levels.end()) err("levels must contain 1.0");
    for (std::size_t i = 0; i < d.levels.size(); ++i) {
        const double v = d.levels[i];
        if (!(v > 0 && v <= 1)) {
            err("every level must lie in (0, 1]");
            break;
        }
    }
    for (std::size_t i = 1; i < d.levels.size(); ++i) {
        if (!(d.levels[i] > d.levels[i - 1])) {
            err("levels must be strictly increasing");
            break;
        }
    }
}

inline void check_fault_model(const FaultModel& f, std::vector<ValidationError>& out) {
    auto err = [&](const char* field, const char* msg) { out.push_back({"fault_model", -1, field, msg}); };
    if (!(f.lambda0 >= 0)) err("lambda0", "lambda0 must be non-negative");
    if (!(f.d > 0)) err("d", "d must be positive");
    if (!(f.f_min > 0 && f.f_min < 1)) err("f_min", "f_min must lie in (0, 1)");
    if (!(f.d_volt > 0)) err("d_volt", "d_volt must be positive");
}

/// Checks every record invariant and returns all violations (empty means valid).
inline std::vector<ValidationError> validation_errors(const Instance& inst) {
    std::vector<ValidationError> out;
    std::set<TaskId> task_ids;
    std::set<TaskId> primary_ids;
    for (const auto& t : inst.tasks) {
        check_task(t, out);
        if (!task_ids.insert(t.id).second) out.push_back({"task", t.id, "id", "duplicate task id"});
        if (t.role == Role::Primary) primary_ids.insert(t.id);
    }
    for (const auto& t : inst.tasks) {
        if (t.role == Role::Backup && t.backup_of && !primary_ids.contains(*t.backup_of))
            out.push_back({"task", t.id, "backup_of", "backup_of must name a primary task"});
    }
    std::set<NodeId> node_ids;
    for (const auto& n : inst.nodes) {
        check_node(n, out);
        if (!node_ids.insert(n.id).second) out.push_back({"node", n.id, "id", "duplicate node id"});
    }
    check_dvfs(inst.dvfs, out);
    check_fault_model(inst.fault_model, out);
    if (!inst.dvfs.levels.empty() && inst.dvfs.levels.front() < inst.fault_model.f_min &&
        inst.fault_model.f_min > 0 && inst.fault_model.f_min < 1)
        out.push_back({"dvfs", -1, "levels", "lowest level must not fall below fault_model.f_min"});
    return out;
}

/// Returns the instance unchanged when valid, throws InvalidInstance with every violation otherwise.
inline const Instance& validate_instance(const Instance& inst) {
    auto errors = validation_errors(inst);
    if (!errors.empty()) throw InvalidInstance(std::move(errors));
    return inst;
}

/// Primary-role tasks; backup records are realized by the runtime, not scheduled directly.
inline std::vector<Task> primary_tasks(const std::vector<Task>& tasks) {
    std::vector<Task> out;
    out.reserve(tasks.size());
    for (const auto& t : tasks)
        if (t.role == Role::Primary) out.push_back(t);
    return out;
}

/// id -> position lookup over a node list.
class NodeIndex {
  public:
    NodeIndex() = default;
    explicit NodeIndex(const std::vector<FogNode>& nodes) {
        for (std::size_t i = 0; i < nodes.size(); ++i) pos_.emplace(nodes[i].id, i);
    }
    std::size_t at(NodeId id) const {
        auto it = pos_.find(id);
        if (it == pos_.end()) throw std::invalid_argument("unknown node id " + std::to_string(id));
        return it->second;
    }
    bool contains(NodeId id) const { return pos_.contains(id); }

  private:
    std::unordered_map<NodeId, std::size_t> pos_;
};

}  // namespace gapsched

#endif  // GAPSCHED_MODEL_HPP
