#ifndef GAPSCHED_IO_HPP
#define GAPSCHED_IO_HPP

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include <nlohmann/json.hpp>

#include "gapsched/model.hpp"
#include "gapsched/sim.hpp"

namespace gapsched {

using Json = nlohmann::ordered_json;

/// Failure to read or write a file.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form, '.' separator regardless of locale.
inline std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

inline Json to_json(const Task& t) {
    Json j;
    j["id"] = t.id;
    j["length"] = t.length;
    j["deadline"] = t.deadline;
    j["submit_time"] = t.submit_time;
    j["npe"] = t.npe;
    j["role"] = to_string(t.role);
    if (t.backup_of) j["backup_of"] = *t.backup_of;
    return j;
}

inline Json to_json(const FogNode& n) {
    return Json{{"id", n.id},           {"mips", n.mips},         {"bandwidth", n.bandwidth},
                {"ram", n.ram},         {"npe_slots", n.npe_slots}, {"v_max", n.v_max},
                {"f_max", n.f_max},     {"activity", n.activity}, {"load_cap", n.load_cap},
                {"static_power", n.static_power}};
}

inline Json to_json(const DvfsConfig& d) { return Json{{"levels", d.levels}}; }

inline Json to_json(const FaultModel& f) {
    return Json{{"lambda0", f.lambda0}, {"d", f.d}, {"f_min", f.f_min}, {"d_volt", f.d_volt}};
}

inline Json to_json(const Instance& inst) {
    Json j;
    j["tasks"] = Json::array();
    for (const auto& t : inst.tasks) j["tasks"].push_back(to_json(t));
    j["nodes"] = Json::array();
    for (const auto& n : inst.nodes) j["nodes"].push_back(to_json(n));
    j["dvfs"] = to_json(inst.dvfs);
    j["fault_model"] = to_json(inst.fault_model);
    return j;
}

namespace detail {

template <class T>
void read(const Json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

template <class T>
void require(const Json& j, const char* key, T& out, const char* what) {
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument(std::string(what) + " record missing field '" + key + "'");
    out = it->template get<T>();
}

}  // namespace detail

inline Task task_from_json(const Json& j) {
    Task t;
    detail::require(j, "id", t.id, "task");
    detail::require(j, "length", t.length, "task");
    detail::require(j, "deadline", t.deadline, "task");
    detail::read(j, "submit_time", t.submit_time);
    detail::read(j, "npe", t.npe);
    if (auto it = j.find("role"); it != j.end()) {
        const auto r = it->get<std::string>();
        if (r == "Primary") t.role = Role::Primary;
        else if (r == "Backup") t.role = Role::Backup;
        else throw std::invalid_argument("task role must be Primary or Backup, got '" + r + "'");
    }
    if (auto it = j.find("backup_of"); it != j.end() && !it->is_null()) t.backup_of = it->get<TaskId>();
    return t;
}

inline FogNode node_from_json(const Json& j) {
    FogNode n;
    detail::require(j, "id", n.id, "node");
    detail::require(j, "mips", n.mips, "node");
    detail::read(j, "bandwidth", n.bandwidth);
    detail::read(j, "ram", n.ram);
    detail::read(j, "npe_slots", n.npe_slots);
    detail::read(j, "v_max", n.v_max);
    detail::read(j, "f_max", n.f_max);
    detail::read(j, "activity", n.activity);
    detail::read(j, "load_cap", n.load_cap);
    detail::read(j, "static_power", n.static_power);
    return n;
}

inline DvfsConfig dvfs_from_json(const Json& j) {
    DvfsConfig d;
    detail::read(j, "levels", d.levels);
    return d;
}

inline FaultModel fault_model_from_json(const Json& j) {
    FaultModel f;
    detail::read(j, "lambda0", f.lambda0);
    detail::read(j, "d", f.d);
    detail::read(j, "f_min", f.f_min);
    detail::read(j, "d_volt", f.d_volt);
    return f;
}

/// Parses an instance document without validating it.
inline Instance instance_from_json(const Json& j) {
    Instance inst;
    if (auto it = j.find("tasks"); it != j.end())
        for (const auto& t : *it) inst.tasks.push_back(task_from_json(t));
    if (auto it = j.find("nodes"); it != j.end())
        for (const auto& n : *it) inst.nodes.push_back(node_from_json(n));
    if (auto it = j.find("dvfs"); it != j.end()) inst.dvfs = dvfs_from_json(*it);
    if (auto it = j.find("fault_model"); it != j.end()) inst.fault_model = fault_model_from_json(*it);
    return inst;
}

inline std::string dump_instance(const Instance& inst) { return to_json(inst).dump(2) + "\n"; }

inline Instance parse_instance(const std::string& text) {
    try {
        return instance_from_json(Json::parse(text));
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("malformed instance document: ") + e.what());
    }
}

/// Reads and validates an instance file.
inline Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read instance file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    Instance inst = parse_instance(buf.str());
    validate_instance(inst);
    return inst;
}

inline void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write instance file '" + path + "'");
    out << dump_instance(inst);
    if (!out) throw IoError("write failed for '" + path + "'");
}

/// One JSON object per line: {"time":..,"kind":..,"task":..,"node":..};
/// node is null for arrivals.
inline void write_trace(std::ostream& out, const RunTrace& trace) {
    for (const auto& e : trace.events) {
        out << "{\"time\":" << format_number(e.time) << ",\"kind\":\"" << to_string(e.kind)
            << "\",\"task\":" << e.task_id << ",\"node\":";
        if (e.node_id < 0) out << "null";
        else out << e.node_id;
        out << "}\n";
    }
}

}  // namespace gapsched

#endif  // GAPSCHED_IO_HPP
