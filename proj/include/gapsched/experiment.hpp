#ifndef GAPSCHED_EXPERIMENT_HPP
#define GAPSCHED_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gapsched/baselines.hpp"
#include "gapsched/gap.hpp"
#include "gapsched/io.hpp"
#include "gapsched/model.hpp"
#include "gapsched/sim.hpp"
#include "gapsched/workload.hpp"

namespace gapsched {

enum class Algorithm { Gap, Wgap, Fcfs, Sjf, Rr, Pso };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Gap, Algorithm::Wgap, Algorithm::Fcfs,
                                               Algorithm::Sjf, Algorithm::Rr,   Algorithm::Pso};

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Gap: return "gap";
        case Algorithm::Wgap: return "wgap";
        case Algorithm::Fcfs: return "fcfs";
        case Algorithm::Sjf: return "sjf";
        case Algorithm::Rr: return "rr";
        case Algorithm::Pso: return "pso";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& name) {
    for (auto a : kAllAlgorithms)
        if (name == to_string(a)) return a;
    return std::nullopt;
}

struct EmitSet {
    bool csv = true;
    bool svg = false;
    bool trace = false;
};

struct ExperimentConfig {
    std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
    /// Generated workload (ignored when `instance_path` is set or `sweep` is on).
    WorkloadSpec workload = sized_workload(10, 4);
    std::optional<std::string> instance_path;
    bool paper_sweep = false;
    FaultModel fault_model;
    DvfsConfig dvfs;
    int seeds = 1;
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";
    EmitSet emit;
    PsoConfig pso;
    GapOptions gap;
    unsigned workers = 0;  // 0 = hardware concurrency
};

inline std::vector<ValidationError> config_errors(const ExperimentConfig& cfg) {
    std::vector<ValidationError> out;
    if (cfg.algorithms.empty()) out.push_back({"config", -1, "algorithms", "algorithms must be non-empty"});
    if (cfg.seeds < 1) out.push_back({"config", -1, "seeds", "seeds must be at least 1"});
    check_dvfs(cfg.dvfs, out);
    check_fault_model(cfg.fault_model, out);
    if (out.empty() && cfg.dvfs.levels.front() < cfg.fault_model.f_min)
        out.push_back({"dvfs", -1, "levels", "lowest level must not fall below fault_model.f_min"});
    for (auto& e : pso_config_errors(cfg.pso)) out.push_back(e);
    if (!cfg.instance_path)
        for (auto& e : workload_errors(cfg.workload)) out.push_back(e);
    return out;
}

/// One (scenario, seed) workload with its instance.
struct Cell {
    std::string scenario;
    int scenario_index = 0;
    int seed_index = 0;
    Instance instance;
};

struct ResultRow {
    std::string scenario;
    int scenario_index = 0;
    Algorithm algorithm = Algorithm::Gap;
    int seed = 0;
    int n_tasks = 0;
    int n_vms = 0;
    double selected_rho = 1.0;
    MetricsReport report;
    /// Energy-feasibility summary of the plan, before faults.
    std::size_t planned_failed = 0;
    int planned_cp = 0;
    double wall_ms = 0.0;
};

inline constexpr const char* kCsvHeader =
    "scenario_id,algorithm,seed,n_tasks,n_vms,selected_rho,total_energy_j,act_s,awt_s,avg_power_w,cp,cb,"
    "missed_deadlines,reliability_estimate,wall_ms";

inline std::string csv_row(const ResultRow& r) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    std::ostringstream s;
    s << r.scenario << ',' << to_string(r.algorithm) << ',' << r.seed << ',' << r.n_tasks << ',' << r.n_vms << ','
      << format_number(r.selected_rho) << ',' << format_number(r.report.total_energy) << ','
      << opt(r.report.avg_completion) << ',' << opt(r.report.avg_wait) << ',' << format_number(r.report.avg_power)
      << ',' << r.report.cp << ',' << r.report.cb << ',' << r.report.missed_deadlines << ','
      << format_number(r.report.reliability_estimate) << ',' << format_number(r.wall_ms);
    return s.str();
}

inline std::string results_csv(const std::vector<ResultRow>& rows) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) out += csv_row(r) + "\n";
    return out;
}

/// Expands the config into cells (instances are generated here).
inline std::vector<Cell> build_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    if (cfg.instance_path) {
        Instance inst = load_instance(*cfg.instance_path);
        for (int k = 0; k < cfg.seeds; ++k) cells.push_back({"instance", 0, k, inst});
        return cells;
    }
    std::vector<WorkloadSpec> specs;
    if (cfg.paper_sweep) {
        specs = paper_sweep(cfg.master_seed, cfg.seeds, cfg.workload);
    } else {
        for (int k = 0; k < cfg.seeds; ++k) {
            WorkloadSpec w = cfg.workload;
            w.scenario = "t" + std::to_string(w.n_tasks) + "-v" + std::to_string(w.n_vms);
            w.scenario_index = 0;
            w.seed_index = k;
            w.seed = derive_seed(cfg.master_seed, {0, static_cast<std::uint64_t>(k)});
            specs.push_back(w);
        }
    }
    for (const auto& w : specs) {
        auto [tasks, nodes] = generate(w);
        cells.push_back({w.scenario, w.scenario_index, w.seed_index,
                         Instance{std::move(tasks), std::move(nodes), cfg.dvfs, cfg.fault_model}});
    }
    return cells;
}

inline Schedule schedule_with(Algorithm a, const Instance& inst, const ExperimentConfig& cfg, std::uint64_t pso_seed) {
    switch (a) {
        case Algorithm::Gap: return gap_schedule(inst.tasks, inst.nodes, inst.dvfs, inst.fault_model, cfg.gap);
        case Algorithm::Wgap: return wgap_schedule(inst.tasks, inst.nodes, inst.fault_model, cfg.gap);
        case Algorithm::Fcfs: return fcfs_schedule(inst.tasks, inst.nodes);
        case Algorithm::Sjf: return sjf_schedule(inst.tasks, inst.nodes);
        case Algorithm::Rr: return rr_schedule(inst.tasks, inst.nodes);
        case Algorithm::Pso: return pso_schedule(inst.tasks, inst.nodes, cfg.pso, pso_seed);
    }
    return {};
}

struct CellOutput {
    std::vector<ResultRow> rows;
    std::vector<std::pair<Algorithm, RunTrace>> traces;
};

/// Schedules and simulates every configured algorithm on one cell. All
/// algorithms see the same fault stream.
inline CellOutput run_cell(const Cell& cell, const ExperimentConfig& cfg, bool keep_traces = false) {
    CellOutput out;
    const auto sc = static_cast<std::uint64_t>(cell.scenario_index);
    const auto sd = static_cast<std::uint64_t>(cell.seed_index);
    const std::uint64_t fault_seed = derive_seed(cfg.master_seed, {0xfa17, sc, sd});
    const std::uint64_t pso_seed = derive_seed(cfg.master_seed, {0x950, sc, sd});
    const int n_tasks = static_cast<int>(primary_tasks(cell.instance.tasks).size());
    for (auto a : cfg.algorithms) {
        const auto t0 = std::chrono::steady_clock::now();
        const Schedule s = schedule_with(a, cell.instance, cfg, pso_seed);
        FaultSampler sampler(fault_seed);
        RunOptions opt;
        opt.cpb = a == Algorithm::Gap || a == Algorithm::Wgap;
        opt.detection = cfg.gap.detection;
        opt.gap = cfg.gap;
        auto result = run(s, cell.instance, cell.instance.fault_model, sampler, opt);
        const auto t1 = std::chrono::steady_clock::now();

        ResultRow row;
        row.scenario = cell.scenario;
        row.scenario_index = cell.scenario_index;
        row.algorithm = a;
        row.seed = cell.seed_index;
        row.n_tasks = n_tasks;
        row.n_vms = static_cast<int>(cell.instance.nodes.size());
        row.selected_rho = s.selected_rho;
        row.report = result.report;
        row.planned_failed = s.failed.size();
        row.planned_cp = s.cp;
        row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        out.rows.push_back(std::move(row));
        if (keep_traces) out.traces.emplace_back(a, std::move(result.trace));
    }
    return out;
}

/// Runs all cells on a bounded worker pool. Output order is canonical
/// (scenario, seed, algorithm) regardless of scheduling.
inline std::vector<CellOutput> run_cells(const std::vector<Cell>& cells, const ExperimentConfig& cfg,
                                         bool keep_traces = false) {
    std::vector<CellOutput> out(cells.size());
    unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, cells.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) out[i] = run_cell(cells[i], cfg, keep_traces);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

/// Malformed or unknown configuration (a usage error).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
    std::vector<Algorithm> out;
    for (const auto& n : names) {
        auto a = parse_algorithm(n);
        if (!a) throw ConfigError("unknown algorithm '" + n + "' (expected gap, wgap, fcfs, sjf, rr or pso)");
        if (std::find(out.begin(), out.end(), *a) == out.end()) out.push_back(*a);
    }
    return out;
}

inline EmitSet parse_emit(const std::vector<std::string>& names) {
    EmitSet e{false, false, false};
    for (const auto& n : names) {
        if (n == "csv") e.csv = true;
        else if (n == "svg") e.svg = true;
        else if (n == "trace") e.trace = true;
        else throw ConfigError("unknown emit kind '" + n + "' (expected csv, svg or trace)");
    }
    return e;
}

namespace detail {

template <class T>
void read_range(const Json& j, const char* key, Range<T>& r) {
    if (auto it = j.find(key); it != j.end()) {
        if (!it->is_array() || it->size() != 2) throw ConfigError(std::string("workload.") + key + " must be [lo, hi]");
        r.lo = (*it)[0].get<T>();
        r.hi = (*it)[1].get<T>();
    }
}

}  // namespace detail

inline WorkloadSpec workload_from_json(const Json& j, WorkloadSpec w = {}) {
    detail::read(j, "n_tasks", w.n_tasks);
    detail::read(j, "n_vms", w.n_vms);
    detail::read_range(j, "length", w.length);
    detail::read_range(j, "mips", w.mips);
    detail::read_range(j, "npe", w.npe);
    detail::read_range(j, "vm_npe", w.vm_npe);
    detail::read_range(j, "slack_factor", w.slack_factor);
    if (auto it = j.find("submit_model"); it != j.end()) {
        const auto m = it->get<std::string>();
        if (m == "all_zero") w.submit_model = SubmitModel::AllZero;
        else if (m == "uniform") w.submit_model = SubmitModel::Uniform;
        else throw ConfigError("workload.submit_model must be all_zero or uniform");
    }
    detail::read(j, "horizon", w.horizon);
    return w;
}

/// Reads a JSON experiment config. Relative instance paths resolve against
/// the config file's directory when `base_dir` is given.
inline ExperimentConfig config_from_json(const Json& j, const std::string& base_dir = "") {
    ExperimentConfig cfg;
    try {
        if (auto it = j.find("algorithms"); it != j.end())
            cfg.algorithms = parse_algorithms(it->get<std::vector<std::string>>());
        detail::read(j, "seeds", cfg.seeds);
        detail::read(j, "seed", cfg.master_seed);
        detail::read(j, "output_dir", cfg.output_dir);
        detail::read(j, "workers", cfg.workers);
        if (auto it = j.find("emit"); it != j.end()) cfg.emit = parse_emit(it->get<std::vector<std::string>>());
        if (auto it = j.find("workload"); it != j.end()) cfg.workload = workload_from_json(*it, cfg.workload);
        if (auto it = j.find("instance"); it != j.end()) {
            std::filesystem::path p = it->get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
            cfg.instance_path = p.string();
        }
        if (auto it = j.find("sweep"); it != j.end()) {
            if (it->get<std::string>() != "paper") throw ConfigError("sweep must be \"paper\"");
            cfg.paper_sweep = true;
        }
        if (auto it = j.find("fault_model"); it != j.end()) cfg.fault_model = fault_model_from_json(*it);
        if (auto it = j.find("dvfs"); it != j.end()) cfg.dvfs = dvfs_from_json(*it);
        if (auto it = j.find("pso"); it != j.end()) {
            detail::read(*it, "swarm_size", cfg.pso.swarm_size);
            detail::read(*it, "iterations", cfg.pso.iterations);
            detail::read(*it, "w", cfg.pso.w);
            detail::read(*it, "c1", cfg.pso.c1);
            detail::read(*it, "c2", cfg.pso.c2);
            if (auto p = it->find("penalty"); p != it->end() && !p->is_null()) cfg.pso.penalty = p->get<double>();
        }
        if (auto it = j.find("payoff_weights"); it != j.end()) {
            detail::read(*it, "slack", cfg.gap.weights.slack);
            detail::read(*it, "energy", cfg.gap.weights.energy);
        }
        if (auto it = j.find("detection"); it != j.end()) {
            const auto d = it->get<std::string>();
            if (d == "immediate") cfg.gap.detection = DetectionMode::Immediate;
            else if (d == "at_completion") cfg.gap.detection = DetectionMode::AtCompletion;
            else throw ConfigError("detection must be immediate or at_completion");
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError("malformed config '" + path + "': " + e.what());
    }
    return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

// ---------------------------------------------------------------- charts

struct ChartSeries {
    std::string name;
    std::vector<double> y;
};

/// Minimal self-contained line chart.
inline std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::vector<double>& x,
                                  const std::vector<ChartSeries>& series) {
    const double W = 640, H = 400, L = 60, R = 120, T = 40, B = 50;
    const double pw = W - L - R, ph = H - T - B;
    double xmin = x.empty() ? 0 : *std::min_element(x.begin(), x.end());
    double xmax = x.empty() ? 1 : *std::max_element(x.begin(), x.end());
    if (xmax == xmin) {
        xmin -= 1;
        xmax += 1;
    }
    auto px = [&](double v) { return L + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return T + (1.0 - v) * ph; };
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\"" << T + ph
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = k / 4.0;
        s << "<text x=\"" << L - 6 << "\" y=\"" << py(v) + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_number(v) << "</text>\n";
    }
    for (double v : x)
        s << "<text x=\"" << px(v) << "\" y=\"" << T + ph + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format_number(v)
          << "</text>\n";
    s << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* c = colors[i % std::size(colors)];
        s << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
        for (std::size_t k = 0; k < x.size() && k < series[i].y.size(); ++k)
            s << format_number(px(x[k])) << ',' << format_number(py(series[i].y[k])) << ' ';
        s << "\"/>\n";
        s << "<text x=\"" << L + pw + 10 << "\" y=\"" << T + 16 * (i + 1) << "\" fill=\"" << c
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[i].name << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

/// Mean of one metric per (scenario, algorithm), normalized per scenario by
/// the largest algorithm mean.
struct MetricDef {
    const char* file;
    const char* title;
    double (*get)(const ResultRow&);
};

inline const MetricDef kChartMetrics[] = {
    {"energy", "Normalized energy", [](const ResultRow& r) { return r.report.total_energy; }},
    {"act", "Normalized average completion time",
     [](const ResultRow& r) { return r.report.avg_completion.value_or(0.0); }},
    {"awt", "Normalized average wait time", [](const ResultRow& r) { return r.report.avg_wait.value_or(0.0); }},
    {"avg_power", "Normalized average power", [](const ResultRow& r) { return r.report.avg_power; }},
};

inline std::map<std::string, std::string> build_charts(const std::vector<ResultRow>& rows,
                                                       const std::vector<Algorithm>& algorithms) {
    // axis -> ordered scenarios
    std::map<std::string, std::map<int, std::string>> axes;
    std::map<std::string, std::pair<int, int>> shape;
    for (const auto& r : rows) {
        const auto slash = r.scenario.find('/');
        const std::string axis = slash == std::string::npos ? "scenarios" : r.scenario.substr(0, slash);
        axes[axis].emplace(r.scenario_index, r.scenario);
        shape[r.scenario] = {r.n_tasks, r.n_vms};
    }
    std::map<std::string, std::string> files;
    for (const auto& m : kChartMetrics) {
        for (const auto& [axis, scenarios] : axes) {
            std::vector<double> x;
            std::vector<ChartSeries> series;
            for (auto a : algorithms) series.push_back({to_string(a), {}});
            int k = 0;
            for (const auto& [idx, scen] : scenarios) {
                const auto [nt, nv] = shape[scen];
                x.push_back(axis == "tasks" ? nt : axis == "vms" ? nv : k);
                ++k;
                std::vector<double> means;
                for (auto a : algorithms) {
                    CompensatedSum sum;
                    int n = 0;
                    for (const auto& r : rows)
                        if (r.scenario == scen && r.algorithm == a) {
                            sum.add(m.get(r));
                            ++n;
                        }
                    means.push_back(n ? sum.value() / n : 0.0);
                }
                const double mx = *std::max_element(means.begin(), means.end());
                for (std::size_t i = 0; i < means.size(); ++i) series[i].y.push_back(mx > 0 ? means[i] / mx : 0.0);
            }
            const std::string x_label = axis == "tasks" ? "tasks" : axis == "vms" ? "VMs" : "scenario";
            files[std::string(m.file) + "_" + axis + ".svg"] =
                svg_line_chart(std::string(m.title) + " vs " + x_label, x_label, x, series);
        }
    }
    return files;
}

// ---------------------------------------------------------------- driver

inline std::string sanitize(std::string s) {
    for (auto& c : s)
        if (c == '/' || c == '\\' || c == ' ') c = '_';
    return s;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + p.string() + "'");
}

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::string csv;
};

/// Schedules, simulates and reports every (scenario, algorithm, seed) and
/// writes the requested artifacts under cfg.output_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write = true) {
    if (auto errs = config_errors(cfg); !errs.empty()) throw InvalidInstance(std::move(errs));
    const auto cells = build_cells(cfg);
    auto outputs = run_cells(cells, cfg, cfg.emit.trace && write);

    ExperimentResult res;
    for (const auto& o : outputs)
        for (const auto& r : o.rows) res.rows.push_back(r);
    res.csv = results_csv(res.rows);
    if (!write) return res;

    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.output_dir + "'");
    if (cfg.emit.csv) write_file(dir / "results.csv", res.csv);
    if (cfg.emit.svg)
        for (const auto& [name, svg] : build_charts(res.rows, cfg.algorithms)) write_file(dir / name, svg);
    if (cfg.emit.trace) {
        fs::create_directories(dir / "traces", ec);
        if (ec) throw IoError("cannot create trace directory");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            for (const auto& [a, trace] : outputs[i].traces) {
                std::ostringstream s;
                write_trace(s, trace);
                write_file(dir / "traces" /
                               (sanitize(cells[i].scenario) + "_" + to_string(a) + "_s" +
                                std::to_string(cells[i].seed_index) + ".jsonl"),
                           s.str());
            }
        }
    }
    return res;
}

/// results.csv with the wall-clock column dropped.
inline std::string strip_wall_clock(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        const auto pos = line.rfind(',');
        out += (pos == std::string::npos ? line : line.substr(0, pos)) + "\n";
    }
    return out;
}

}  // namespace gapsched

#endif  // GAPSCHED_EXPERIMENT_HPP
