#ifndef GAPSCHED_RELIABILITY_HPP
#define GAPSCHED_RELIABILITY_HPP

#include <cmath>
#include <cstdint>

#include "gapsched/model.hpp"
#include "gapsched/random.hpp"

namespace gapsched {

/// Fault rate at normalized frequency f_norm:
/// lambda0 * 10^(d (1 - f_norm) / (1 - f_min)).
inline double fault_rate_freq(const FaultModel& fm, double f_norm) {
    if (!(f_norm >= fm.f_min && f_norm <= 1.0)) throw RangeError("fault_rate_freq: f_norm outside [f_min, 1]");
    return fm.lambda0 * std::pow(10.0, fm.d * (1.0 - f_norm) / (1.0 - fm.f_min));
}

/// Fault rate at supply voltage `volts`: lambda0 * 10^((v_max - volts) / d_volt).
inline double fault_rate_volt(const FaultModel& fm, const FogNode& node, double volts) {
    if (!(volts > 0 && volts <= node.v_max)) throw RangeError("fault_rate_volt: volts outside (0, v_max]");
    return fm.lambda0 * std::pow(10.0, (node.v_max - volts) / fm.d_volt);
}

/// Probability of surviving `t` seconds at rate `lambda`.
inline double reliability(double lambda, double t) {
    if (!(lambda >= 0) || !(t >= 0)) throw RangeError("reliability: negative rate or time");
    return std::exp(-lambda * t);
}

inline double fault_probability(double lambda, double t) {
    if (!(lambda >= 0) || !(t >= 0)) throw RangeError("fault_probability: negative rate or time");
    return -std::expm1(-lambda * t);
}

/// Total time a task spends executing under cold primary/backup:
/// the primary's run until the fault plus the full backup run.
inline double cpb_exec_time(double primary_time, double backup_time) {
    if (!(primary_time >= 0) || !(backup_time >= 0)) throw RangeError("cpb_exec_time: negative time");
    return primary_time + backup_time;
}

/// When a fault is noticed, which fixes when the backup may be dispatched.
enum class DetectionMode {
    Immediate,     // at start + T_i
    AtCompletion,  // at the primary's planned completion
};

struct FaultDraw {
    bool occurred = false;
    double elapsed_fraction = 0.0;

    bool operator==(const FaultDraw&) const = default;
};

/// Seeded Bernoulli fault source. Every call consumes exactly two draws.
class FaultSampler {
  public:
    explicit FaultSampler(std::uint64_t seed) : seed_(seed), stream_(seed) {}

    /// Sampler for run `run_index` under `master_seed`.
    static FaultSampler for_run(std::uint64_t master_seed, std::uint64_t run_index) {
        return FaultSampler(derive_seed(master_seed, {0xfa17, run_index}));
    }

    FaultDraw sample(double p) {
        if (!(p >= 0 && p <= 1)) throw RangeError("sample_fault: probability outside [0, 1]");
        const double u = stream_.uniform();
        const double where = stream_.uniform();
        if (u < p) return {true, where};
        return {false, 0.0};
    }

    std::uint64_t seed() const noexcept { return seed_; }

  private:
    std::uint64_t seed_;
    Stream stream_;
};

inline FaultDraw sample_fault(FaultSampler& sampler, double p) { return sampler.sample(p); }

}  // namespace gapsched

#endif  // GAPSCHED_RELIABILITY_HPP
