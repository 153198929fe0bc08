#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bandsparse/sim.hpp"
#include "bandsparse/zoom.hpp"

namespace bandsparse {

inline constexpr std::uint64_t kDefaultSeed = 1729;

// Descriptor for a named Monte Carlo experiment. Zeroed/empty fields fall
// back to the experiment's built-in protocol.
struct ExperimentConfig {
    std::string name;
    int trials = 0;
    std::uint64_t seed = kDefaultSeed;
    int jobs = 0;
    std::string out_dir;               // empty: compute only, write nothing
    std::vector<double> snr_db;
    std::vector<double> alphas;
    std::vector<int> stage_bands;
    std::vector<std::string> stage_kinds;  // narrowband | wideband | dpss
    std::string solver;                // lasso | spice (custom experiment)
    int k = 0;
    std::size_t n = 0;
    double min_spacing = -1.0;         // <0: experiment default
};

struct ExperimentOutput {
    std::vector<ExperimentReport> reports;
    std::vector<std::string> files_written;
    std::string summary_json;
};

const std::vector<std::string>& known_experiments();

ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Per-trial outcome of one estimation condition; consumed by the aggregators
// and the per-trial CSV.
struct TrialRecord {
    std::uint64_t child_seed = 0;
    int k_hat = 0;
    bool order_correct = false;
    bool support_ok = false;
    MseResult mse;
    std::vector<double> per_component_error;
    double ops = 0.0;
    double seconds = 0.0;
};

// True-support check against the final surviving boxes: every true frequency
// lies in a surviving box and every surviving cluster holds a true frequency.
bool support_recovered(const std::vector<std::vector<double>>& true_f, const ZoomResult& zr);

ExperimentReport aggregate_records(const std::string& label, std::uint64_t seed, int true_k,
                                   const std::vector<TrialRecord>& records);

}  // namespace bandsparse
