#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bandsparse/dict.hpp"
#include "bandsparse/numerics.hpp"

namespace bandsparse {

struct SignalSpec {
    int dims = 1;
    int k = 0;
    // Fixed truth; when empty, frequencies are drawn uniformly on [0,1) with
    // min_spacing enforced per dimension (toroidal, by rejection).
    std::vector<std::vector<double>> frequencies;  // k x dims
    std::vector<cxd> amplitudes;                   // explicit amplitudes, or ...
    std::vector<double> magnitudes;                // ... magnitudes with random phases
    double min_spacing = 0.0;
};

struct SignalRealization {
    std::vector<std::vector<double>> frequencies;  // k x dims
    std::vector<cxd> amplitudes;
};

struct NoiseSpec {
    double snr_db = std::numeric_limits<double>::infinity();
};

struct MetricsConfig {
    double outlier_factor = 2.0;
    double resolution = 0.0;  // 1/P narrowband, 1/prod(B_z) wideband
};

struct MseResult {
    double mse = 0.0;
    int outliers = 0;
    int pairs_used = 0;
    bool defined = false;
};

SignalRealization draw_components(const SignalSpec& spec, Rng& rng);
CVector synthesize(const SignalRealization& real, const SamplingScheme& scheme);
CVector generate_signal(const SignalSpec& spec, const SamplingScheme& scheme, Rng& rng,
                        SignalRealization* realized = nullptr);

// Adds circular white Gaussian noise with sigma^2 = P_y 10^(-SNR/10),
// P_y = ||y||^2 / N.
CVector add_noise(const CVector& y, const NoiseSpec& noise, Rng& rng);

double toroidal_distance(double a, double b);

// Pairs true and estimated frequencies by minimum total toroidal distance,
// drops pairs farther than outlier_factor * resolution (in any dimension),
// and averages squared per-dimension error over the rest.
MseResult mse(const std::vector<double>& true_f, const std::vector<double>& est_f,
              const MetricsConfig& cfg);
MseResult mse(const std::vector<std::vector<double>>& true_f,
              const std::vector<std::vector<double>>& est_f, const MetricsConfig& cfg);

// x-step operation count of the ADMM: P^3 + (N+1)P^2 + NP for P <= N, else
// the Woodbury route N^3 + 3PN^2 + PN + P^2.
double admm_cost(std::size_t n, std::size_t p);

struct ZoomBudget {
    double narrowband_ops = 0.0;  // C1
    double coarse_ops = 0.0;      // C2, first wideband stage with B1 = N
    double residual = 0.0;        // R = C1 - C2
    double zoom_ops = 0.0;        // K I_z ((eta N)^3 + (N+1)(eta N)^2 + eta N^2)
    double grid = 0.0;            // implied final spacing 1 / (N (eta N)^Iz)
    bool within_budget = false;
};

ZoomBudget zoom_budget(std::size_t p, std::size_t n, int k, double eta, int zoom_stages);

struct ComplexitySettings {
    std::size_t baseline_p = 1000;
    std::size_t n = 200;
    int k = 2;
    std::vector<int> stage_bands;  // B_1, B_2, ...
};

// Modeled op count of the staged wideband pipeline relative to the
// single-stage narrowband baseline; stage z >= 2 solves K * B_z columns.
double relative_complexity(const ComplexitySettings& s);

struct PeakVarianceConfig {
    int trials = 1000;
    std::vector<double> snr_db = {0.0, 5.0, 10.0, 15.0, 20.0};
    std::size_t n = 100;
    int grid = 50;            // P = B
    double min_spacing = 0.02;  // 2/N
    double mag_small = 4.0;
    double mag_big = 5.0;
    int jobs = 0;
};

struct PeakVariancePoint {
    double snr_db = 0.0;
    double std_narrowband = 0.0;
    double std_wideband = 0.0;
};

// Fig-5-style study: std of the max-normalized scan magnitude at the grid
// element nearest the weaker component, per SNR, for both dictionary kinds.
std::vector<PeakVariancePoint> peak_variance_study(const PeakVarianceConfig& cfg, Rng rng);

struct ExperimentReport {
    std::string label;
    int trials = 0;
    std::uint64_t seed = 0;
    double success_rate = 0.0;         // support recovery
    double model_order_correct = 0.0;  // K_hat == K
    double over_rate = 0.0;
    double under_rate = 0.0;
    MseResult mse;
    int outliers_removed = 0;
    double mean_ops = 0.0;
    double wall_time_s = 0.0;
};

std::string report_json(const ExperimentReport& r, bool include_wall_time = true);

}  // namespace bandsparse
