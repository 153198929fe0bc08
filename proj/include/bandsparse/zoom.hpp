#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bandsparse/dict.hpp"
#include "bandsparse/solve.hpp"

namespace bandsparse {

enum class SolverKind { lasso, spice };

struct StageSpec {
    int bands_per_active = 2;  // B_z, applied per dimension
    DictKind kind = DictKind::wideband_integrated;
};

struct ZoomPlan {
    std::vector<StageSpec> stages;
    SolverKind solver = SolverKind::lasso;
    std::vector<double> alphas = {0.3};  // per-stage lambda = alpha * lambda_max; last repeats
    LassoConfig lasso;                   // lambda is overwritten per stage
    SpiceConfig spice;
    double eps_act = 1e-3;
    std::optional<DpssConfig> dpss;      // required when any stage is wideband-dpss
    bool refine_midpoints = false;       // extra narrowband solve on final cluster midpoints
    std::size_t max_entries = kDefaultDictEntryCeiling;

    void validate(int dims) const;
    double stage_alpha(std::size_t stage) const;
};

// An active region of the M-D frequency space: one Cell per dimension.
using Box = std::vector<Cell>;

struct StageTrace {
    int stage = 0;
    std::size_t columns = 0;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
    std::size_t active = 0;
    double ops = 0.0;
};

struct ZoomResult {
    std::vector<std::vector<Box>> surviving;       // per stage, sorted
    std::vector<std::vector<double>> frequencies;  // model_order x dims
    int model_order = 0;
    CVector amplitudes;                            // physical scale, per cluster
    std::vector<StageTrace> stage_traces;
    double op_count = 0.0;
    std::vector<double> final_resolution;          // per dimension, 1 / prod B_z
};

ZoomResult run_zoom(const CVector& y, const SamplingScheme& scheme, const ZoomPlan& plan);

// Indices whose coefficient magnitude exceeds eps_act times the maximum.
std::vector<std::size_t> select_active_bands(const SolveResult& result,
                                             std::size_t grid_columns, double eps_act);

// Split every band into b_next equal children sharing the parent's exact
// edges; child points sit at the child midpoints.
std::vector<Cell> split_bands(const std::vector<Cell>& bands, int b_next);

// Does the box contain the frequency tuple (per-dimension lo <= f < hi)?
bool box_contains(const Box& box, const std::vector<double>& f);

// Group surviving boxes into clusters of pairwise-adjacent neighbours
// (toroidal adjacency per dimension).
std::vector<std::vector<Box>> cluster_surviving(const std::vector<Box>& boxes);

// Minimum-to-maximum gain ratio of a wideband element, second-order fit in B
// and linear in N; fitted over B in [4,100], N in [50,500].
double band_ratio(int bands, int samples);
bool band_ratio_extrapolated(int bands, int samples);

inline constexpr double kSingleStageRatioThreshold = 0.81;
inline constexpr double kMultiStageRatioThreshold = 0.66;

// Largest B in [4,100] whose band ratio clears the stage-appropriate
// threshold; empty when no B qualifies (callers fall back to B = 4).
std::optional<int> recommend_bands(int samples, int stages);

std::string zoom_result_json(const ZoomResult& result);

}  // namespace bandsparse
