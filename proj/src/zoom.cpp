#include "bandsparse/zoom.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "bandsparse/sim.hpp"

namespace bandsparse {

void ZoomPlan::validate(int dims) const {
    if (stages.empty()) throw std::invalid_argument("zoom plan: need at least one stage");
    for (const StageSpec& s : stages) {
        if (s.bands_per_active < 2)
            throw std::invalid_argument("zoom plan: each stage needs at least 2 bands");
        if (s.kind == DictKind::wideband_dpss && !dpss)
            throw std::invalid_argument("zoom plan: DPSS stage without DpssConfig");
    }
    if (alphas.empty()) throw std::invalid_argument("zoom plan: no alpha values");
    for (double a : alphas)
        if (!(a > 0.0) || !(a <= 1.0)) throw std::invalid_argument("zoom plan: alpha out of (0,1]");
    if (!(eps_act > 0.0)) throw std::invalid_argument("zoom plan: eps_act must be positive");
    if (dims < 1) throw std::invalid_argument("zoom plan: bad dimension count");
}

double ZoomPlan::stage_alpha(std::size_t stage) const {
    return stage < alphas.size() ? alphas[stage] : alphas.back();
}

std::vector<std::size_t> select_active_bands(const SolveResult& result,
                                             std::size_t grid_columns, double eps_act) {
    if (result.coefficients.size() != grid_columns)
        throw std::invalid_argument("select_active_bands: result does not match grid");
    return active_indices(result.coefficients, eps_act);
}

std::vector<Cell> split_bands(const std::vector<Cell>& bands, int b_next) {
    if (b_next < 2) throw std::invalid_argument("split_bands: need at least 2 children");
    std::vector<Cell> out;
    out.reserve(bands.size() * static_cast<std::size_t>(b_next));
    for (const Cell& parent : bands) {
        // Children share the parent's exact bounds; interior edges are the
        // same expression for neighbours, so the partition is bit-exact and
        // adjacent parents do not duplicate their shared edge.
        for (int k = 0; k < b_next; ++k) {
            Cell child;
            child.lo = k == 0 ? parent.lo
                              : parent.lo + (parent.hi - parent.lo) * (double(k) / b_next);
            child.hi = k == b_next - 1
                           ? parent.hi
                           : parent.lo + (parent.hi - parent.lo) * (double(k + 1) / b_next);
            child.point = child.mid();
            out.push_back(child);
        }
    }
    return out;
}

double band_ratio(int bands, int samples) {
    if (bands < 2 || samples < 1) throw std::invalid_argument("band_ratio: B >= 2, N >= 1");
    const double b = bands, n = samples;
    return (-0.49 * b * b + 90.0 * b + 5546.0 - 4.0 * n) / 1e4;
}

bool band_ratio_extrapolated(int bands, int samples) {
    return bands < 4 || bands > 100 || samples < 50 || samples > 500;
}

std::optional<int> recommend_bands(int samples, int stages) {
    if (samples < 1) throw std::invalid_argument("recommend_bands: N >= 1");
    const double threshold = stages >= 2 ? kMultiStageRatioThreshold : kSingleStageRatioThreshold;
    for (int b = 100; b >= 4; --b)
        if (band_ratio(b, samples) > threshold) return b;
    return std::nullopt;
}

namespace {

// Child cells of one parent along one axis, per the next stage's kind.
std::vector<Cell> axis_children(const Cell& parent, int b_next) {
    return split_bands({parent}, b_next);
}

// First-stage grid over the whole torus [0,1) per dimension. Narrowband first
// stages use the DFT-style points j/B; wideband stages use the band partition.
std::vector<Cell> first_stage_axis(int bands, DictKind kind) {
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(bands));
    for (int b = 0; b < bands; ++b) {
        Cell c;
        c.lo = static_cast<double>(b) / bands;
        c.hi = static_cast<double>(b + 1) / bands;
        c.point = kind == DictKind::narrowband ? c.lo : c.mid();
        cells.push_back(c);
    }
    return cells;
}

// Do two cells along one axis touch or coincide, counting the torus seam?
bool cells_touch(const Cell& a, const Cell& b) {
    if (a.lo == b.lo && a.hi == b.hi) return true;
    if (a.hi == b.lo || b.hi == a.lo) return true;
    if ((a.hi == 1.0 && b.lo == 0.0) || (b.hi == 1.0 && a.lo == 0.0)) return true;
    return false;
}

bool boxes_adjacent(const Box& a, const Box& b) {
    for (std::size_t m = 0; m < a.size(); ++m)
        if (!cells_touch(a[m], b[m])) return false;
    return true;
}

// Connected components of the adjacency graph over surviving boxes.
std::vector<std::vector<std::size_t>> cluster_boxes(const std::vector<Box>& boxes) {
    const std::size_t n = boxes.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (boxes_adjacent(boxes[i], boxes[j])) parent[find(i)] = find(j);
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(clusters.size());
            clusters.emplace_back();
        }
        clusters[static_cast<std::size_t>(slot[r])].push_back(i);
    }
    return clusters;
}

// Representative frequency of a cluster along one axis: midpoint of the
// covered interval (mean of the extreme points for point grids), unwrapped
// across the 0/1 seam when the cluster straddles it.
double cluster_axis_frequency(const std::vector<Box>& boxes,
                              const std::vector<std::size_t>& member, std::size_t axis,
                              bool point_grid) {
    bool at_zero = false, at_one = false;
    double total = 0.0;
    for (std::size_t i : member) {
        const Cell& c = boxes[i][axis];
        if (c.lo == 0.0) at_zero = true;
        if (c.hi == 1.0) at_one = true;
        total += c.width();
    }
    const bool wrap = at_zero && at_one && total < 1.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i : member) {
        Cell c = boxes[i][axis];
        double a = point_grid ? c.point : c.lo;
        double b = point_grid ? c.point : c.hi;
        if (wrap && c.lo < 0.5) {
            a += 1.0;
            b += 1.0;
        }
        lo = std::min(lo, a);
        hi = std::max(hi, b);
    }
    double f = 0.5 * (lo + hi);
    if (f >= 1.0) f -= 1.0;
    return f;
}

}  // namespace

bool box_contains(const Box& box, const std::vector<double>& f) {
    if (box.size() != f.size()) return false;
    for (std::size_t m = 0; m < box.size(); ++m)
        if (!(f[m] >= box[m].lo && f[m] < box[m].hi)) return false;
    return true;
}

std::vector<std::vector<Box>> cluster_surviving(const std::vector<Box>& boxes) {
    std::vector<std::vector<Box>> out;
    for (const auto& member : cluster_boxes(boxes)) {
        std::vector<Box> group;
        for (std::size_t i : member) group.push_back(boxes[i]);
        out.push_back(std::move(group));
    }
    return out;
}

ZoomResult run_zoom(const CVector& y, const SamplingScheme& scheme, const ZoomPlan& plan) {
    scheme.validate();
    plan.validate(scheme.dims());
    const std::size_t n = scheme.total_samples();
    if (y.size() != n) throw std::invalid_argument("run_zoom: data does not match scheme");
    const int dims = scheme.dims();

    ZoomResult result;
    result.final_resolution.assign(dims, 1.0);
    for (const StageSpec& s : plan.stages)
        for (int m = 0; m < dims; ++m) result.final_resolution[m] /= s.bands_per_active;

    // Stage 1 partitions the whole torus per dimension.
    std::vector<Box> boxes;
    {
        const std::vector<Cell> axis = first_stage_axis(plan.stages[0].bands_per_active,
                                                        plan.stages[0].kind);
        std::vector<std::size_t> idx(dims, 0);
        const std::size_t count = static_cast<std::size_t>(
            std::pow(double(axis.size()), double(dims)) + 0.5);
        boxes.reserve(count);
        while (true) {
            Box b(dims);
            for (int m = 0; m < dims; ++m) b[m] = axis[idx[m]];
            boxes.push_back(std::move(b));
            int m = 0;
            for (; m < dims; ++m) {
                if (++idx[m] < axis.size()) break;
                idx[m] = 0;
            }
            if (m == dims) break;
        }
        // Enumeration above runs dimension 1 fastest, matching the Kronecker
        // column order.
    }

    bool final_point_grid = plan.stages.back().kind == DictKind::narrowband;
    std::vector<Box> survivors;

    for (std::size_t z = 0; z < plan.stages.size(); ++z) {
        const StageSpec& stage = plan.stages[z];
        const Dictionary dict =
            build_dictionary(scheme, boxes, stage.kind, plan.dpss, plan.max_entries);

        SolveResult solve_res;
        double lambda = 0.0;
        if (plan.solver == SolverKind::lasso) {
            LassoConfig cfg = plan.lasso;
            cfg.lambda = lambda = lambda_heuristic(dict, y, plan.stage_alpha(z));
            cfg.eps_act = plan.eps_act;
            solve_res = lasso_admm(dict, y, cfg);
        } else {
            SpiceConfig cfg = plan.spice;
            cfg.eps_act = plan.eps_act;
            solve_res = spice(dict, y, cfg);
        }
        const std::vector<std::size_t> active =
            select_active_bands(solve_res, dict.columns(), plan.eps_act);

        StageTrace trace;
        trace.stage = static_cast<int>(z + 1);
        trace.columns = dict.columns();
        trace.lambda = lambda;
        trace.iterations = solve_res.iterations;
        trace.converged = solve_res.converged;
        trace.active = active.size();
        trace.ops = admm_cost(n, dict.columns());
        result.stage_traces.push_back(trace);
        result.op_count += trace.ops;

        survivors.clear();
        survivors.reserve(active.size());
        for (std::size_t i : active) survivors.push_back(dict.column_cells[i]);
        result.surviving.push_back(survivors);

        if (survivors.empty()) {
            result.model_order = 0;  // no active bands: report order zero
            return result;
        }

        if (z + 1 < plan.stages.size()) {
            const StageSpec& next = plan.stages[z + 1];
            std::vector<Box> children;
            children.reserve(survivors.size() *
                             static_cast<std::size_t>(std::pow(double(next.bands_per_active),
                                                               double(dims)) + 0.5));
            for (const Box& parent : survivors) {
                std::vector<std::vector<Cell>> axis_kids(dims);
                for (int m = 0; m < dims; ++m)
                    axis_kids[m] = axis_children(parent[m], next.bands_per_active);
                std::vector<std::size_t> idx(dims, 0);
                while (true) {
                    Box b(dims);
                    for (int m = 0; m < dims; ++m) b[m] = axis_kids[m][idx[m]];
                    children.push_back(std::move(b));
                    int m = 0;
                    for (; m < dims; ++m) {
                        if (++idx[m] < axis_kids[m].size()) break;
                        idx[m] = 0;
                    }
                    if (m == dims) break;
                }
            }
            boxes = std::move(children);
        }
    }

    // Merge adjacent survivors into clusters; one component per cluster.
    const std::vector<std::vector<std::size_t>> clusters = cluster_boxes(survivors);
    result.model_order = static_cast<int>(clusters.size());
    for (const auto& member : clusters) {
        std::vector<double> f(dims);
        for (int m = 0; m < dims; ++m)
            f[m] = cluster_axis_frequency(survivors, member, static_cast<std::size_t>(m),
                                          final_point_grid);
        result.frequencies.push_back(std::move(f));
    }
    std::sort(result.frequencies.begin(), result.frequencies.end());

    if (plan.refine_midpoints && !result.frequencies.empty()) {
        // Optional last pass: narrowband solve on the cluster midpoints.
        std::vector<Box> midboxes;
        for (const auto& f : result.frequencies) {
            Box b(dims);
            for (int m = 0; m < dims; ++m) {
                b[m].point = f[m];
                b[m].lo = f[m];
                b[m].hi = std::min(1.0, f[m] + result.final_resolution[m]);
            }
            midboxes.push_back(std::move(b));
        }
        const Dictionary mid =
            build_dictionary(scheme, midboxes, DictKind::narrowband, {}, plan.max_entries);
        LassoConfig cfg = plan.lasso;
        cfg.lambda = lambda_heuristic(mid, y, plan.stage_alpha(plan.stages.size() - 1));
        cfg.eps_act = plan.eps_act;
        const SolveResult refined = lasso_admm(mid, y, cfg);
        const std::vector<std::size_t> keep =
            select_active_bands(refined, mid.columns(), plan.eps_act);
        std::vector<std::vector<double>> kept;
        for (std::size_t i : keep) kept.push_back(result.frequencies[i]);
        if (!kept.empty()) {
            result.frequencies = std::move(kept);
            result.model_order = static_cast<int>(result.frequencies.size());
        }
    }

    // Physical amplitudes by least squares on narrowband atoms at the final
    // frequency estimates.
    if (!result.frequencies.empty() &&
        result.frequencies.size() <= n) {
        std::vector<Box> atom_boxes;
        for (const auto& f : result.frequencies) {
            Box b(dims);
            for (int m = 0; m < dims; ++m) {
                b[m].point = f[m];
                b[m].lo = f[m];
                b[m].hi = std::min(1.0, f[m] + result.final_resolution[m]);
            }
            atom_boxes.push_back(std::move(b));
        }
        try {
            const Dictionary atoms =
                build_dictionary(scheme, atom_boxes, DictKind::narrowband, {}, plan.max_entries);
            std::vector<std::size_t> all(atoms.columns());
            std::iota(all.begin(), all.end(), std::size_t{0});
            result.amplitudes = estimate_amplitudes(atoms, y, all);
        } catch (const std::runtime_error&) {
            result.amplitudes.clear();  // collinear estimates; amplitudes unavailable
        }
    }
    return result;
}

std::string zoom_result_json(const ZoomResult& r) {
    nlohmann::json j;
    j["model_order"] = r.model_order;
    j["op_count"] = r.op_count;
    j["final_resolution"] = r.final_resolution;
    nlohmann::json freqs = nlohmann::json::array();
    for (const auto& f : r.frequencies) freqs.push_back(f);
    j["frequencies"] = std::move(freqs);
    nlohmann::json amps = nlohmann::json::array();
    for (const cxd& a : r.amplitudes) amps.push_back({a.real(), a.imag()});
    j["amplitudes"] = std::move(amps);
    nlohmann::json stages = nlohmann::json::array();
    for (std::size_t z = 0; z < r.stage_traces.size(); ++z) {
        const StageTrace& t = r.stage_traces[z];
        nlohmann::json s;
        s["stage"] = t.stage;
        s["columns"] = t.columns;
        s["lambda"] = t.lambda;
        s["iterations"] = t.iterations;
        s["converged"] = t.converged;
        s["active"] = t.active;
        s["ops"] = t.ops;
        nlohmann::json bands = nlohmann::json::array();
        if (z < r.surviving.size())
            for (const Box& b : r.surviving[z]) {
                nlohmann::json box = nlohmann::json::array();
                for (const Cell& c : b) box.push_back({{"lo", c.lo}, {"hi", c.hi}});
                bands.push_back(std::move(box));
            }
        s["surviving_bands"] = std::move(bands);
        stages.push_back(std::move(s));
    }
    j["stages"] = std::move(stages);
    return j.dump(2);
}

}  // namespace bandsparse
