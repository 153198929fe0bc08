#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bandsparse/numerics.hpp"

namespace bandsparse {

// Sample instants per dimension, unitless; frequencies are normalized to
// cycles/sample on the torus [0, 1).
struct SamplingScheme {
    std::vector<std::vector<double>> times;

    int dims() const { return static_cast<int>(times.size()); }
    std::size_t total_samples() const;
    void validate() const;  // non-empty dimensions, strictly increasing instants

    static SamplingScheme uniform(std::size_t n);  // 1-D, t = 0..n-1
    static SamplingScheme uniform_md(const std::vector<std::size_t>& n_per_dim);
};

// One grid element along one dimension. Wideband kinds use [lo, hi); the
// narrowband kind places its atom at `point` and keeps [lo, hi) as the cell
// for clustering and resolution bookkeeping.
struct Cell {
    double lo = 0.0, hi = 0.0, point = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

struct AxisGrid {
    bool point_grid = false;
    std::vector<Cell> cells;
};

struct BandGrid {
    std::vector<AxisGrid> axes;

    int dims() const { return static_cast<int>(axes.size()); }
    std::size_t column_count() const;  // product of per-axis sizes
    void validate() const;

    // B equal bands over [0, 1) per dimension.
    static BandGrid uniform_bands(int dims, int bands);
    // P points at j/P per dimension (the DFT-style grid), cells [j/P, (j+1)/P).
    static BandGrid uniform_points(int dims, int points);
};

struct DpssConfig {
    int q = 0;        // sequence length
    double w = 0.0;   // half-bandwidth, 0 < w < 1/2
    void validate() const;
};

enum class DictKind { narrowband, wideband_integrated, wideband_dpss };

const char* to_string(DictKind kind);

struct Dictionary {
    CMatrix matrix;   // unit-norm columns
    DictKind kind = DictKind::narrowband;
    int dims = 1;
    std::vector<std::vector<Cell>> column_cells;  // per column, one Cell per dimension
    std::vector<double> column_norms;             // pre-normalization l2 norms

    std::size_t rows() const { return matrix.rows(); }
    std::size_t columns() const { return matrix.cols(); }
};

inline constexpr std::size_t kDefaultDictEntryCeiling = 2'000'000;

// Pure sinusoid e^{2i pi f t_n}, unnormalized.
CVector narrowband_atom(double f, const std::vector<double>& times);

// Band-integrated sinusoid over [f_lo, f_hi]; the t = 0 entry is the analytic
// limit f_hi - f_lo. Evaluated in the phase/sinc form, which is exact and
// stays stable as t -> 0.
CVector wideband_atom(double f_lo, double f_hi, const std::vector<double>& times);

// First (maximally concentrated) Slepian sequence of length q and
// half-bandwidth w; unit l2 norm, positive sum.
std::vector<double> dpss_window(int q, double w);

// dpss_window modulated to band_center; requires uniform integer sampling.
CVector dpss_atom(double band_center, const DpssConfig& cfg, const std::vector<double>& times);

Dictionary build_dictionary(const SamplingScheme& scheme, const BandGrid& grid, DictKind kind,
                            std::optional<DpssConfig> dpss = {},
                            std::size_t max_entries = kDefaultDictEntryCeiling);

// Builder for an explicit list of M-D boxes (one Cell per dimension each);
// used by zoom stages past the first, where active regions are no longer a
// full product grid.
Dictionary build_dictionary(const SamplingScheme& scheme,
                            const std::vector<std::vector<Cell>>& boxes, DictKind kind,
                            std::optional<DpssConfig> dpss = {},
                            std::size_t max_entries = kDefaultDictEntryCeiling);

// |d_i^H y| per column; with normalize_max the scores are scaled so the
// largest equals 1 (all-zero input stays all-zero).
std::vector<double> inner_product_scan(const Dictionary& dict, const CVector& y,
                                       bool normalize_max = false);

// Debug dump (column metadata, optionally the matrix); not a stable format.
std::string dictionary_debug_json(const Dictionary& dict, bool include_matrix = false);

}  // namespace bandsparse
