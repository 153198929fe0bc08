#include "bandsparse/dict.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace bandsparse {

std::size_t SamplingScheme::total_samples() const {
    std::size_t n = 1;
    for (const auto& t : times) n *= t.size();
    return times.empty() ? 0 : n;
}

void SamplingScheme::validate() const {
    if (times.empty()) throw std::invalid_argument("sampling scheme: no dimensions");
    for (const auto& axis : times) {
        if (axis.empty()) throw std::invalid_argument("sampling scheme: empty dimension");
        for (std::size_t i = 0; i < axis.size(); ++i) {
            if (!std::isfinite(axis[i])) throw std::invalid_argument("sampling scheme: non-finite instant");
            if (i > 0 && !(axis[i] > axis[i - 1]))
                throw std::invalid_argument("sampling scheme: instants must be strictly increasing");
        }
    }
}

SamplingScheme SamplingScheme::uniform(std::size_t n) {
    SamplingScheme s;
    s.times.emplace_back();
    s.times[0].reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.times[0].push_back(static_cast<double>(i));
    return s;
}

SamplingScheme SamplingScheme::uniform_md(const std::vector<std::size_t>& n_per_dim) {
    SamplingScheme s;
    for (std::size_t n : n_per_dim) {
        std::vector<double> axis;
        axis.reserve(n);
        for (std::size_t i = 0; i < n; ++i) axis.push_back(static_cast<double>(i));
        s.times.push_back(std::move(axis));
    }
    return s;
}

std::size_t BandGrid::column_count() const {
    std::size_t p = axes.empty() ? 0 : 1;
    for (const auto& axis : axes) p *= axis.cells.size();
    return p;
}

void BandGrid::validate() const {
    if (axes.empty()) throw std::invalid_argument("band grid: no dimensions");
    for (const auto& axis : axes) {
        if (axis.cells.empty()) throw std::invalid_argument("band grid: empty axis");
        for (std::size_t i = 0; i < axis.cells.size(); ++i) {
            const Cell& c = axis.cells[i];
            if (!(c.lo >= 0.0) || !(c.hi <= 1.0) || !(c.hi > c.lo))
                throw std::invalid_argument("band grid: cell bounds must satisfy 0 <= lo < hi <= 1");
            if (i > 0 && !(c.lo >= axis.cells[i - 1].lo))
                throw std::invalid_argument("band grid: cells must be ordered");
            if (axis.point_grid) {
                if (i > 0 && !(c.point > axis.cells[i - 1].point))
                    throw std::invalid_argument("band grid: points must be strictly increasing");
            } else if (i > 0 && c.lo < axis.cells[i - 1].hi) {
                throw std::invalid_argument("band grid: overlapping bands");
            }
        }
    }
}

BandGrid BandGrid::uniform_bands(int dims, int bands) {
    if (bands < 2) throw std::invalid_argument("band grid: need at least 2 bands");
    BandGrid g;
    for (int m = 0; m < dims; ++m) {
        AxisGrid axis;
        axis.point_grid = false;
        for (int b = 0; b < bands; ++b) {
            Cell c;
            c.lo = static_cast<double>(b) / bands;
            c.hi = static_cast<double>(b + 1) / bands;
            c.point = c.mid();
            axis.cells.push_back(c);
        }
        g.axes.push_back(std::move(axis));
    }
    return g;
}

BandGrid BandGrid::uniform_points(int dims, int points) {
    if (points < 1) throw std::invalid_argument("band grid: need at least 1 point");
    BandGrid g;
    for (int m = 0; m < dims; ++m) {
        AxisGrid axis;
        axis.point_grid = true;
        for (int p = 0; p < points; ++p) {
            Cell c;
            c.lo = static_cast<double>(p) / points;
            c.hi = static_cast<double>(p + 1) / points;
            c.point = c.lo;
            axis.cells.push_back(c);
        }
        g.axes.push_back(std::move(axis));
    }
    return g;
}

const char* to_string(DictKind kind) {
    switch (kind) {
        case DictKind::narrowband: return "narrowband";
        case DictKind::wideband_integrated: return "wideband-integrated";
        case DictKind::wideband_dpss: return "wideband-dpss";
    }
    return "?";
}

CVector narrowband_atom(double f, const std::vector<double>& times) {
    if (!std::isfinite(f)) throw std::invalid_argument("narrowband_atom: non-finite frequency");
    CVector out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw std::invalid_argument("narrowband_atom: NaN time");
        const double phase = 2.0 * std::numbers::pi * f * times[i];
        out[i] = cxd(std::cos(phase), std::sin(phase));
    }
    return out;
}

CVector wideband_atom(double f_lo, double f_hi, const std::vector<double>& times) {
    if (!(f_lo >= 0.0) || !(f_hi <= 1.0) || !(f_hi > f_lo))
        throw std::invalid_argument("wideband_atom: need 0 <= f_lo < f_hi <= 1");
    const double width = f_hi - f_lo;
    const double center = 0.5 * (f_lo + f_hi);
    CVector out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (!std::isfinite(t)) throw std::invalid_argument("wideband_atom: NaN time");
        if (t == 0.0) {
            out[i] = width;  // analytic limit of the integral
            continue;
        }
        // (e^{2i pi f_hi t} - e^{2i pi f_lo t}) / (2i pi t), factored through
        // the band center so small |t| does not cancel catastrophically.
        const double phase = 2.0 * std::numbers::pi * center * t;
        const double s = std::sin(std::numbers::pi * width * t) / (std::numbers::pi * t);
        out[i] = cxd(std::cos(phase), std::sin(phase)) * s;
    }
    return out;
}

namespace {

CVector cell_atom(const Cell& cell, DictKind kind, const std::vector<double>& times,
                  const std::vector<double>* dpss_win) {
    switch (kind) {
        case DictKind::narrowband:
            return narrowband_atom(cell.point, times);
        case DictKind::wideband_integrated:
            return wideband_atom(cell.lo, cell.hi, times);
        case DictKind::wideband_dpss: {
            CVector out(times.size());
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double phase = 2.0 * std::numbers::pi * cell.mid() * times[i];
                out[i] = (*dpss_win)[i] * cxd(std::cos(phase), std::sin(phase));
            }
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

void check_dpss_scheme(const SamplingScheme& scheme, const std::optional<DpssConfig>& dpss) {
    if (!dpss) throw std::invalid_argument("dictionary: DPSS kind requires a DpssConfig");
    dpss->validate();
    for (const auto& axis : scheme.times) {
        if (axis.size() != static_cast<std::size_t>(dpss->q))
            throw std::invalid_argument("dictionary: DPSS Q must equal samples per dimension");
        for (std::size_t i = 0; i < axis.size(); ++i)
            if (std::abs(axis[i] - std::round(axis[i])) > 1e-9 ||
                (i > 0 && std::abs(axis[i] - axis[i - 1] - 1.0) > 1e-9))
                throw std::invalid_argument("dictionary: DPSS requires uniform integer sampling");
    }
}

void normalize_columns(Dictionary& dict) {
    dict.column_norms.resize(dict.columns());
    for (std::size_t j = 0; j < dict.columns(); ++j) {
        cxd* c = dict.matrix.col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < dict.rows(); ++i) s += std::norm(c[i]);
        const double nrm = std::sqrt(s);
        if (!(nrm > 0.0) || !std::isfinite(nrm))
            throw std::runtime_error("dictionary: degenerate (zero-norm) atom");
        dict.column_norms[j] = nrm;
        for (std::size_t i = 0; i < dict.rows(); ++i) c[i] /= nrm;
    }
}

}  // namespace

Dictionary build_dictionary(const SamplingScheme& scheme, const BandGrid& grid, DictKind kind,
                            std::optional<DpssConfig> dpss, std::size_t max_entries) {
    scheme.validate();
    grid.validate();
    if (grid.dims() != scheme.dims())
        throw std::invalid_argument("dictionary: grid and scheme dimensions differ");
    if (kind == DictKind::wideband_dpss) check_dpss_scheme(scheme, dpss);

    const std::size_t n = scheme.total_samples();
    const std::size_t p = grid.column_count();
    if (p == 0 || n == 0 || p > max_entries / n)
        throw std::invalid_argument("dictionary: entry count exceeds ceiling");

    std::vector<double> win;
    if (kind == DictKind::wideband_dpss) win = dpss_window(dpss->q, dpss->w);

    // Per-dimension atom matrices, then the Kronecker assembly
    // D^(M) x D^(M-1) x ... x D^(1); dimension 1 varies fastest.
    std::vector<CMatrix> per_dim;
    for (int m = 0; m < scheme.dims(); ++m) {
        const auto& axis = grid.axes[m];
        CMatrix d(scheme.times[m].size(), axis.cells.size());
        for (std::size_t j = 0; j < axis.cells.size(); ++j) {
            CVector atom = cell_atom(axis.cells[j], kind, scheme.times[m], &win);
            for (std::size_t i = 0; i < atom.size(); ++i) d(i, j) = atom[i];
        }
        per_dim.push_back(std::move(d));
    }
    CMatrix full = per_dim[0];
    for (int m = 1; m < scheme.dims(); ++m) full = kronecker(per_dim[m], full, max_entries);

    Dictionary dict;
    dict.matrix = std::move(full);
    dict.kind = kind;
    dict.dims = scheme.dims();
    dict.column_cells.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        std::size_t rem = j;
        dict.column_cells[j].resize(scheme.dims());
        for (int m = 0; m < scheme.dims(); ++m) {
            const std::size_t pm = grid.axes[m].cells.size();
            dict.column_cells[j][m] = grid.axes[m].cells[rem % pm];
            rem /= pm;
        }
    }
    normalize_columns(dict);
    return dict;
}

Dictionary build_dictionary(const SamplingScheme& scheme,
                            const std::vector<std::vector<Cell>>& boxes, DictKind kind,
                            std::optional<DpssConfig> dpss, std::size_t max_entries) {
    scheme.validate();
    if (boxes.empty()) throw std::invalid_argument("dictionary: no boxes");
    for (const auto& box : boxes)
        if (box.size() != static_cast<std::size_t>(scheme.dims()))
            throw std::invalid_argument("dictionary: box and scheme dimensions differ");
    if (kind == DictKind::wideband_dpss) check_dpss_scheme(scheme, dpss);

    const std::size_t n = scheme.total_samples();
    if (boxes.size() > max_entries / n)
        throw std::invalid_argument("dictionary: entry count exceeds ceiling");

    std::vector<double> win;
    if (kind == DictKind::wideband_dpss) win = dpss_window(dpss->q, dpss->w);

    Dictionary dict;
    dict.matrix = CMatrix(n, boxes.size());
    dict.kind = kind;
    dict.dims = scheme.dims();
    dict.column_cells = boxes;

    for (std::size_t j = 0; j < boxes.size(); ++j) {
        // Column = vec of the outer product of per-dimension atoms, multiplied
        // in ascending dimension order so it matches the Kronecker assembly
        // bit for bit.
        std::vector<CVector> atoms;
        for (int m = 0; m < scheme.dims(); ++m)
            atoms.push_back(cell_atom(boxes[j][m], kind, scheme.times[m], &win));
        cxd* dst = dict.matrix.col(j);
        std::vector<std::size_t> idx(scheme.dims(), 0);
        for (std::size_t r = 0; r < n; ++r) {
            cxd v = atoms[0][idx[0]];
            for (int m = 1; m < scheme.dims(); ++m) v *= atoms[m][idx[m]];
            dst[r] = v;
            for (int m = 0; m < scheme.dims(); ++m) {
                if (++idx[m] < atoms[m].size()) break;
                idx[m] = 0;
            }
        }
    }
    normalize_columns(dict);
    return dict;
}

std::vector<double> inner_product_scan(const Dictionary& dict, const CVector& y,
                                       bool normalize_max) {
    if (dict.rows() != y.size())
        throw std::invalid_argument("inner_product_scan: dimension mismatch");
    const CVector prods = hermitian_product(dict.matrix, y);
    std::vector<double> mags(prods.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < prods.size(); ++i) {
        mags[i] = std::abs(prods[i]);
        peak = std::max(peak, mags[i]);
    }
    if (normalize_max && peak > 0.0)
        for (double& m : mags) m /= peak;
    return mags;
}

std::string dictionary_debug_json(const Dictionary& dict, bool include_matrix) {
    nlohmann::json j;
    j["kind"] = to_string(dict.kind);
    j["dims"] = dict.dims;
    j["rows"] = dict.rows();
    j["columns"] = dict.columns();
    nlohmann::json cols = nlohmann::json::array();
    for (std::size_t c = 0; c < dict.columns(); ++c) {
        nlohmann::json col;
        col["norm"] = dict.column_norms[c];
        nlohmann::json cells = nlohmann::json::array();
        for (const Cell& cell : dict.column_cells[c])
            cells.push_back({{"lo", cell.lo}, {"hi", cell.hi}, {"point", cell.point}});
        col["cells"] = std::move(cells);
        cols.push_back(std::move(col));
    }
    j["column_metadata"] = std::move(cols);
    if (include_matrix) {
        nlohmann::json m = nlohmann::json::array();
        for (std::size_t c = 0; c < dict.columns(); ++c) {
            nlohmann::json col = nlohmann::json::array();
            for (std::size_t r = 0; r < dict.rows(); ++r) {
                const cxd v = dict.matrix(r, c);
                col.push_back({v.real(), v.imag()});
            }
            m.push_back(std::move(col));
        }
        j["matrix"] = std::move(m);
    }
    return j.dump(2);
}

}  // namespace bandsparse
