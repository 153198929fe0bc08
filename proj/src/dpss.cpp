#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bandsparse/dict.hpp"

namespace bandsparse {

namespace {

// Sturm count: number of eigenvalues of the symmetric tridiagonal (d, e)
// strictly below x.
int count_below(const std::vector<double>& d, const std::vector<double>& e, double x) {
    const std::size_t n = d.size();
    int count = 0;
    double q = d[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        const double e2 = e[i - 1] * e[i - 1];
        double denom = q;
        if (denom == 0.0) denom = 1e-300;
        q = d[i] - x - e2 / denom;
        if (q < 0.0) ++count;
    }
    return count;
}

// Solve (T - shift I) x = b by tridiagonal LU with partial pivoting.
std::vector<double> shifted_solve(const std::vector<double>& d, const std::vector<double>& e,
                                  double shift, std::vector<double> b) {
    const std::size_t n = d.size();
    std::vector<double> diag(n), upper(n, 0.0), upper2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) diag[i] = d[i] - shift;
    for (std::size_t i = 0; i + 1 < n; ++i) upper[i] = e[i];
    std::vector<double> sub(e);  // subdiagonal copy, consumed during elimination

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(sub[i]) > std::abs(diag[i])) {
            std::swap(diag[i], sub[i]);
            std::swap(upper[i], diag[i + 1]);
            if (i + 2 < n) {
                upper2[i] = upper[i + 1];
                upper[i + 1] = 0.0;
            }
            std::swap(b[i], b[i + 1]);
        }
        if (diag[i] == 0.0) diag[i] = 1e-300;
        const double m = sub[i] / diag[i];
        diag[i + 1] -= m * upper[i];
        if (i + 2 < n) upper[i + 1] -= m * upper2[i];
        b[i + 1] -= m * b[i];
    }
    if (diag[n - 1] == 0.0) diag[n - 1] = 1e-300;

    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = b[ii];
        if (ii + 1 < n) acc -= upper[ii] * x[ii + 1];
        if (ii + 2 < n) acc -= upper2[ii] * x[ii + 2];
        x[ii] = acc / diag[ii];
    }
    return x;
}

}  // namespace

void DpssConfig::validate() const {
    if (q < 2) throw std::invalid_argument("dpss: sequence length must be >= 2");
    if (!(w > 0.0) || !(w < 0.5)) throw std::invalid_argument("dpss: need 0 < W < 1/2");
}

// Top eigenvector of the tridiagonal matrix that commutes with the time- and
// band-limiting operator: diag ((Q-1-2n)/2)^2 cos(2 pi W), off-diag n(Q-n)/2.
std::vector<double> dpss_window(int q, double w) {
    DpssConfig{q, w}.validate();
    const std::size_t n = static_cast<std::size_t>(q);
    const double c = std::cos(2.0 * std::numbers::pi * w);
    std::vector<double> d(n), e(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 0.5 * (static_cast<double>(q - 1) - 2.0 * static_cast<double>(i));
        d[i] = a * a * c;
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        e[i] = 0.5 * static_cast<double>(i + 1) * static_cast<double>(q - 1 - static_cast<int>(i));

    // Bisect for the largest eigenvalue.
    double lo = d[0], hi = d[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    const double scale = std::max(std::abs(lo), std::abs(hi));
    double a = lo, b = hi + scale * 1e-12;
    for (int it = 0; it < 200 && (b - a) > scale * 1e-15; ++it) {
        const double mid = 0.5 * (a + b);
        if (count_below(d, e, mid) >= static_cast<int>(n))
            b = mid;  // all eigenvalues below mid
        else
            a = mid;
    }
    const double lambda = 0.5 * (a + b);

    // Inverse iteration from a deterministic start.
    Rng rng(0x5137u);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = rng.uniform() - 0.5;
    const double shift = lambda + scale * 1e-12;
    for (int it = 0; it < 4; ++it) {
        v = shifted_solve(d, e, shift, std::move(v));
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0) || !std::isfinite(nrm))
            throw std::runtime_error("dpss: inverse iteration failed");
        for (double& x : v) x /= nrm;
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    if (sum < 0.0)
        for (double& x : v) x = -x;
    return v;
}

CVector dpss_atom(double band_center, const DpssConfig& cfg, const std::vector<double>& times) {
    cfg.validate();
    if (times.size() != static_cast<std::size_t>(cfg.q))
        throw std::invalid_argument("dpss_atom: Q must equal the number of samples");
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (std::abs(t - std::round(t)) > 1e-9 ||
            (i > 0 && std::abs(times[i] - times[i - 1] - 1.0) > 1e-9))
            throw std::invalid_argument("dpss_atom: requires uniform integer sampling");
    }
    const std::vector<double> win = dpss_window(cfg.q, cfg.w);
    CVector out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double phase = 2.0 * std::numbers::pi * band_center * times[i];
        out[i] = win[i] * cxd(std::cos(phase), std::sin(phase));
    }
    return out;
}

}  // namespace bandsparse
