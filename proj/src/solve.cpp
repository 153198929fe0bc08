#include "bandsparse/solve.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <optional>

namespace bandsparse {

void LassoConfig::validate() const {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lasso: lambda must be nonnegative");
    if (!(rho > 0.0)) throw std::invalid_argument("lasso: rho must be positive");
    if (max_iters < 1) throw std::invalid_argument("lasso: max_iters must be >= 1");
    if (tol_primal < 0.0 || tol_dual < 0.0) throw std::invalid_argument("lasso: negative tolerance");
    if (!(eps_act > 0.0)) throw std::invalid_argument("lasso: eps_act must be positive");
}

void SpiceConfig::validate() const {
    if (max_iters < 1) throw std::invalid_argument("spice: max_iters must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("spice: tol must be positive");
    if (!(eps_act > 0.0)) throw std::invalid_argument("spice: eps_act must be positive");
}

CVector soft_threshold(const CVector& v, double kappa) {
    if (!(kappa >= 0.0)) throw std::invalid_argument("soft_threshold: kappa must be nonnegative");
    if (kappa == 0.0) return v;
    CVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]);
        out[i] = mag > kappa ? v[i] * ((mag - kappa) / mag) : cxd(0.0);
    }
    return out;
}

std::vector<std::size_t> active_indices(const CVector& coefficients, double eps_act) {
    double peak = 0.0;
    for (const cxd& c : coefficients) peak = std::max(peak, std::abs(c));
    std::vector<std::size_t> idx;
    if (peak == 0.0) return idx;
    for (std::size_t i = 0; i < coefficients.size(); ++i)
        if (std::abs(coefficients[i]) > eps_act * peak) idx.push_back(i);
    return idx;
}

double lambda_max(const Dictionary& dict, const CVector& y) {
    const std::vector<double> mags = inner_product_scan(dict, y, false);
    double peak = 0.0;
    for (double m : mags) peak = std::max(peak, m);
    return peak;
}

double lambda_heuristic(const Dictionary& dict, const CVector& y, double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw std::invalid_argument("lambda_heuristic: need 0 < alpha <= 1");
    return alpha * lambda_max(dict, y);
}

namespace {

double lasso_objective(const CMatrix& a, const CVector& y, const CVector& z, double lambda) {
    const CVector az = matvec(a, z);
    double fit = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) fit += std::norm(y[i] - az[i]);
    double l1 = 0.0;
    for (const cxd& c : z) l1 += std::abs(c);
    return 0.5 * fit + lambda * l1;
}

}  // namespace

SolveResult lasso_admm(const Dictionary& dict, const CVector& y, const LassoConfig& cfg) {
    cfg.validate();
    const CMatrix& a = dict.matrix;
    if (a.rows() != y.size()) throw std::invalid_argument("lasso: dimension mismatch");
    if (!all_finite(y)) throw std::invalid_argument("lasso: non-finite data");

    const std::size_t n = a.rows();
    const std::size_t p = a.cols();
    const double rho = cfg.rho;
    const double tol_primal = cfg.tol_primal > 0.0 ? cfg.tol_primal : 1e-8 * std::sqrt(double(p));
    const double tol_dual = cfg.tol_dual > 0.0 ? cfg.tol_dual : 1e-8 * std::sqrt(double(p));

    const CVector aty = hermitian_product(a, y);

    // Factorize the x-step system once. Direct P x P Gram for P <= N;
    // Woodbury through the N x N outer Gram otherwise.
    const bool woodbury = p > n;
    std::optional<CholeskyFactor> factor;
    if (!woodbury) {
        CMatrix g = gram(a);
        for (std::size_t i = 0; i < p; ++i) g(i, i) += rho;
        factor.emplace(g);
    } else {
        CMatrix w = outer_gram(a);
        for (std::size_t i = 0; i < n; ++i) w(i, i) += rho;
        factor.emplace(w);
    }

    CVector x(p, cxd(0.0)), z(p, cxd(0.0)), u(p, cxd(0.0));
    CVector rhs(p);
    int iters = 0;
    bool converged = false;
    for (int it = 0; it < cfg.max_iters; ++it) {
        iters = it + 1;
        for (std::size_t i = 0; i < p; ++i) rhs[i] = aty[i] + rho * (z[i] - u[i]);
        if (!woodbury) {
            x = factor->solve(rhs);
        } else {
            // (A^H A + rho I)^-1 v = (v - A^H (rho I + A A^H)^-1 A v) / rho
            const CVector av = matvec(a, rhs);
            const CVector w = factor->solve(av);
            const CVector atw = hermitian_product(a, w);
            for (std::size_t i = 0; i < p; ++i) x[i] = (rhs[i] - atw[i]) / rho;
        }

        CVector xu(p);
        for (std::size_t i = 0; i < p; ++i) xu[i] = x[i] + u[i];
        CVector z_new = soft_threshold(xu, cfg.lambda / rho);

        double primal = 0.0, dual = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            primal += std::norm(x[i] - z_new[i]);
            dual += std::norm(z_new[i] - z[i]);
        }
        primal = std::sqrt(primal);
        dual = rho * std::sqrt(dual);

        for (std::size_t i = 0; i < p; ++i) u[i] += x[i] - z_new[i];
        z = std::move(z_new);

        if (primal <= tol_primal && dual <= tol_dual) {
            converged = true;
            break;
        }
    }

    SolveResult res;
    res.coefficients = std::move(z);
    res.active_set = active_indices(res.coefficients, cfg.eps_act);
    res.iterations = iters;
    res.objective = lasso_objective(a, y, res.coefficients, cfg.lambda);
    res.converged = converged;
    return res;
}

SolveResult spice(const Dictionary& dict, const CVector& y, const SpiceConfig& cfg) {
    cfg.validate();
    const CMatrix& b = dict.matrix;
    if (b.rows() != y.size()) throw std::invalid_argument("spice: dimension mismatch");
    if (!all_finite(y)) throw std::invalid_argument("spice: non-finite data");

    const std::size_t n = b.rows();
    const std::size_t p = b.cols();

    SolveResult res;
    const double energy = norm2(y);
    if (energy == 0.0) {  // zero powers minimize the criterion outright
        res.coefficients.assign(p, cxd(0.0));
        res.converged = true;
        return res;
    }
    const double floor = cfg.sigma_floor_scale * energy * energy / static_cast<double>(n);

    // Matched-filter initialization.
    std::vector<double> pw(p), sigma(n);
    const CVector bty = hermitian_product(b, y);
    for (std::size_t k = 0; k < p; ++k) pw[k] = std::norm(bty[k]) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = std::max(std::norm(y[i]) / static_cast<double>(n), floor);

    bool converged = false;
    int iters = 0;
    double prev_crit = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_iters; ++it) {
        iters = it + 1;

        // R = B diag(pw) B^H + diag(sigma). Solve R^-1 y through whichever
        // side is smaller: the N x N assembly, or the inversion lemma over
        // the s columns with nonzero power.
        std::vector<std::size_t> live;
        double max_power = 0.0;
        for (std::size_t k = 0; k < p; ++k) {
            if (pw[k] > 0.0) live.push_back(k);
            max_power = std::max(max_power, pw[k]);
        }
        double min_sigma = sigma[0];
        for (std::size_t i = 0; i < n; ++i) min_sigma = std::min(min_sigma, sigma[i]);

        // The lemma route loses ~max(p)/min(sigma) digits in its final
        // subtraction; keep it for well-conditioned iterations only.
        const bool lemma_ok = live.size() < n && min_sigma * 1e6 >= max_power;

        CVector rinv_y;
        if (!lemma_ok) {
            CMatrix scaled(n, live.size());
            for (std::size_t j = 0; j < live.size(); ++j) {
                const double s = std::sqrt(pw[live[j]]);
                const cxd* src = b.col(live[j]);
                cxd* dst = scaled.col(j);
                for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] * s;
            }
            CMatrix r = outer_gram(scaled);
            for (std::size_t i = 0; i < n; ++i) r(i, i) += sigma[i];
            rinv_y = CholeskyFactor(r).solve(y);
        } else {
            // R^-1 y = S^-1 y - S^-1 C (I + C^H S^-1 C)^-1 C^H S^-1 y with
            // C = B_live diag(sqrt p) and S = diag(sigma).
            const std::size_t s = live.size();
            CMatrix c(n, s);
            for (std::size_t j = 0; j < s; ++j) {
                const double w = std::sqrt(pw[live[j]]);
                const cxd* src = b.col(live[j]);
                cxd* dst = c.col(j);
                for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] * w;
            }
            CMatrix cs(n, s);  // S^-1 C
            for (std::size_t j = 0; j < s; ++j)
                for (std::size_t i = 0; i < n; ++i) cs(i, j) = c(i, j) / sigma[i];
            CMatrix small(s, s);
            for (std::size_t j = 0; j < s; ++j)
                for (std::size_t i = 0; i <= j; ++i) {
                    cxd acc = i == j ? cxd(1.0) : cxd(0.0);
                    for (std::size_t r = 0; r < n; ++r)
                        acc += std::conj(c(r, i)) * cs(r, j);
                    small(i, j) = acc;
                    small(j, i) = std::conj(acc);
                }
            CVector siy(n);
            for (std::size_t i = 0; i < n; ++i) siy[i] = y[i] / sigma[i];
            const CVector chy = hermitian_product(c, siy);
            const CVector mid = CholeskyFactor(small).solve(chy);
            const CVector back = matvec(cs, mid);
            rinv_y.resize(n);
            for (std::size_t i = 0; i < n; ++i) rinv_y[i] = siy[i] - back[i];
        }

        double crit = 0.0;
        for (std::size_t i = 0; i < n; ++i) crit += (std::conj(y[i]) * rinv_y[i]).real();
        for (std::size_t k = 0; k < p; ++k) crit += pw[k];
        for (std::size_t i = 0; i < n; ++i) crit += sigma[i];
        res.criterion_trace.push_back(crit);
        if (!(crit <= prev_crit * (1.0 + 1e-9) + 1e-12)) {
            assert(false && "spice criterion increased");
        }
        prev_crit = crit;

        // Alternating exact updates of the variational form: each power moves
        // to |beta_k| with beta_k = p_k a_k^H R^-1 y.
        const CVector g = hermitian_product(b, rinv_y);
        double delta = 0.0, base = 0.0;
        for (std::size_t k = 0; k < p; ++k) {
            const double next = pw[k] * std::abs(g[k]);
            delta += (next - pw[k]) * (next - pw[k]);
            base += pw[k] * pw[k];
            pw[k] = next;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double next = std::max(sigma[i] * std::abs(rinv_y[i]), floor);
            delta += (next - sigma[i]) * (next - sigma[i]);
            base += sigma[i] * sigma[i];
            sigma[i] = next;
        }
        if (std::sqrt(delta) <= cfg.tol * std::sqrt(std::max(base, 1e-300))) {
            converged = true;
            break;
        }
    }

    res.coefficients.resize(p);
    for (std::size_t k = 0; k < p; ++k) res.coefficients[k] = cxd(pw[k], 0.0);
    res.active_set = active_indices(res.coefficients, cfg.eps_act);
    res.iterations = iters;
    res.objective = res.criterion_trace.empty() ? 0.0 : res.criterion_trace.back();
    res.converged = converged;
    return res;
}

CVector estimate_amplitudes(const Dictionary& dict, const CVector& y,
                            const std::vector<std::size_t>& support) {
    if (support.empty()) throw std::invalid_argument("estimate_amplitudes: empty support");
    if (support.size() > dict.rows())
        throw std::invalid_argument("estimate_amplitudes: support larger than sample count");
    const CMatrix as = CMatrix::from_columns(dict.matrix, support);
    const CMatrix g = gram(as);
    const CVector rhs = hermitian_product(as, y);
    CVector coef;
    try {
        coef = hpd_solve(g, rhs);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("estimate_amplitudes: rank-deficient support");
    }
    for (std::size_t j = 0; j < support.size(); ++j) coef[j] /= dict.column_norms[support[j]];
    return coef;
}

}  // namespace bandsparse
