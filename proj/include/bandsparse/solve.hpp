#pragma once

#include <vector>

#include "bandsparse/dict.hpp"
#include "bandsparse/numerics.hpp"

namespace bandsparse {

struct LassoConfig {
    double lambda = 0.0;
    double rho = 1.0;           // ADMM step length
    int max_iters = 5000;
    double tol_primal = 0.0;    // <= 0 means the default 1e-8 * sqrt(P)
    double tol_dual = 0.0;
    double eps_act = 1e-3;      // relative magnitude threshold for the active set
    void validate() const;
};

struct SolveResult {
    CVector coefficients;                 // final z (LASSO) or powers p (SPICE)
    std::vector<std::size_t> active_set;  // |coeff| > eps_act * max |coeff|
    int iterations = 0;
    double objective = 0.0;
    bool converged = false;
    std::vector<double> criterion_trace;  // SPICE only: criterion per iteration
};

struct SpiceConfig {
    int max_iters = 300;
    double tol = 1e-8;              // relative change in the stacked power vector
    double eps_act = 1e-3;
    double sigma_floor_scale = 1e-12;  // floor = scale * ||y||^2 / N
    void validate() const;
};

// Complex soft threshold: shrink each magnitude by kappa, clamp at zero,
// preserve phase.
CVector soft_threshold(const CVector& v, double kappa);

// Smallest lambda for which the LASSO solution is identically zero:
// max_i |d_i^H y| over unit-norm columns.
double lambda_max(const Dictionary& dict, const CVector& y);

// alpha * lambda_max, 0 < alpha <= 1.
double lambda_heuristic(const Dictionary& dict, const CVector& y, double alpha);

// ADMM for min 1/2 ||y - A z||^2 + lambda ||z||_1. The x-step system is
// factorized once; for P > N the Woodbury identity reduces it to an N x N
// factor.
SolveResult lasso_admm(const Dictionary& dict, const CVector& y, const LassoConfig& cfg);

// Covariance-fitting criterion y^H R^-1 y + ||p||_1 + ||sigma||_1 with
// R = B diag(p) B^H + diag(sigma), minimized by alternating exact updates;
// the criterion is non-increasing across iterations.
SolveResult spice(const Dictionary& dict, const CVector& y, const SpiceConfig& cfg);

// Post-selection least squares over the support columns, rescaled by the
// stored column norms back to physical amplitude scale.
CVector estimate_amplitudes(const Dictionary& dict, const CVector& y,
                            const std::vector<std::size_t>& support);

std::vector<std::size_t> active_indices(const CVector& coefficients, double eps_act);

}  // namespace bandsparse
