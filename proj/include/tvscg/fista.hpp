#pragma once

#include "tvscg/operators.hpp"
#include "tvscg/solve.hpp"
#include "tvscg/types.hpp"

namespace tvscg {

/// Settings for the TV-regularized proximal-gradient baselines minimizing
/// 1/2 ||y - Ax||^2 + lambda TV(x). step <= 0 means "use 1/c^2 with c from
/// spectral_norm"; an explicit step must satisfy step * c^2 <= 1.
struct ProxConfig {
    double lambda = 0.0;
    double step = 0.0;
    int inner_iters = 20; // dual iterations per prox evaluation
};

/// prox of alpha*TV at b: argmin_x 1/2 ||x - b||^2 + alpha TV(x), computed
/// by fast gradient projection on the dual (inner_iters sweeps).
Image tv_prox(const Image& b, double alpha, int inner_iters = 20);

struct FistaState {
    Image x;      // current primal iterate
    Image x_prev; // previous primal iterate (momentum)
    Image u;      // extrapolated point the gradient step starts from
    double t = 1.0;
};

/// One ISTA step from iterate x:
///   x' = prox_{lambda*step, TV}(x + step * A^T (y - A x)).
Image ista_step(const LinearMap& A, const Sinogram& y, const Image& x, const ProxConfig& cfg);

/// One FISTA step:
///   x_k = prox(u_k + step A^T (y - A u_k));  t' = (1 + sqrt(1+4t^2))/2;
///   u' = x_k + ((t-1)/t') (x_k - x_{k-1}).
FistaState fista_step(const LinearMap& A, const Sinogram& y, const FistaState& s,
                      const ProxConfig& cfg);

/// FISTA from x0 until f(x_k) <= epsilon (explicit-residual guard).
SolveResult run_fista(const LinearMap& A, const Sinogram& y, const Image& x0,
                      const ProxConfig& cfg, const SolverConfig& scfg,
                      const RunOptions& opt = {});

/// Plain ISTA driver with the same stopping rule (reference only).
SolveResult run_ista(const LinearMap& A, const Sinogram& y, const Image& x0,
                     const ProxConfig& cfg, const SolverConfig& scfg,
                     const RunOptions& opt = {});

} // namespace tvscg
