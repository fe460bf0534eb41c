#pragma once

#include "tvscg/operators.hpp"
#include "tvscg/solve.hpp"
#include "tvscg/tv.hpp"
#include "tvscg/types.hpp"

namespace tvscg {

// All solvers minimize f(x) = 1/2 ||y - Ax||^2; superiorized variants
// interleave TV-nonascending perturbations between steps. Loop guards always
// evaluate f from a freshly recomputed residual, never the recursive one.

/// Plain CG on the normal equations; delta = ||g||^2.
struct CGState {
    std::vector<double> x, g, p;
    double delta = 0.0;
};

/// Perturbation-resilient step state: h = A^T A p from the producing step.
struct PRState {
    std::vector<double> x, p, h;
};

/// Conjugate-descent step state; g is the gradient at the perturbed point
/// that produced x (feeds the next step's beta denominator).
struct CDState {
    std::vector<double> x, p, h, g;
};

/// One CG step with the recursive gradient update:
///   h = A^T A p;  alpha = delta / <p,h>;  x' = x + alpha p;
///   g' = g + alpha h;  delta' = ||g'||^2;  beta = delta'/delta;  p' = -g' + beta p.
/// Requires delta > 0; throws SingularDirectionError when <p,h> = 0.
CGState cg_step(const LinearMap& A, const CGState& s);

/// Unperturbed CG from x0 until f <= epsilon (explicit-residual guard).
SolveResult run_cg(const LinearMap& A, const Sinogram& y, const Image& x0,
                   const SolverConfig& cfg, const RunOptions& opt = {});

/// Exactly K CG steps from a fresh start at x0 (no stopping test). A zero
/// gradient ends the recursion early with x unchanged from then on.
Image run_cg_k(const LinearMap& A, const Sinogram& y, const Image& x0, int K);

/// Superiorized restarted CG: perturb, run K fresh CG steps, repeat while
/// f at the perturbed iterate exceeds epsilon; outputs that perturbed iterate.
SolveResult run_s_cg_k(const LinearMap& A, const Sinogram& y, const Image& x0,
                       const SolverConfig& cfg, PerturbationSchedule sched,
                       const SmoothingParams& sp, const RunOptions& opt = {});

/// Perturbation-resilient CG step from the perturbed point x_half:
///   g' = A^T (A x_half - y)  (explicit: the recursive update is invalid
///   under perturbation);  beta = <g',h>/<p,h>;  p' = -g' + beta p;
///   h' = A^T A p';  alpha = -<g',p'>/<p',h'>;  x' = x_half + alpha p'.
/// Throws SingularDirectionError when <p,h> = 0 or <p',h'> = 0.
PRState cg_pr_step(const LinearMap& A, const Sinogram& y,
                   const std::vector<double>& x_half, const PRState& prev);

/// Superiorized CG (perturbation-resilient steps, no restarts).
SolveResult run_s_cg(const LinearMap& A, const Sinogram& y, const Image& x0,
                     const SolverConfig& cfg, PerturbationSchedule sched,
                     const SmoothingParams& sp, const RunOptions& opt = {});

/// Conjugate-descent variant of the resilient step:
///   beta = -||g'||^2 / <g, p>  (g = previous perturbed-point gradient).
/// A zero g' returns {x_half, 0, 0, 0}; the caller treats that as converged.
/// Throws DegenerateBetaError when <g,p> = 0, SingularDirectionError when
/// <p',h'> = 0.
CDState cg_cd_step(const LinearMap& A, const Sinogram& y,
                   const std::vector<double>& x_half, const CDState& prev);

/// Superiorized conjugate-descent CG.
SolveResult run_s_cg_cd(const LinearMap& A, const Sinogram& y, const Image& x0,
                        const SolverConfig& cfg, PerturbationSchedule sched,
                        const SmoothingParams& sp, const RunOptions& opt = {});

} // namespace tvscg
