#pragma once

#include "tvscg/cg.hpp"
#include "tvscg/operators.hpp"
#include "tvscg/projector.hpp"
#include "tvscg/solve.hpp"
#include "tvscg/tv.hpp"
#include "tvscg/types.hpp"

namespace tvscg {

/// Fourier-domain sinogram filter used as the CG preconditioner: each
/// detector row is transformed, multiplied by ramp x Hamming gains
///   c(w) = (|w| + mu) * (0.54 + 0.46 cos w),  w in [-pi, pi],
/// and transformed back. Empty gains mean the identity (filter bypassed).
struct Preconditioner {
    double mu = 0.01;
    int n_angles = 1; // row structure of the range: n_angles rows of n_rays
    int n_rays = 0;
    std::vector<double> gains; // per-DFT-bin factors, length n_rays
};

/// Gains for all n_rays DFT bins (bin j has w = 2*pi*min(j, n-j)/n).
std::vector<double> filter_factors(int n_rays, double mu);

Preconditioner make_preconditioner(const Geometry& g, double mu = 0.01);

/// Identity preconditioner: apply_precond_residual reduces to A^T r exactly.
Preconditioner identity_preconditioner();

/// z = A^T F^-1 C F r: filter each sinogram row, then backproject.
std::vector<double> apply_precond_residual(const LinearMap& A, const Preconditioner& P,
                                           const std::vector<double>& r);

/// Preconditioned CG state; r tracks the range-space residual Ax - y and
/// delta = <g, z>.
struct PCGState {
    std::vector<double> x, g, z, p, r;
    double delta = 0.0;
};

/// One PCG step with recursive g and r:
///   h = A^T A p;  alpha = delta/<p,h>;  x' = x + alpha p;  g' = g + alpha h;
///   r' = r + alpha A p;  z' = precond(r');  delta' = <g',z'>;
///   beta = delta'/delta;  p' = -z' + beta p.
PCGState pcg_step(const LinearMap& A, const Preconditioner& P, const PCGState& s);

SolveResult run_pcg(const LinearMap& A, const Sinogram& y, const Image& x0,
                    const Preconditioner& P, const SolverConfig& cfg,
                    const RunOptions& opt = {});

/// Perturbation-resilient PCG step from the perturbed point x_half:
///   g' explicit;  z' = precond(A x_half - y);  beta = <z',h>/<p,h>;
///   p' = -z' + beta p;  h' = A^T A p';  alpha = -<g',p'>/<p',h'>.
PRState pcg_pr_step(const LinearMap& A, const Preconditioner& P, const Sinogram& y,
                    const std::vector<double>& x_half, const PRState& prev);

/// Superiorized restarted PCG (K fresh PCG steps per outer iteration;
/// K > 5 earns a diminishing-returns warning on stderr).
SolveResult run_s_pcg_k(const LinearMap& A, const Sinogram& y, const Image& x0,
                        const Preconditioner& P, const SolverConfig& cfg,
                        PerturbationSchedule sched, const SmoothingParams& sp,
                        const RunOptions& opt = {});

/// Superiorized PCG (resilient steps, no restarts).
SolveResult run_s_pcg(const LinearMap& A, const Sinogram& y, const Image& x0,
                      const Preconditioner& P, const SolverConfig& cfg,
                      PerturbationSchedule sched, const SmoothingParams& sp,
                      const RunOptions& opt = {});

/// Filtered backprojection: filter y's rows (default mu = 0), backproject,
/// scale. One-shot reference reconstruction, not iterative.
Image fbp_reconstruct(const Geometry& g, const Sinogram& y, double mu = 0.0);

} // namespace tvscg
