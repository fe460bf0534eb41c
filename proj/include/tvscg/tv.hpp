#pragma once

#include "tvscg/types.hpp"

namespace tvscg {

struct SmoothingParams {
    double kappa = 1e-4; // smoothing floor under the isotropic root; must be > 0
};

/// State of the summable step-size sequence gamma_ell = gamma0 * a^ell.
/// Every draw advances ell, accepted or not, so steps stay summable.
struct PerturbationSchedule {
    double gamma0 = 1.0;
    double a = 0.975;
    long long ell = 0;
    int max_attempts = 20;
};

/// Isotropic total variation: sum over pixels of sqrt(Dh^2 + Dv^2) with
/// forward differences and zero (Neumann) boundary at the last row/column.
double tv_norm(const Image& x);

/// Gradient of the smoothed TV (kappa^2 added under each root).
Image tv_smoothed_gradient(const Image& x, const SmoothingParams& p);

/// -g/||g||_2 for the smoothed-TV gradient g, or the zero image when g = 0.
Image nonascending_direction(const Image& x, const SmoothingParams& p);

/// One superiorization perturbation: draw gamma_ell (advancing ell each
/// attempt), accept x + gamma*v the first time TV does not increase, and
/// return x unchanged after max_attempts rejections or when v = 0.
Image perturbed(const Image& x, PerturbationSchedule& sched, const SmoothingParams& p);

} // namespace tvscg
