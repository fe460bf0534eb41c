#pragma once

#include <vector>

#include "tvscg/operators.hpp"
#include "tvscg/solve.hpp"
#include "tvscg/types.hpp"

namespace tvscg {

/// Constants behind the convergence guarantee for the superiorized CG family.
///   c      operator norm of A (power iteration)
///   eta1   1/(4 c^2)
///   eta2   positive root of (2 + c^2 eta) eta = 1/(32 c^2)
///   eta_l  min(eta1, eta2): admissible perturbation-size coefficient
///   eps0   f at a least-squares solution (dense pseudoinverse oracle)
///   theta_hint  smallest ||g_k|| observed while f > eps (NaN until a run fills it)
struct TheoryConstants {
    double c = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double eta_l = 0.0;
    double eps0 = 0.0;
    double theta_hint = 0.0;
};

/// Dense-oracle computation of the constants; refuses instances with an
/// image dimension above 64x64 (the pseudoinverse is exact but cubic).
TheoryConstants compute_constants(const LinearMap& A, const Sinogram& y);

/// One per-iteration bound check; which = 0 is the perturbed-step decrease
///   2 f(x_{k+1/2}) - 2 f(x_{k+1}) >= ||g_k||^2 / (16 c^2),
/// which = 1 the combined decrease
///   2 f(x_k) - 2 f(x_{k+1}) >= ||g_k||^2 / (32 c^2),
/// both minus the roundoff slack 1e-9 ||g_k||^2 / c^2.
struct BoundRow {
    int k = 0;
    int which = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; // lhs - rhs
    bool pass = false;
};

struct InstrumentedReport {
    TheoryConstants constants; // theta_hint filled from the run
    std::vector<BoundRow> rows;
    bool premise_ok = true; // eta0 <= eta_l (bounds are only guaranteed then)
    int violations = 0;
    SolveResult run;
};

/// S-CG with the proof-shaped perturbation u_k = eta0 ||g_k|| v_k, where v_k
/// is the TV nonascending direction (or a seeded random unit vector when that
/// is zero), checking both decrease bounds every iteration. eta0 may be 0
/// (degenerate) or above eta_l (premise broken: violations are reported, not
/// guaranteed absent); a negative eta0 is an argument error.
InstrumentedReport run_s_cg_instrumented(const LinearMap& A, const Sinogram& y, const Image& x0,
                                         double epsilon, double eta0, int max_iter = 50);

struct TerminationRow {
    double epsilon = 0.0;
    bool expected_terminate = false; // epsilon > eps0
    bool terminated = false;
    bool f_ok = false; // f(output) <= epsilon when terminated
    int iterations = 0;
};

/// Runs S-CG for each epsilon and records whether the termination guarantee
/// (epsilon > eps0 implies stopping with f <= epsilon) held. Epsilons at or
/// below eps0 are expected not to terminate and are reported, not failed.
std::vector<TerminationRow> check_termination(const LinearMap& A, const Sinogram& y,
                                              const Image& x0,
                                              const std::vector<double>& epsilon_list,
                                              int max_iter = 2000);

} // namespace tvscg
