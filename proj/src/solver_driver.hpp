#pragma once

// Shared outer loop of the superiorized runners (S-CG, S-CG-CD, S-PCG) plus
// small normal-equation helpers. Internal to src/.

#include <vector>

#include "run_support.hpp"
#include "tvscg/cg.hpp"
#include "tvscg/operators.hpp"
#include "tvscg/solve.hpp"
#include "tvscg/tv.hpp"

namespace tvscg::detail {

inline std::vector<double> residual(const LinearMap& A, const std::vector<double>& x,
                                    const Sinogram& y) {
    std::vector<double> r = A.apply(x);
    for (size_t i = 0; i < r.size(); ++i) r[i] -= y.v[i];
    return r;
}

inline std::vector<double> explicit_gradient(const LinearMap& A, const std::vector<double>& x,
                                             const Sinogram& y) {
    return A.apply_adjoint(residual(A, x, y));
}

inline std::vector<double> normal_apply(const LinearMap& A, const std::vector<double>& p) {
    return A.apply_adjoint(A.apply(p));
}

// Relative residuals of <g_{k+1}, p_k> = 0 and <A p_k, A p_{k-1}> = 0, the
// structural identities that survive perturbation.
inline void track_identities(const LinearMap& A, const Sinogram& y, SolveResult& res,
                             const std::vector<double>& x_new, const std::vector<double>& p_new,
                             const std::vector<double>& h_new, const std::vector<double>& p_prev,
                             const std::vector<double>& h_prev) {
    const std::vector<double> g_next = explicit_gradient(A, x_new, y);
    const double ng = norm2(g_next), np = norm2(p_new);
    if (ng > 0.0 && np > 0.0)
        res.max_orth = std::max(res.max_orth, std::abs(inner_product(g_next, p_new)) / (ng * np));
    // <A p_k, A p_{k-1}> = <p_k, h_{k-1}>; norms ||A p|| = sqrt(<p, h>).
    const double na = std::sqrt(std::max(0.0, inner_product(p_new, h_new)));
    const double nb = std::sqrt(std::max(0.0, inner_product(p_prev, h_prev)));
    if (na > 0.0 && nb > 0.0)
        res.max_conj = std::max(res.max_conj, std::abs(inner_product(p_new, h_prev)) / (na * nb));
}

// Outer loop shared by the non-restarted superiorized runners.
//   initial_dir(x0, g0) -> p0        warm-up search direction (-g0 or -z0)
//   step(x_half, prev) -> State      resilient step; throws on degeneracy
//   fallback(x_half, State&) -> bool steepest-descent restart; false if g = 0
template <class State, class InitDirFn, class StepFn, class FallbackFn>
SolveResult run_superiorized(const LinearMap& A, const Sinogram& y, const Image& x0,
                             const SolverConfig& cfg, PerturbationSchedule sched,
                             const SmoothingParams& sp, const RunOptions& opt,
                             InitDirFn initial_dir, StepFn step, FallbackFn fallback) {
    check_instance(A, y, x0);
    SolveResult res;
    RunLoop loop(A, y, cfg, opt, res);

    Image x_half = x0; // x_{k-1/2}: the iterate the stopping test looks at
    Image xk = x0;
    const double f0 = loop.f_explicit(x0);
    loop.emit(0, x0, f0);
    // The guard precedes any stepping: eps >= f(x0) stops at zero iterations.
    if (loop.stop_check(f0, x0, 0)) return res;

    State st;
    st.x = x0.v;
    int k = 0;
    bool stationary = false;

    // Unperturbed warm-up step with exact line search along p0.
    {
        std::vector<double> g0 = explicit_gradient(A, st.x, y);
        if (inner_product(g0, g0) == 0.0) {
            // Zero gradient with the guard already failed: flagged at x0.
            res.x = x0;
            return res;
        }
        st.p = initial_dir(x0.v, g0);
        st.h = normal_apply(A, st.p);
        const double ph = inner_product(st.p, st.h);
        if (ph == 0.0) throw SingularDirectionError("superiorized warm-up: <p0, h0> = 0");
        const double alpha = -inner_product(g0, st.p) / ph;
        for (size_t i = 0; i < st.x.size(); ++i) st.x[i] += alpha * st.p[i];
        if constexpr (requires { st.g; }) st.g = std::move(g0);
        k = 1;
        xk.v = st.x;
        loop.emit(1, xk, loop.f_explicit(xk));
    }
    if (k >= cfg.max_iter) { // warm-up spent the whole budget
        res.x = xk;
        return res;
    }

    while (true) {
        x_half = perturbed(xk, sched, sp);
        const std::vector<double> p_prev = st.p, h_prev = st.h;
        bool fell_back = false;
        try {
            st = step(x_half.v, st);
            if (inner_product(st.p, st.p) == 0.0) stationary = true; // parked state
        } catch (const SingularDirectionError&) {
            fell_back = true;
        } catch (const DegenerateBetaError&) {
            fell_back = true;
        }
        if (fell_back) stationary = !fallback(x_half.v, st);
        ++k;
        xk.v = st.x;
        loop.emit(k, xk, loop.f_explicit(xk));
        if (opt.check_identities && !fell_back && !stationary)
            track_identities(A, y, res, st.x, st.p, st.h, p_prev, h_prev);
        // Guard value: f at the perturbed point this pass stepped from.
        if (loop.stop_check(loop.f_explicit(x_half), x_half, k, &xk)) break;
        if (stationary) {
            // Zero gradient: f cannot decrease further; flagged unless stopped.
            if (!loop.stopped()) res.x = x_half;
            break;
        }
    }
    return res;
}

// Steepest-descent fallback shared by the runners; returns false on a zero
// gradient (nothing to do but park at x_half).
template <class State>
bool steepest_descent_restart(const LinearMap& A, const Sinogram& y,
                              const std::vector<double>& x_half, State& st) {
    std::vector<double> g = explicit_gradient(A, x_half, y);
    const double g2 = inner_product(g, g);
    st.x = x_half;
    if constexpr (requires { st.g; }) st.g = g;
    if (g2 == 0.0) return false;
    st.p.resize(g.size());
    for (size_t i = 0; i < g.size(); ++i) st.p[i] = -g[i];
    st.h = normal_apply(A, st.p);
    // g is in range(A^T), so <p, A^T A p> = ||A g||^2 > 0 here.
    const double alpha = g2 / inner_product(st.p, st.h);
    for (size_t i = 0; i < st.x.size(); ++i) st.x[i] += alpha * st.p[i];
    return true;
}

} // namespace tvscg::detail
