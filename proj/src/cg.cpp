#include "tvscg/cg.hpp"

#include <cmath>
#include <stdexcept>

#include "solver_driver.hpp"

namespace tvscg {

CGState cg_step(const LinearMap& A, const CGState& s) {
    if (!(s.delta > 0.0)) throw std::invalid_argument("cg_step: delta must be > 0");
    CGState n;
    std::vector<double> h = detail::normal_apply(A, s.p);
    const double ph = inner_product(s.p, h);
    if (ph == 0.0) throw SingularDirectionError("cg_step: <p, A^T A p> = 0");
    const double alpha = s.delta / ph;
    n.x = s.x;
    n.g = s.g;
    for (size_t i = 0; i < n.x.size(); ++i) {
        n.x[i] += alpha * s.p[i];
        n.g[i] += alpha * h[i];
    }
    n.delta = inner_product(n.g, n.g);
    const double beta = n.delta / s.delta;
    n.p.resize(s.p.size());
    for (size_t i = 0; i < n.p.size(); ++i) n.p[i] = -n.g[i] + beta * s.p[i];
    return n;
}

namespace {

CGState cg_start(const LinearMap& A, const Sinogram& y, const std::vector<double>& x0) {
    CGState st;
    st.x = x0;
    st.g = detail::explicit_gradient(A, st.x, y);
    st.delta = inner_product(st.g, st.g);
    st.p.resize(st.g.size());
    for (size_t i = 0; i < st.p.size(); ++i) st.p[i] = -st.g[i];
    return st;
}

} // namespace

SolveResult run_cg(const LinearMap& A, const Sinogram& y, const Image& x0,
                   const SolverConfig& cfg, const RunOptions& opt) {
    detail::check_instance(A, y, x0);
    SolveResult res;
    detail::RunLoop loop(A, y, cfg, opt, res);

    Image x = x0;
    CGState st = cg_start(A, y, x0.v);
    int k = 0;
    double fk = loop.f_explicit(x);
    loop.emit(0, x, fk);
    while (true) {
        if (loop.stop_check(fk, x, k)) break;
        if (st.delta == 0.0) {
            // Stationary: x is a least-squares minimizer; no step can lower f.
            if (!loop.stopped()) res.x = x;
            break;
        }
        st = cg_step(A, st);
        ++k;
        x.v = st.x;
        fk = loop.f_explicit(x);
        loop.emit(k, x, fk);
    }
    return res;
}

Image run_cg_k(const LinearMap& A, const Sinogram& y, const Image& x0, int K) {
    detail::check_instance(A, y, x0);
    if (K < 1) throw std::invalid_argument("run_cg_k: K must be >= 1");
    CGState st = cg_start(A, y, x0.v);
    for (int step = 0; step < K; ++step) {
        if (st.delta == 0.0) break; // finite termination: later steps are no-ops
        st = cg_step(A, st);
    }
    Image out(x0.width, x0.height);
    out.v = std::move(st.x);
    return out;
}

PRState cg_pr_step(const LinearMap& A, const Sinogram& y,
                   const std::vector<double>& x_half, const PRState& prev) {
    const std::vector<double> g = detail::explicit_gradient(A, x_half, y);
    const double ph = inner_product(prev.p, prev.h);
    if (ph == 0.0) throw SingularDirectionError("cg_pr_step: <p, h> = 0");
    const double beta = inner_product(g, prev.h) / ph;
    PRState n;
    n.p.resize(g.size());
    for (size_t i = 0; i < g.size(); ++i) n.p[i] = -g[i] + beta * prev.p[i];
    n.h = detail::normal_apply(A, n.p);
    const double p2 = inner_product(n.p, n.h);
    if (p2 == 0.0) throw SingularDirectionError("cg_pr_step: <p', h'> = 0");
    const double alpha = -inner_product(g, n.p) / p2;
    n.x = x_half;
    for (size_t i = 0; i < n.x.size(); ++i) n.x[i] += alpha * n.p[i];
    return n;
}

CDState cg_cd_step(const LinearMap& A, const Sinogram& y,
                   const std::vector<double>& x_half, const CDState& prev) {
    CDState n;
    n.g = detail::explicit_gradient(A, x_half, y);
    const double g2 = inner_product(n.g, n.g);
    if (g2 == 0.0) {
        // Converged at the perturbed point; hand back a parked state.
        n.x = x_half;
        n.p.assign(x_half.size(), 0.0);
        n.h.assign(x_half.size(), 0.0);
        return n;
    }
    const double gp = inner_product(prev.g, prev.p);
    if (gp == 0.0) throw DegenerateBetaError("cg_cd_step: <g, p> = 0");
    const double beta = -g2 / gp;
    n.p.resize(n.g.size());
    for (size_t i = 0; i < n.p.size(); ++i) n.p[i] = -n.g[i] + beta * prev.p[i];
    n.h = detail::normal_apply(A, n.p);
    const double p2 = inner_product(n.p, n.h);
    if (p2 == 0.0) throw SingularDirectionError("cg_cd_step: <p', h'> = 0");
    const double alpha = -inner_product(n.g, n.p) / p2;
    n.x = x_half;
    for (size_t i = 0; i < n.x.size(); ++i) n.x[i] += alpha * n.p[i];
    return n;
}

SolveResult run_s_cg(const LinearMap& A, const Sinogram& y, const Image& x0,
                     const SolverConfig& cfg, PerturbationSchedule sched,
                     const SmoothingParams& sp, const RunOptions& opt) {
    auto init_dir = [](const std::vector<double>&, const std::vector<double>& g0) {
        std::vector<double> p(g0.size());
        for (size_t i = 0; i < p.size(); ++i) p[i] = -g0[i];
        return p;
    };
    auto step = [&](const std::vector<double>& xh, const PRState& prev) {
        return cg_pr_step(A, y, xh, prev);
    };
    auto fallback = [&](const std::vector<double>& xh, PRState& st) {
        return detail::steepest_descent_restart(A, y, xh, st);
    };
    return detail::run_superiorized<PRState>(A, y, x0, cfg, sched, sp, opt, init_dir, step,
                                             fallback);
}

SolveResult run_s_cg_cd(const LinearMap& A, const Sinogram& y, const Image& x0,
                        const SolverConfig& cfg, PerturbationSchedule sched,
                        const SmoothingParams& sp, const RunOptions& opt) {
    auto init_dir = [](const std::vector<double>&, const std::vector<double>& g0) {
        std::vector<double> p(g0.size());
        for (size_t i = 0; i < p.size(); ++i) p[i] = -g0[i];
        return p;
    };
    auto step = [&](const std::vector<double>& xh, const CDState& prev) {
        return cg_cd_step(A, y, xh, prev);
    };
    auto fallback = [&](const std::vector<double>& xh, CDState& st) {
        return detail::steepest_descent_restart(A, y, xh, st);
    };
    return detail::run_superiorized<CDState>(A, y, x0, cfg, sched, sp, opt, init_dir, step,
                                             fallback);
}

SolveResult run_s_cg_k(const LinearMap& A, const Sinogram& y, const Image& x0,
                       const SolverConfig& cfg, PerturbationSchedule sched,
                       const SmoothingParams& sp, const RunOptions& opt) {
    detail::check_instance(A, y, x0);
    if (cfg.K < 1) throw std::invalid_argument("run_s_cg_k: K must be >= 1");
    SolveResult res;
    detail::RunLoop loop(A, y, cfg, opt, res);

    Image x_half = x0;
    Image xk = x0;
    int k = 0;
    loop.emit(0, x0, loop.f_explicit(x0));
    while (true) {
        const double f_test = loop.f_explicit(x_half);
        if (loop.stop_check(f_test, x_half, k, &xk)) break;
        x_half = perturbed(xk, sched, sp);
        xk = run_cg_k(A, y, x_half, cfg.K);
        ++k;
        loop.emit(k, xk, loop.f_explicit(xk));
    }
    return res;
}

} // namespace tvscg
