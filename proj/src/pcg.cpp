#include "tvscg/pcg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fft.hpp"
#include "solver_driver.hpp"

namespace tvscg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> filter_factors(int n_rays, double mu) {
    if (n_rays < 1) throw std::invalid_argument("filter_factors: n_rays must be >= 1");
    if (mu < 0.0) throw std::invalid_argument("filter_factors: mu must be >= 0");
    std::vector<double> gains(n_rays);
    for (int j = 0; j < n_rays; ++j) {
        const double w = 2.0 * kPi * std::min(j, n_rays - j) / n_rays; // |w| in [0, pi]
        gains[j] = (w + mu) * (0.54 + 0.46 * std::cos(w));
    }
    return gains;
}

Preconditioner make_preconditioner(const Geometry& g, double mu) {
    Preconditioner p;
    p.mu = mu;
    p.n_angles = g.n_angles;
    p.n_rays = g.n_rays;
    p.gains = filter_factors(g.n_rays, mu);
    return p;
}

Preconditioner identity_preconditioner() {
    return Preconditioner{}; // empty gains = bypass
}

namespace {

bool is_identity(const Preconditioner& P) { return P.gains.empty(); }

// Filtered copy of a range-space vector (rows of length P.n_rays).
std::vector<double> filtered(const Preconditioner& P, const std::vector<double>& r) {
    std::vector<double> out = r;
    if (is_identity(P)) return out;
    if (static_cast<long long>(P.n_angles) * P.n_rays != static_cast<long long>(r.size()))
        throw DimensionError("apply_precond_residual: residual does not match filter layout");
    detail::filter_rows_inplace(out, P.n_angles, P.n_rays, P.gains);
    return out;
}

} // namespace

std::vector<double> apply_precond_residual(const LinearMap& A, const Preconditioner& P,
                                           const std::vector<double>& r) {
    return A.apply_adjoint(filtered(P, r));
}

PCGState pcg_step(const LinearMap& A, const Preconditioner& P, const PCGState& s) {
    if (s.delta == 0.0) throw std::invalid_argument("pcg_step: delta must be nonzero");
    PCGState n;
    std::vector<double> ap = A.apply(s.p);
    std::vector<double> h = A.apply_adjoint(ap);
    const double ph = inner_product(s.p, h);
    if (ph == 0.0) throw SingularDirectionError("pcg_step: <p, A^T A p> = 0");
    const double alpha = s.delta / ph;
    n.x = s.x;
    n.g = s.g;
    n.r = s.r;
    for (size_t i = 0; i < n.x.size(); ++i) {
        n.x[i] += alpha * s.p[i];
        n.g[i] += alpha * h[i];
    }
    for (size_t i = 0; i < n.r.size(); ++i) n.r[i] += alpha * ap[i];
    n.z = apply_precond_residual(A, P, n.r);
    n.delta = inner_product(n.g, n.z);
    const double beta = n.delta / s.delta;
    n.p.resize(s.p.size());
    for (size_t i = 0; i < n.p.size(); ++i) n.p[i] = -n.z[i] + beta * s.p[i];
    return n;
}

namespace {

PCGState pcg_start(const LinearMap& A, const Preconditioner& P, const Sinogram& y,
                   const std::vector<double>& x0) {
    PCGState st;
    st.x = x0;
    st.r = detail::residual(A, st.x, y);
    st.g = A.apply_adjoint(st.r);
    st.z = apply_precond_residual(A, P, st.r);
    st.delta = inner_product(st.g, st.z);
    st.p.resize(st.z.size());
    for (size_t i = 0; i < st.p.size(); ++i) st.p[i] = -st.z[i];
    return st;
}

} // namespace

SolveResult run_pcg(const LinearMap& A, const Sinogram& y, const Image& x0,
                    const Preconditioner& P, const SolverConfig& cfg, const RunOptions& opt) {
    detail::check_instance(A, y, x0);
    SolveResult res;
    detail::RunLoop loop(A, y, cfg, opt, res);

    Image x = x0;
    PCGState st = pcg_start(A, P, y, x0.v);
    int k = 0;
    double fk = loop.f_explicit(x);
    loop.emit(0, x, fk);
    while (true) {
        if (loop.stop_check(fk, x, k)) break;
        if (st.delta == 0.0) {
            // <g, z> = 0: stationary (or a degenerate pairing); stop flagged.
            if (!loop.stopped()) res.x = x;
            break;
        }
        st = pcg_step(A, P, st);
        ++k;
        x.v = st.x;
        fk = loop.f_explicit(x);
        loop.emit(k, x, fk);
    }
    return res;
}

PRState pcg_pr_step(const LinearMap& A, const Preconditioner& P, const Sinogram& y,
                    const std::vector<double>& x_half, const PRState& prev) {
    const std::vector<double> r = detail::residual(A, x_half, y);
    const std::vector<double> g = A.apply_adjoint(r);
    // Bypass shares the adjoint: z = g exactly for the identity preconditioner.
    const std::vector<double> z = is_identity(P) ? g : A.apply_adjoint(filtered(P, r));
    const double ph = inner_product(prev.p, prev.h);
    if (ph == 0.0) throw SingularDirectionError("pcg_pr_step: <p, h> = 0");
    const double beta = inner_product(z, prev.h) / ph;
    PRState n;
    n.p.resize(z.size());
    for (size_t i = 0; i < n.p.size(); ++i) n.p[i] = -z[i] + beta * prev.p[i];
    n.h = detail::normal_apply(A, n.p);
    const double p2 = inner_product(n.p, n.h);
    if (p2 == 0.0) throw SingularDirectionError("pcg_pr_step: <p', h'> = 0");
    const double alpha = -inner_product(g, n.p) / p2;
    n.x = x_half;
    for (size_t i = 0; i < n.x.size(); ++i) n.x[i] += alpha * n.p[i];
    return n;
}

SolveResult run_s_pcg(const LinearMap& A, const Sinogram& y, const Image& x0,
                      const Preconditioner& P, const SolverConfig& cfg,
                      PerturbationSchedule sched, const SmoothingParams& sp,
                      const RunOptions& opt) {
    auto init_dir = [&](const std::vector<double>& x0v, const std::vector<double>&) {
        // p0 = -z0 = -precond(A x0 - y).
        std::vector<double> z = apply_precond_residual(A, P, detail::residual(A, x0v, y));
        for (double& e : z) e = -e;
        return z;
    };
    auto step = [&](const std::vector<double>& xh, const PRState& prev) {
        return pcg_pr_step(A, P, y, xh, prev);
    };
    auto fallback = [&](const std::vector<double>& xh, PRState& st) {
        return detail::steepest_descent_restart(A, y, xh, st);
    };
    return detail::run_superiorized<PRState>(A, y, x0, cfg, sched, sp, opt, init_dir, step,
                                             fallback);
}

SolveResult run_s_pcg_k(const LinearMap& A, const Sinogram& y, const Image& x0,
                        const Preconditioner& P, const SolverConfig& cfg,
                        PerturbationSchedule sched, const SmoothingParams& sp,
                        const RunOptions& opt) {
    detail::check_instance(A, y, x0);
    if (cfg.K < 1) throw std::invalid_argument("run_s_pcg_k: K must be >= 1");
    if (cfg.K > 5)
        std::fprintf(stderr, "run_s_pcg_k: K = %d gives diminishing returns beyond 5\n", cfg.K);
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
        // K preconditioned CG steps from a fresh start at the perturbed point.
        PCGState st = pcg_start(A, P, y, x_half.v);
        for (int s = 0; s < cfg.K; ++s) {
            if (st.delta == 0.0) break;
            st = pcg_step(A, P, st);
        }
        ++k;
        xk.v = st.x;
        loop.emit(k, xk, loop.f_explicit(xk));
    }
    return res;
}

Image fbp_reconstruct(const Geometry& g, const Sinogram& y, double mu) {
    if (y.n_angles != g.n_angles || y.n_rays != g.n_rays)
        throw DimensionError("fbp_reconstruct: sinogram shape does not match geometry");
    // Inversion needs the linear convolution of the ramp kernel with each
    // row; on an unpadded transform the kernel's 1/k^2 tails wrap around and
    // depress the interior by ~10% at typical sizes. Pad to >= 2x row length
    // (the circulant preconditioner is a different animal and stays unpadded).
    int padded = 1;
    while (padded < 2 * g.n_rays) padded *= 2;
    std::vector<double> rows(static_cast<size_t>(g.n_angles) * padded, 0.0);
    for (int a = 0; a < g.n_angles; ++a)
        std::copy_n(y.v.begin() + static_cast<size_t>(a) * g.n_rays, g.n_rays,
                    rows.begin() + static_cast<size_t>(a) * padded);
    detail::filter_rows_inplace(rows, g.n_angles, padded, filter_factors(padded, mu));
    Sinogram filtered_y = y;
    for (int a = 0; a < g.n_angles; ++a)
        std::copy_n(rows.begin() + static_cast<size_t>(a) * padded, g.n_rays,
                    filtered_y.v.begin() + static_cast<size_t>(a) * g.n_rays);
    Image out = back_project(g, filtered_y);
    // Ramp gains are |w| in radians per sample: the angular integral brings
    // dtheta = pi/n_angles and the frequency integral a further 1/(2 pi);
    // the detector-spacing factors cancel against the adjoint backprojection.
    const double scale = 1.0 / (2.0 * g.n_angles);
    for (double& e : out.v) e *= scale;
    return out;
}

} // namespace tvscg
