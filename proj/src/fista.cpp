#include "tvscg/fista.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "run_support.hpp"
#include "solver_driver.hpp"

namespace tvscg {

namespace {

// Dual pair fields for the prox: ph pairs with horizontal forward
// differences (last column identically zero), pv with vertical ones
// (last row identically zero). Both stored image-sized.

// x = b - alpha * D^T p.
void primal_from_dual(const Image& b, double alpha, const std::vector<double>& ph,
                      const std::vector<double>& pv, Image& x) {
    const int W = b.width, H = b.height;
    x.width = W;
    x.height = H;
    x.v.resize(b.v.size());
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j) {
            const size_t n = static_cast<size_t>(i) * W + j;
            double div = -ph[n] - pv[n];
            if (j > 0) div += ph[n - 1];
            if (i > 0) div += pv[n - W];
            x.v[n] = b.v[n] - alpha * div;
        }
}

} // namespace

Image tv_prox(const Image& b, double alpha, int inner_iters) {
    if (b.size() == 0) throw std::invalid_argument("tv_prox: empty image");
    if (alpha < 0.0) throw std::invalid_argument("tv_prox: alpha must be >= 0");
    if (inner_iters < 1) throw std::invalid_argument("tv_prox: inner_iters must be >= 1");
    if (alpha == 0.0) return b;

    const int W = b.width, H = b.height;
    const size_t N = b.v.size();
    // Fast gradient projection on the dual: p duals, u extrapolated points.
    std::vector<double> ph(N, 0.0), pv(N, 0.0), ph_prev(N, 0.0), pv_prev(N, 0.0);
    std::vector<double> uh(N, 0.0), uv(N, 0.0);
    Image x;
    double t = 1.0;
    // Dual gradient is alpha*D(b - alpha D^T u); ||D||^2 <= 8 gives the step.
    const double step = 1.0 / (8.0 * alpha);

    for (int it = 0; it < inner_iters; ++it) {
        primal_from_dual(b, alpha, uh, uv, x);
        std::swap(ph, ph_prev);
        std::swap(pv, pv_prev);
        for (int i = 0; i < H; ++i)
            for (int j = 0; j < W; ++j) {
                const size_t n = static_cast<size_t>(i) * W + j;
                const double gh = j + 1 < W ? x.v[n + 1] - x.v[n] : 0.0;
                const double gv = i + 1 < H ? x.v[n + W] - x.v[n] : 0.0;
                double nh = uh[n] + step * gh;
                double nv = uv[n] + step * gv;
                // Isotropic: project the pair onto the unit disc.
                const double norm = std::sqrt(nh * nh + nv * nv);
                if (norm > 1.0) {
                    nh /= norm;
                    nv /= norm;
                }
                ph[n] = nh;
                pv[n] = nv;
            }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double m = (t - 1.0) / t_next;
        for (size_t n = 0; n < N; ++n) {
            uh[n] = ph[n] + m * (ph[n] - ph_prev[n]);
            uv[n] = pv[n] + m * (pv[n] - pv_prev[n]);
        }
        t = t_next;
    }

    primal_from_dual(b, alpha, ph, pv, x);
    return x;
}

namespace {

void check_prox_config(const ProxConfig& cfg) {
    if (cfg.lambda < 0.0) throw std::invalid_argument("prox config: lambda must be >= 0");
    if (cfg.inner_iters < 1) throw std::invalid_argument("prox config: inner_iters must be >= 1");
}

// Resolve step <= 0 to 1/c^2 via the power iteration.
double resolve_step(const LinearMap& A, const ProxConfig& cfg) {
    if (cfg.step > 0.0) return cfg.step;
    const double c = spectral_norm(A).value;
    if (c <= 0.0) throw std::invalid_argument("prox config: operator norm is zero");
    return 1.0 / (c * c);
}

Image gradient_step(const LinearMap& A, const Sinogram& y, const Image& from, double step,
                    double alpha, int inner_iters) {
    // b = from + step * A^T (y - A from), then prox of alpha*TV at b.
    std::vector<double> r = A.apply(from.v);
    for (size_t i = 0; i < r.size(); ++i) r[i] = y.v[i] - r[i];
    std::vector<double> at = A.apply_adjoint(r);
    Image b = from;
    for (size_t i = 0; i < b.v.size(); ++i) b.v[i] += step * at[i];
    return tv_prox(b, alpha, inner_iters);
}

} // namespace

Image ista_step(const LinearMap& A, const Sinogram& y, const Image& x, const ProxConfig& cfg) {
    check_prox_config(cfg);
    const double step = resolve_step(A, cfg);
    return gradient_step(A, y, x, step, cfg.lambda * step, cfg.inner_iters);
}

FistaState fista_step(const LinearMap& A, const Sinogram& y, const FistaState& s,
                      const ProxConfig& cfg) {
    check_prox_config(cfg);
    const double step = resolve_step(A, cfg);
    FistaState n;
    n.x = gradient_step(A, y, s.u, step, cfg.lambda * step, cfg.inner_iters);
    n.t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s.t * s.t));
    const double m = (s.t - 1.0) / n.t;
    n.u = n.x;
    for (size_t i = 0; i < n.u.v.size(); ++i) n.u.v[i] += m * (n.x.v[i] - s.x.v[i]);
    n.x_prev = s.x;
    return n;
}

namespace {

SolveResult run_proximal(const LinearMap& A, const Sinogram& y, const Image& x0,
                         const ProxConfig& cfg, const SolverConfig& scfg,
                         const RunOptions& opt, bool momentum) {
    detail::check_instance(A, y, x0);
    check_prox_config(cfg);
    SolveResult res;
    detail::RunLoop loop(A, y, scfg, opt, res);

    ProxConfig rc = cfg;
    rc.step = resolve_step(A, cfg); // one power iteration up front, reused each step

    FistaState st;
    st.x = x0;
    st.x_prev = x0;
    st.u = x0;
    st.t = 1.0;

    int k = 0;
    double fk = loop.f_explicit(st.x);
    loop.emit(0, st.x, fk);
    while (true) {
        if (loop.stop_check(fk, st.x, k)) break;
        if (momentum) {
            st = fista_step(A, y, st, rc);
        } else {
            Image nx = ista_step(A, y, st.x, rc);
            st.x_prev = std::move(st.x);
            st.x = std::move(nx);
            st.u = st.x;
        }
        ++k;
        fk = loop.f_explicit(st.x);
        loop.emit(k, st.x, fk);
    }
    return res;
}

} // namespace

SolveResult run_fista(const LinearMap& A, const Sinogram& y, const Image& x0,
                      const ProxConfig& cfg, const SolverConfig& scfg, const RunOptions& opt) {
    return run_proximal(A, y, x0, cfg, scfg, opt, true);
}

SolveResult run_ista(const LinearMap& A, const Sinogram& y, const Image& x0,
                     const ProxConfig& cfg, const SolverConfig& scfg, const RunOptions& opt) {
    return run_proximal(A, y, x0, cfg, scfg, opt, false);
}

} // namespace tvscg
