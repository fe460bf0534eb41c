#include "tvscg/theory.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "solver_driver.hpp"
#include "tvscg/cg.hpp"
#include "tvscg/rng.hpp"
#include "tvscg/tv.hpp"

namespace tvscg {

TheoryConstants compute_constants(const LinearMap& A, const Sinogram& y) {
    const size_t n = A.domain_dim();
    const size_t m = A.range_dim();
    if (n > 64 * 64)
        throw std::invalid_argument("compute_constants: dense oracle refuses more than 4096 unknowns");
    if (y.size() != m) throw DimensionError("compute_constants: sinogram size does not match operator");

    TheoryConstants tc;
    const SpectralNormResult sn = spectral_norm(A);
    tc.c = sn.value;
    const double c2 = tc.c * tc.c;
    if (c2 > 0.0) {
        tc.eta1 = 1.0 / (4.0 * c2);
        // Positive root of (2 + c^2 eta) eta = 1/(32 c^2).
        tc.eta2 = (std::sqrt(4.125) - 2.0) / (2.0 * c2);
    } else {
        tc.eta1 = std::numeric_limits<double>::infinity();
        tc.eta2 = std::numeric_limits<double>::infinity();
    }
    tc.eta_l = std::min(tc.eta1, tc.eta2);

    // Minimum f via a truncated-SVD pseudoinverse; the normal matrix may be
    // singular, so the minimum-norm least-squares solution is the oracle.
    Eigen::MatrixXd M(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    std::vector<double> e(n, 0.0), col;
    for (size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        A.apply(e, col);
        for (size_t i = 0; i < m; ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        e[j] = 0.0;
    }
    Eigen::VectorXd b(static_cast<Eigen::Index>(m));
    for (size_t i = 0; i < m; ++i) b(static_cast<Eigen::Index>(i)) = y.v[i];
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10); // relative to the largest singular value
    const Eigen::VectorXd x_ls = svd.solve(b);
    tc.eps0 = 0.5 * (M * x_ls - b).squaredNorm();
    tc.theta_hint = std::numeric_limits<double>::quiet_NaN();
    return tc;
}

namespace {

// Unit direction for the proof-model perturbation: the TV nonascending
// direction when it exists, else a deterministic random unit vector.
Image perturbation_direction(const Image& xk, const SmoothingParams& sp, int k) {
    Image v = nonascending_direction(xk, sp);
    double n2 = 0.0;
    for (double t : v.v) n2 += t * t;
    if (n2 > 0.0) return v;
    const uint64_t base = static_cast<uint64_t>(k) * v.v.size();
    for (size_t i = 0; i < v.v.size(); ++i) v.v[i] = gaussian(0x7e0127u, base + i);
    n2 = 0.0;
    for (double t : v.v) n2 += t * t;
    if (n2 > 0.0) {
        const double inv = 1.0 / std::sqrt(n2);
        for (double& t : v.v) t *= inv;
    }
    return v;
}

} // namespace

InstrumentedReport run_s_cg_instrumented(const LinearMap& A, const Sinogram& y, const Image& x0,
                                         double epsilon, double eta0, int max_iter) {
    if (eta0 < 0.0) throw std::invalid_argument("run_s_cg_instrumented: eta0 must be >= 0");
    detail::check_instance(A, y, x0);

    InstrumentedReport rep;
    rep.constants = compute_constants(A, y);
    rep.premise_ok = eta0 <= rep.constants.eta_l;
    const double c2 = rep.constants.c * rep.constants.c;

    SolverConfig cfg;
    cfg.epsilon = epsilon;
    cfg.max_iter = max_iter;
    const RunOptions opt;
    const SmoothingParams sp;
    detail::RunLoop loop(A, y, cfg, opt, rep.run);

    Image x_half = x0;
    Image xk = x0;
    const double f0 = loop.f_explicit(x0);
    loop.emit(0, x0, f0);
    double theta = std::numeric_limits<double>::quiet_NaN();
    // The guard precedes any stepping: eps >= f(x0) stops at zero iterations.
    if (loop.stop_check(f0, x0, 0)) {
        rep.constants.theta_hint = theta;
        return rep;
    }

    std::vector<double> p, h;
    int k = 0;
    double f_cur = f0; // f at the current xk, carried between passes

    // Unperturbed warm-up step, exact line search along the first gradient.
    {
        std::vector<double> g0 = detail::explicit_gradient(A, x0.v, y);
        const double g02 = inner_product(g0, g0);
        if (g02 == 0.0) {
            // Zero gradient with the guard already failed: flagged at x0.
            rep.run.x = x0;
            rep.constants.theta_hint = theta;
            return rep;
        }
        theta = std::sqrt(g02); // f(x0) > eps held above
        p.resize(g0.size());
        for (size_t i = 0; i < g0.size(); ++i) p[i] = -g0[i];
        h = detail::normal_apply(A, p);
        const double ph = inner_product(p, h);
        if (ph == 0.0) throw SingularDirectionError("instrumented warm-up: <p0, h0> = 0");
        const double alpha = -inner_product(g0, p) / ph;
        xk.v = x0.v;
        for (size_t i = 0; i < xk.v.size(); ++i) xk.v[i] += alpha * p[i];
        k = 1;
        f_cur = loop.f_explicit(xk);
        loop.emit(1, xk, f_cur);
    }
    if (k >= max_iter) { // warm-up spent the whole budget
        rep.run.x = xk;
        rep.constants.theta_hint = theta;
        return rep;
    }

    bool stationary = false;
    while (true) {
        const double f_k = f_cur;
        std::vector<double> gk = detail::explicit_gradient(A, xk.v, y);
        const double gk2 = inner_product(gk, gk);
        if (gk2 == 0.0) {
            // Global minimizer reached: one final test, then stop or flag.
            loop.stop_check(f_k, xk, k);
            if (!loop.stopped()) rep.run.x = xk;
            break;
        }
        const double ngk = std::sqrt(gk2);
        if (f_k > epsilon) theta = std::isnan(theta) ? ngk : std::min(theta, ngk);

        // Proof-model perturbation: x_{k+1/2} = x_k + eta0 ||g_k|| v_k.
        const Image v = perturbation_direction(xk, sp, k);
        x_half = xk;
        for (size_t i = 0; i < x_half.v.size(); ++i) x_half.v[i] += eta0 * ngk * v.v[i];
        const double f_half = loop.f_explicit(x_half);

        // Resilient step from the perturbed point; degenerate denominators
        // fall back to one steepest-descent step, a zero gradient parks.
        std::vector<double> gh = detail::explicit_gradient(A, x_half.v, y);
        bool stepped = false;
        const double ph = inner_product(p, h);
        if (ph != 0.0) {
            const double beta = inner_product(gh, h) / ph;
            std::vector<double> pn(gh.size());
            for (size_t i = 0; i < gh.size(); ++i) pn[i] = -gh[i] + beta * p[i];
            std::vector<double> hn = detail::normal_apply(A, pn);
            const double pnhn = inner_product(pn, hn);
            if (pnhn != 0.0) {
                const double alpha = -inner_product(gh, pn) / pnhn;
                xk.v = x_half.v;
                for (size_t i = 0; i < xk.v.size(); ++i) xk.v[i] += alpha * pn[i];
                p = std::move(pn);
                h = std::move(hn);
                stepped = true;
            }
        }
        if (!stepped) {
            const double gh2 = inner_product(gh, gh);
            if (gh2 == 0.0) {
                xk = x_half;
                stationary = true;
            } else {
                p.resize(gh.size());
                for (size_t i = 0; i < gh.size(); ++i) p[i] = -gh[i];
                h = detail::normal_apply(A, p);
                const double alpha = gh2 / inner_product(p, h);
                xk.v = x_half.v;
                for (size_t i = 0; i < xk.v.size(); ++i) xk.v[i] += alpha * p[i];
            }
        }
        ++k;
        const double f_next = loop.f_explicit(xk);
        loop.emit(k, xk, f_next);
        f_cur = f_next;

        const double slack = 1e-9 * gk2 / c2;
        BoundRow a;
        a.k = k - 1;
        a.which = 0;
        a.lhs = 2.0 * f_half - 2.0 * f_next;
        a.rhs = gk2 / (16.0 * c2) - slack;
        a.margin = a.lhs - a.rhs;
        a.pass = a.margin >= 0.0;
        BoundRow bnd;
        bnd.k = k - 1;
        bnd.which = 1;
        bnd.lhs = 2.0 * f_k - 2.0 * f_next;
        bnd.rhs = gk2 / (32.0 * c2) - slack;
        bnd.margin = bnd.lhs - bnd.rhs;
        bnd.pass = bnd.margin >= 0.0;
        rep.rows.push_back(a);
        rep.rows.push_back(bnd);
        if (!a.pass) ++rep.violations;
        if (!bnd.pass) ++rep.violations;

        // Guard value: f at the perturbed point this pass stepped from.
        if (loop.stop_check(f_half, x_half, k, &xk)) break;
        if (stationary) {
            if (!loop.stopped()) rep.run.x = x_half;
            break;
        }
    }

    rep.constants.theta_hint = theta;
    return rep;
}

std::vector<TerminationRow> check_termination(const LinearMap& A, const Sinogram& y,
                                              const Image& x0,
                                              const std::vector<double>& epsilon_list,
                                              int max_iter) {
    const TheoryConstants tc = compute_constants(A, y);
    std::vector<TerminationRow> rows;
    rows.reserve(epsilon_list.size());
    for (double eps : epsilon_list) {
        SolverConfig cfg;
        cfg.epsilon = eps;
        cfg.max_iter = max_iter;
        const SolveResult res =
            run_s_cg(A, y, x0, cfg, PerturbationSchedule{}, SmoothingParams{});
        TerminationRow row;
        row.epsilon = eps;
        row.expected_terminate = eps > tc.eps0;
        row.terminated = res.reached_epsilon;
        row.f_ok = res.reached_epsilon && half_squared_residual(A, res.x, y) <= eps;
        row.iterations = res.stop_k >= 0 ? res.stop_k
                                         : static_cast<int>(res.records.size()) - 1;
        rows.push_back(row);
    }
    return rows;
}

} // namespace tvscg
