// Acceptance gates for the toolkit: one PASS/FAIL line per criterion,
// exit code = number of failures. Each gate is self-contained and runs
// at desk scale or below; wall-clock budgets are part of the gate where
// one is stated.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tvscg/bench.hpp"
#include "tvscg/cg.hpp"
#include "tvscg/fista.hpp"
#include "tvscg/io.hpp"
#include "tvscg/operators.hpp"
#include "tvscg/pcg.hpp"
#include "tvscg/projector.hpp"
#include "tvscg/solve.hpp"
#include "tvscg/theory.hpp"
#include "tvscg/tv.hpp"
#include "tvscg/types.hpp"

using namespace tvscg;

namespace {

struct Gate {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

double now_minus(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        num += d * d;
        den += b[i] * b[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

struct Instance {
    Geometry geom;
    Image truth;
    Sinogram data;
    NoiseModel noise;
    double epsilon = 0.0; // L * sigma2
};

Instance make_instance(int size, int angles, int rays, double level, uint64_t seed) {
    Instance in;
    in.geom = make_geometry(angles, rays, size, size);
    in.truth = make_phantom(size);
    const Sinogram clean = forward_project(in.geom, in.truth);
    auto [noisy, nm] = add_noise(clean, level, seed);
    in.data = std::move(noisy);
    in.noise = nm;
    in.epsilon = static_cast<double>(angles) * rays * nm.sigma2;
    return in;
}

// 1. Measured SNR at the default noise level.
Gate criterion_noise() {
    const auto t0 = std::chrono::steady_clock::now();
    Gate g;
    const Geometry geom = make_geometry(120, 184, 128, 128);
    const Image truth = make_phantom(128);
    const Sinogram clean = forward_project(geom, truth);
    auto [noisy, nm] = add_noise(clean, 0.05, 7);
    double sig = 0.0, noise = 0.0;
    for (size_t i = 0; i < clean.v.size(); ++i) {
        sig += clean.v[i] * clean.v[i];
        const double d = noisy.v[i] - clean.v[i];
        noise += d * d;
    }
    const double snr = 10.0 * std::log10(sig / noise);
    g.note("SNR " + fmt(snr, "%.3f") + " dB");
    g.require(std::abs(snr - 26.02) <= 0.5, "outside 26.02 +/- 0.5 dB");
    const double secs = now_minus(t0);
    g.require(secs < 1.0, "took " + fmt(secs, "%.2f") + " s (budget 1 s)");
    return g;
}

// 2. Guaranteed termination above the least-squares floor, all superiorized
//    variants, with the floor from the dense oracle.
Gate criterion_termination() {
    const auto t0 = std::chrono::steady_clock::now();
    Gate g;
    const Instance in = make_instance(32, 32, 48, 0.05, 7);
    const ParallelProjector A(in.geom);
    const TheoryConstants tc = compute_constants(A, in.data);
    const double s2 = in.noise.sigma2;
    const std::vector<double> eps_list = {1.5 * tc.eps0 + s2, in.epsilon};
    g.note("eps0 " + fmt(tc.eps0) + ", eps {" + fmt(eps_list[0]) + ", " + fmt(eps_list[1]) + "}");
    g.require(eps_list[0] > tc.eps0 && eps_list[1] > tc.eps0,
              "an eps does not exceed eps0; instance unusable");

    const Image x0(32, 32, 0.0);
    for (const char* name : {"s-cg", "s-cg-2", "s-cg-cd", "s-pcg", "s-pcg-2"}) {
        for (const double eps : eps_list) {
            MethodParams p;
            p.max_iter = 2000;
            const SolveResult r = run_method(name, A, in.data, x0, p, eps, RunOptions{});
            const double f_out = half_squared_residual(A, r.x, in.data);
            g.require(r.reached_epsilon && f_out <= eps,
                      std::string(name) + " at eps " + fmt(eps) + ": reached=" +
                          (r.reached_epsilon ? "yes" : "no") + " f=" + fmt(f_out));
        }
    }
    const double secs = now_minus(t0);
    g.require(secs < 60.0, "took " + fmt(secs, "%.1f") + " s (budget 60 s)");
    return g;
}

// 3. Per-iteration decrease bounds under the proof-model perturbation size.
Gate criterion_bounds() {
    const auto t0 = std::chrono::steady_clock::now();
    Gate g;
    const Instance in = make_instance(16, 16, 24, 0.05, 7);
    const ParallelProjector A(in.geom);
    const TheoryConstants tc = compute_constants(A, in.data);
    const Image x0(16, 16, 0.0);
    const InstrumentedReport rep = run_s_cg_instrumented(A, in.data, x0, 0.0, tc.eta_l, 50);
    g.note("eta_l " + fmt(tc.eta_l) + ", " + std::to_string(rep.rows.size()) + " bound rows");
    g.require(rep.premise_ok, "premise broken: eta0 above eta_l");
    g.require(rep.run.records.size() == 51, "expected 50 iterations, got " +
                                                std::to_string(rep.run.records.size() - 1));
    g.require(rep.violations == 0, std::to_string(rep.violations) + " bound violations");
    double worst = std::numeric_limits<double>::infinity();
    for (const BoundRow& r : rep.rows) worst = std::min(worst, r.margin);
    g.note("worst margin " + fmt(worst, "%.3e"));
    const double secs = now_minus(t0);
    g.require(secs < 60.0, "took " + fmt(secs, "%.1f") + " s (budget 60 s)");
    return g;
}

// 4. Orthogonality and conjugacy identities across a perturbed desk run.
Gate criterion_identities() {
    Gate g;
    const Instance in = make_instance(128, 120, 184, 0.05, 7);
    const ParallelProjector A(in.geom);
    const Image x0(128, 128, 0.0);
    SolverConfig cfg;
    cfg.epsilon = 0.0; // unreachable: forces the full 50 iterations
    cfg.max_iter = 50;
    RunOptions opt;
    opt.check_identities = true;

    PerturbationSchedule sched;
    sched.gamma0 = default_gamma0("s-cg");
    const SolveResult a = run_s_cg(A, in.data, x0, cfg, sched, SmoothingParams{}, opt);
    g.require(a.records.size() == 51, "s-cg ran " + std::to_string(a.records.size() - 1) +
                                          " iterations, expected 50");
    g.require(a.max_orth <= 1e-8, "s-cg orthogonality residual " + fmt(a.max_orth, "%.3e"));
    g.require(a.max_conj <= 1e-8, "s-cg conjugacy residual " + fmt(a.max_conj, "%.3e"));

    sched = PerturbationSchedule{};
    sched.gamma0 = default_gamma0("s-pcg");
    const SolveResult b = run_s_pcg(A, in.data, x0, make_preconditioner(in.geom), cfg, sched,
                                    SmoothingParams{}, opt);
    g.require(b.records.size() == 51, "s-pcg ran " + std::to_string(b.records.size() - 1) +
                                          " iterations, expected 50");
    g.require(b.max_orth <= 1e-8, "s-pcg orthogonality residual " + fmt(b.max_orth, "%.3e"));
    g.require(b.max_conj <= 1e-8, "s-pcg conjugacy residual " + fmt(b.max_conj, "%.3e"));
    g.note("max residuals s-cg " + fmt(std::max(a.max_orth, a.max_conj), "%.2e") + ", s-pcg " +
           fmt(std::max(b.max_orth, b.max_conj), "%.2e"));
    return g;
}

// 5. gamma0 = 0 superiorized runs and identity-preconditioner PCG reproduce
//    the plain CG iterates on a well-conditioned dense instance.
Gate criterion_equivalence() {
    Gate g;
    const int n = 16;
    DenseMatrix D;
    D.rows = n;
    D.cols = n;
    D.a.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) D.a[static_cast<size_t>(i) * n + i] = 1.0 + i; // cond 16
    const DenseMap A(D);
    Sinogram y(1, n);
    for (int i = 0; i < n; ++i) y.v[i] = 1.0 + (i % 4);
    const Image x0(n, 1, 0.0);

    // Ten plain CG steps, recording every iterate.
    std::vector<std::vector<double>> cg_xs;
    CGState cs;
    cs.x = x0.v;
    {
        std::vector<double> r = A.apply(cs.x);
        for (int i = 0; i < n; ++i) r[i] -= y.v[i];
        cs.g = A.apply_adjoint(r);
    }
    cs.delta = inner_product(cs.g, cs.g);
    cs.p.resize(cs.g.size());
    for (size_t i = 0; i < cs.p.size(); ++i) cs.p[i] = -cs.g[i];
    const std::vector<double> p0 = cs.p;
    const std::vector<double> g0 = cs.g;
    for (int k = 0; k < 10; ++k) {
        cs = cg_step(A, cs);
        cg_xs.push_back(cs.x);
    }

    // Resilient PR chain from the same warm-up, no perturbations.
    {
        PRState st;
        st.x = cg_xs[0]; // warm-up step equals the first CG step exactly
        st.p = p0;
        st.h = A.apply_adjoint(A.apply(p0));
        double worst = 0.0;
        for (int k = 1; k < 10; ++k) {
            st = cg_pr_step(A, y, st.x, st);
            worst = std::max(worst, rel_l2(st.x, cg_xs[static_cast<size_t>(k)]));
        }
        g.require(worst <= 1e-8, "resilient chain drifts " + fmt(worst, "%.3e"));
        g.note("resilient drift " + fmt(worst, "%.2e"));
    }

    // Conjugate-descent chain, same warm-up.
    {
        CDState st;
        st.x = cg_xs[0];
        st.g = g0;
        st.p = p0;
        st.h = A.apply_adjoint(A.apply(p0));
        double worst = 0.0;
        for (int k = 1; k < 10; ++k) {
            st = cg_cd_step(A, y, st.x, st);
            worst = std::max(worst, rel_l2(st.x, cg_xs[static_cast<size_t>(k)]));
        }
        g.require(worst <= 1e-8, "conjugate-descent chain drifts " + fmt(worst, "%.3e"));
        g.note("cd drift " + fmt(worst, "%.2e"));
    }

    // Whole-run check through the public runners.
    {
        SolverConfig cfg;
        cfg.epsilon = 0.0;
        cfg.max_iter = 10;
        PerturbationSchedule sched;
        sched.gamma0 = 0.0;
        const SolveResult rc = run_cg(A, y, x0, cfg);
        const SolveResult rs = run_s_cg(A, y, x0, cfg, sched, SmoothingParams{});
        const SolveResult rd = run_s_cg_cd(A, y, x0, cfg, sched, SmoothingParams{});
        g.require(rc.records.size() == rs.records.size() &&
                      rc.records.size() == rd.records.size(),
                  "runner trace lengths differ");
        for (size_t i = 0; i < rc.records.size(); ++i) {
            const double f = rc.records[i].f;
            const double tol = 1e-8 * std::max(1.0, f);
            g.require(std::abs(rs.records[i].f - f) <= tol,
                      "s-cg f drifts at row " + std::to_string(i));
            g.require(std::abs(rd.records[i].f - f) <= tol,
                      "s-cg-cd f drifts at row " + std::to_string(i));
        }
    }

    // Identity-preconditioner PCG against plain CG, step by step.
    {
        const Preconditioner P = identity_preconditioner();
        PCGState st;
        st.x = x0.v;
        st.r = A.apply(st.x);
        for (int i = 0; i < n; ++i) st.r[i] -= y.v[i];
        st.g = A.apply_adjoint(st.r);
        st.z = apply_precond_residual(A, P, st.r);
        st.p.resize(st.z.size());
        for (size_t i = 0; i < st.p.size(); ++i) st.p[i] = -st.z[i];
        st.delta = inner_product(st.g, st.z);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            st = pcg_step(A, P, st);
            worst = std::max(worst, rel_l2(st.x, cg_xs[static_cast<size_t>(k)]));
        }
        g.require(worst <= 1e-8, "identity-preconditioner chain drifts " + fmt(worst, "%.3e"));
        g.note("pcg drift " + fmt(worst, "%.2e"));
    }
    return g;
}

// 6. Oracle equivalences for the projector, spectral norm, and TV pieces.
Gate criterion_oracles() {
    const auto t0 = std::chrono::steady_clock::now();
    Gate g;
    const Geometry geom = make_geometry(10, 12, 8, 8);
    const ParallelProjector A(geom);
    const DenseMatrix D = materialize_dense(A);

    // Deterministic non-trivial probe vectors.
    std::vector<double> x(64), yv(120);
    for (size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.7 * static_cast<double>(i) + 0.3);
    for (size_t i = 0; i < yv.size(); ++i) yv[i] = std::cos(0.4 * static_cast<double>(i) - 1.1);

    {
        const std::vector<double> ax = A.apply(x);
        double worst = 0.0;
        for (int r = 0; r < D.rows; ++r) {
            double dot = 0.0;
            for (int c = 0; c < D.cols; ++c) dot += D.a[static_cast<size_t>(r) * D.cols + c] * x[static_cast<size_t>(c)];
            worst = std::max(worst, std::abs(dot - ax[static_cast<size_t>(r)]));
        }
        const std::vector<double> aty = A.apply_adjoint(yv);
        for (int c = 0; c < D.cols; ++c) {
            double dot = 0.0;
            for (int r = 0; r < D.rows; ++r) dot += D.a[static_cast<size_t>(r) * D.cols + c] * yv[static_cast<size_t>(r)];
            worst = std::max(worst, std::abs(dot - aty[static_cast<size_t>(c)]));
        }
        g.require(worst <= 1e-12, "dense mismatch " + fmt(worst, "%.3e"));
    }
    {
        const std::vector<double> ax = A.apply(x);
        const std::vector<double> aty = A.apply_adjoint(yv);
        const double lhs = inner_product(ax, yv);
        const double rhs = inner_product(x, aty);
        const double rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
        g.require(rel <= 1e-10, "adjoint identity residual " + fmt(rel, "%.3e"));
    }
    {
        Eigen::MatrixXd M(D.rows, D.cols);
        for (int r = 0; r < D.rows; ++r)
            for (int c = 0; c < D.cols; ++c) M(r, c) = D.a[static_cast<size_t>(r) * D.cols + c];
        const Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
        const double exact = svd.singularValues()(0);
        const SpectralNormResult sn = spectral_norm(A, 20000, 1e-14, 42);
        g.require(std::abs(sn.value - exact) <= 1e-6,
                  "spectral norm " + fmt(sn.value, "%.9f") + " vs SVD " + fmt(exact, "%.9f"));
    }
    {
        // Integer-slope image: every gradient magnitude is an exact integer
        // (3-4-5 triples), so the enumeration total is exact in float64.
        Image img(9, 7);
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 9; ++j) img.at(i, j) = 3.0 * j + 4.0 * i;
        double oracle = 0.0;
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 9; ++j) {
                const double dh = j + 1 < 9 ? img.at(i, j + 1) - img.at(i, j) : 0.0;
                const double dv = i + 1 < 7 ? img.at(i + 1, j) - img.at(i, j) : 0.0;
                oracle += std::sqrt(dh * dh + dv * dv);
            }
        g.require(tv_norm(img) == oracle, "tv_norm " + fmt(tv_norm(img), "%.17g") +
                                              " != enumeration " + fmt(oracle, "%.17g"));
    }
    {
        Image img(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) img.at(i, j) = std::sin(1.3 * i) * std::cos(0.9 * j);
        SmoothingParams sp;
        sp.kappa = 1e-3;
        const Image grad = tv_smoothed_gradient(img, sp);
        const double h = 1e-6;
        double worst = 0.0;
        auto smoothed = [&](const Image& im) {
            double s = 0.0;
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) {
                    const double dh = j + 1 < 8 ? im.at(i, j + 1) - im.at(i, j) : 0.0;
                    const double dv = i + 1 < 8 ? im.at(i + 1, j) - im.at(i, j) : 0.0;
                    s += std::sqrt(dh * dh + dv * dv + sp.kappa * sp.kappa);
                }
            return s;
        };
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                Image up = img, dn = img;
                up.at(i, j) += h;
                dn.at(i, j) -= h;
                const double fd = (smoothed(up) - smoothed(dn)) / (2.0 * h);
                worst = std::max(worst, std::abs(fd - grad.at(i, j)));
            }
        g.require(worst <= 1e-5, "smoothed-gradient FD mismatch " + fmt(worst, "%.3e"));
    }
    {
        Image b(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                b.at(i, j) = (i < 4 ? 1.0 : 0.0) + 0.2 * std::sin(2.1 * i + 0.7 * j);
        const Image fast = tv_prox(b, 0.3, 2000);
        const Image slow = tv_prox(b, 0.3, 100000);
        double worst = 0.0;
        for (size_t i = 0; i < fast.v.size(); ++i)
            worst = std::max(worst, std::abs(fast.v[i] - slow.v[i]));
        g.require(worst <= 1e-4, "prox long-run mismatch " + fmt(worst, "%.3e"));
    }
    const double secs = now_minus(t0);
    g.require(secs < 30.0, "took " + fmt(secs, "%.1f") + " s (budget 30 s)");
    return g;
}

struct DeskRun {
    int iters = 0;
    double tv = 0.0;
    double rel = 0.0;
    double f_stop = 0.0;
    double f_last = 0.0;
    double f_post_max_dev = 0.0; // max |f - f_stop| / f_stop beyond the stop row
    bool reached = false;
    bool has_post = false;
};

DeskRun desk_run(const std::string& name, const ParallelProjector& A, const Instance& in,
                 const Image& x0) {
    MethodParams p;
    RunOptions opt;
    opt.ground_truth = &in.truth;
    opt.post_stop_fraction = 0.25;
    const SolveResult r = run_method(name, A, in.data, x0, p, in.epsilon, opt);
    DeskRun d;
    d.reached = r.reached_epsilon;
    d.iters = r.stop_k >= 0 ? r.stop_k : static_cast<int>(r.records.size()) - 1;
    d.tv = tv_norm(r.x);
    d.rel = rel_l2(r.x.v, in.truth.v);
    const size_t stop = r.stop_k >= 0 ? static_cast<size_t>(r.stop_k) : r.records.size() - 1;
    d.f_stop = r.records[stop].f;
    d.f_last = r.records.back().f;
    d.has_post = r.records.size() > stop + 1;
    for (size_t i = stop; i < r.records.size(); ++i)
        d.f_post_max_dev =
            std::max(d.f_post_max_dev, std::abs(r.records[i].f - d.f_stop) / d.f_stop);
    return d;
}

const std::vector<std::string> kSuperiorized = {"s-cg-2", "s-cg", "s-cg-cd", "s-pcg-2", "s-pcg"};

// Shared desk-scale seed sweep backing the ordering and post-stop gates.
std::map<uint64_t, std::map<std::string, DeskRun>> desk_sweep() {
    std::map<uint64_t, std::map<std::string, DeskRun>> out;
    for (uint64_t seed = 7; seed <= 11; ++seed) {
        const Instance in = make_instance(128, 120, 184, 0.05, seed);
        const ParallelProjector A(in.geom);
        const Image x0(128, 128, 0.0);
        std::map<std::string, DeskRun> runs;
        runs["cg"] = desk_run("cg", A, in, x0);
        runs["fista"] = desk_run("fista", A, in, x0);
        for (const std::string& m : kSuperiorized) runs[m] = desk_run(m, A, in, x0);
        out[seed] = std::move(runs);
    }
    return out;
}

// 7. Cross-method orderings at desk scale, majority over five seeds.
Gate criterion_orderings(const std::map<uint64_t, std::map<std::string, DeskRun>>& sweep,
                         double sweep_secs) {
    Gate g;
    int rel_ok = 0, fewest_ok = 0;
    std::map<std::string, int> tv_ok;
    const int total = static_cast<int>(sweep.size());
    for (const auto& [seed, runs] : sweep) {
        const DeskRun& cg = runs.at("cg");
        if (runs.at("s-cg-cd").rel < cg.rel) ++rel_ok;
        for (const std::string& m : kSuperiorized)
            if (runs.at(m).tv < cg.tv) ++tv_ok[m];
        const DeskRun& pcg2 = runs.at("s-pcg-2");
        bool fewest = pcg2.iters < runs.at("fista").iters;
        for (const std::string& m : kSuperiorized)
            if (m != "s-pcg-2" && pcg2.iters >= runs.at(m).iters) fewest = false;
        if (fewest) ++fewest_ok;
        for (const auto& [name, d] : runs)
            g.require(d.reached, name + " missed eps at seed " + std::to_string(seed));
    }
    g.note("rel_err ordering " + std::to_string(rel_ok) + "/" + std::to_string(total) +
           ", fewest-iterations " + std::to_string(fewest_ok) + "/" + std::to_string(total));
    g.require(2 * rel_ok > total, "s-cg-cd rel_err below cg only " + std::to_string(rel_ok) +
                                      "/" + std::to_string(total));
    for (const std::string& m : kSuperiorized)
        g.require(2 * tv_ok[m] > total, m + " stop TV below cg only " +
                                            std::to_string(tv_ok[m]) + "/" +
                                            std::to_string(total));
    g.require(2 * fewest_ok > total,
              "s-pcg-2 fewest iterations only " + std::to_string(fewest_ok) + "/" +
                  std::to_string(total));
    g.require(sweep_secs < 600.0,
              "sweep took " + fmt(sweep_secs, "%.0f") + " s (budget 600 s)");
    return g;
}

// 8. Post-stop behavior: superiorized f keeps falling, FISTA's f stays put.
Gate criterion_post_stop(const std::map<uint64_t, std::map<std::string, DeskRun>>& sweep) {
    Gate g;
    const int total = static_cast<int>(sweep.size());
    std::map<std::string, int> fall_ok;
    int flat_ok = 0;
    for (const auto& [seed, runs] : sweep) {
        for (const std::string& m : kSuperiorized) {
            const DeskRun& d = runs.at(m);
            if (d.has_post && d.f_last < d.f_stop) ++fall_ok[m];
        }
        if (runs.at("fista").f_post_max_dev <= 0.05) ++flat_ok;
    }
    for (const std::string& m : kSuperiorized)
        g.require(2 * fall_ok[m] > total, m + " f kept falling only " +
                                              std::to_string(fall_ok[m]) + "/" +
                                              std::to_string(total));
    g.require(2 * flat_ok > total, "fista f within 5% of stop only " +
                                       std::to_string(flat_ok) + "/" + std::to_string(total));
    g.note("fista flat " + std::to_string(flat_ok) + "/" + std::to_string(total));
    return g;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Blanks column 2 (the wall-clock field) of every CSV row.
std::string strip_time_column(const std::string& csv) {
    std::string out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        std::string rebuilt;
        int col = 0;
        size_t pos = 0;
        while (pos <= line.size()) {
            size_t c = line.find(',', pos);
            if (c == std::string::npos) c = line.size();
            if (!rebuilt.empty()) rebuilt += ',';
            rebuilt += col == 2 ? std::string("_") : line.substr(pos, c - pos);
            ++col;
            pos = c + 1;
        }
        out += rebuilt + '\n';
    }
    return out;
}

// 9. Determinism of the bench outputs for a fixed config and seed.
Gate criterion_determinism() {
    Gate g;
    namespace fs = std::filesystem;
    ExperimentConfig cfg;
    cfg.size = 32;
    cfg.angles = 32;
    cfg.rays = 48;
    cfg.noise = 0.05;
    cfg.seed = 7;
    cfg.post_stop_fraction = 0.25;
    cfg.methods = {{"cg", {}}, {"s-cg", {}}, {"s-pcg-2", {}}, {"fista", {}}};

    const fs::path base = fs::temp_directory_path() / "tvscg_acceptance";
    fs::remove_all(base);
    const fs::path d1 = base / "run1", d2 = base / "run2";
    cfg.out_dir = d1.string();
    write_bench_outputs(cfg, run_bench(cfg));
    cfg.out_dir = d2.string();
    write_bench_outputs(cfg, run_bench(cfg));

    for (const char* f : {"metrics.csv", "summary.csv"}) {
        const std::string a = strip_time_column(read_file(d1 / f));
        const std::string b = strip_time_column(read_file(d2 / f));
        g.require(!a.empty() && a == b, std::string(f) + " differs between reruns");
    }
    for (const char* f : {"truth.img1", "data.sgm1", "cg.img1", "s-cg.img1", "s-pcg-2.img1",
                          "fista.img1"}) {
        const std::string a = read_file(d1 / f);
        const std::string b = read_file(d2 / f);
        g.require(!a.empty() && a == b, std::string(f) + " differs between reruns");
    }
    fs::remove_all(base);
    return g;
}

int run_gate(int id, const char* label, const std::function<Gate()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Gate g;
    try {
        g = fn();
    } catch (const std::exception& e) {
        g.pass = false;
        g.note(std::string("exception: ") + e.what());
    }
    std::printf("[%s] %d. %s%s%s (%.1f s)\n", g.pass ? "PASS" : "FAIL", id, label,
                g.detail.empty() ? "" : ": ", g.detail.c_str(), now_minus(t0));
    std::fflush(stdout);
    return g.pass ? 0 : 1;
}

} // namespace

int main() {
    int failures = 0;
    failures += run_gate(1, "noise calibration", criterion_noise);
    failures += run_gate(2, "guaranteed termination", criterion_termination);
    failures += run_gate(3, "decrease bounds", criterion_bounds);
    failures += run_gate(4, "structural identities", criterion_identities);
    failures += run_gate(5, "unperturbed equivalence", criterion_equivalence);
    failures += run_gate(6, "oracle equivalence", criterion_oracles);

    std::map<uint64_t, std::map<std::string, DeskRun>> sweep;
    const auto sweep_t0 = std::chrono::steady_clock::now();
    try {
        sweep = desk_sweep();
    } catch (const std::exception& e) {
        std::printf("[FAIL] 7. desk orderings: sweep exception: %s (0.0 s)\n", e.what());
        std::printf("[FAIL] 8. post-stop behavior: sweep exception: %s (0.0 s)\n", e.what());
        std::printf("%d criteria failed\n", failures + 2);
        return failures + 2;
    }
    const double sweep_secs = now_minus(sweep_t0);
    failures +=
        run_gate(7, "desk orderings", [&] { return criterion_orderings(sweep, sweep_secs); });
    failures += run_gate(8, "post-stop behavior", [&] { return criterion_post_stop(sweep); });
    failures += run_gate(9, "determinism", criterion_determinism);

    if (failures == 0)
        std::printf("all 9 criteria passed\n");
    else
        std::printf("%d criteria failed\n", failures);
    return failures;
}
