#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tvscg/bench.hpp"
#include "tvscg/io.hpp"
#include "tvscg/pcg.hpp"
#include "tvscg/projector.hpp"
#include "tvscg/theory.hpp"
#include "tvscg/tv.hpp"

namespace {

constexpr int kExitError = 1;   // I/O or solver failure
constexpr int kExitUsage = 2;   // bad arguments
constexpr int kExitFlagged = 3; // reconstruct hit max_iter without reaching eps

std::string g17(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw tvscg::IoError("cannot open: " + path);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
    std::fclose(f);
    return out;
}

int cmd_phantom(int size, const std::string& out, const std::string& pgm) {
    const tvscg::Image img = tvscg::make_phantom(size);
    tvscg::write_img1(out, img);
    if (!pgm.empty()) tvscg::write_pgm16(pgm, img);
    std::printf("phantom %dx%d -> %s\n", img.width, img.height, out.c_str());
    return 0;
}

int cmd_project(const std::string& phantom_path, int angles, int rays, double noise,
                uint64_t seed, const std::string& out) {
    const tvscg::Image img = tvscg::read_img1(phantom_path);
    const tvscg::Geometry geom = tvscg::make_geometry(angles, rays, img.width, img.height);
    const tvscg::Sinogram clean = tvscg::forward_project(geom, img);
    auto [noisy, nm] = tvscg::add_noise(clean, noise, seed);
    tvscg::SinogramMeta meta;
    meta.sigma2 = nm.sigma2;
    meta.seed = seed;
    meta.n_angles = angles;
    meta.n_rays = rays;
    meta.image_width = img.width;
    meta.image_height = img.height;
    tvscg::write_sgm1(out, noisy, meta);
    double p = 0.0;
    for (double v : clean.v) p += v * v;
    p /= static_cast<double>(clean.v.size());
    const double snr_db = 10.0 * std::log10(p / nm.sigma2);
    std::printf("sinogram %dx%d -> %s (sigma2=%s, SNR=%.2f dB)\n", angles, rays, out.c_str(),
                g17(nm.sigma2).c_str(), snr_db);
    return 0;
}

int cmd_reconstruct(const std::string& sino_path, const std::string& method,
                    const std::string& eps_text, tvscg::MethodParams params, int K,
                    double post_stop, const std::string& truth_path, const std::string& out,
                    std::string csv_path) {
    if (!tvscg::known_method(method)) {
        std::fprintf(stderr, "unknown method '%s'\n", method.c_str());
        return kExitUsage;
    }
    if (K > 0 && method != "s-cg-" + std::to_string(K) && method != "s-pcg-" + std::to_string(K)) {
        std::fprintf(stderr, "--K %d conflicts with method '%s' (K is part of the name)\n", K,
                     method.c_str());
        return kExitUsage;
    }
    const tvscg::Sinogram y = tvscg::read_sgm1(sino_path);
    const tvscg::SinogramMeta meta = tvscg::read_sinogram_meta(sino_path);
    const tvscg::Geometry geom =
        tvscg::make_geometry(y.n_angles, y.n_rays, meta.image_width, meta.image_height);
    const tvscg::ParallelProjector A(geom);

    double eps = 0.0;
    if (eps_text == "auto") {
        eps = static_cast<double>(y.size()) * meta.sigma2;
    } else {
        try {
            eps = std::stod(eps_text);
        } catch (const std::logic_error&) {
            std::fprintf(stderr, "--eps expects 'auto' or a number, got '%s'\n", eps_text.c_str());
            return kExitUsage;
        }
        if (eps < 0.0) {
            std::fprintf(stderr, "--eps must be >= 0\n");
            return kExitUsage;
        }
    }

    tvscg::Image truth;
    tvscg::RunOptions opt;
    opt.post_stop_fraction = post_stop;
    if (!truth_path.empty()) {
        truth = tvscg::read_img1(truth_path);
        opt.ground_truth = &truth;
    }

    const tvscg::Image x0(meta.image_width, meta.image_height, 0.0);
    const tvscg::SolveResult res = tvscg::run_method(method, A, y, x0, params, eps, opt);

    tvscg::write_img1(out, res.x);
    if (csv_path.empty()) {
        csv_path = out;
        const size_t dot = csv_path.find_last_of('.');
        if (dot != std::string::npos) csv_path.resize(dot);
        csv_path += ".csv";
    }
    std::vector<tvscg::MetricsRow> rows;
    for (const tvscg::IterationRecord& rec : res.records) rows.push_back({method, rec});
    tvscg::write_text(csv_path, tvscg::metrics_csv(rows));

    const double f_out = tvscg::half_squared_residual(A, res.x, y);
    if (res.reached_epsilon) {
        std::printf("%s reached eps=%s at k=%d (f=%s) -> %s\n", method.c_str(), g17(eps).c_str(),
                    res.stop_k, g17(f_out).c_str(), out.c_str());
        return 0;
    }
    std::printf("%s hit max_iter=%d without reaching eps=%s (f=%s) -> %s\n", method.c_str(),
                params.max_iter, g17(eps).c_str(), g17(f_out).c_str(), out.c_str());
    return kExitFlagged;
}

int cmd_bench(const std::string& config_path, const std::string& out_override,
              int64_t seed_override) {
    tvscg::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = tvscg::parse_config(read_file(config_path));
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);

    const tvscg::BenchOutput out = tvscg::run_bench(cfg);
    tvscg::write_bench_outputs(cfg, out);

    // Mirror summary.csv: the final_* columns describe each written image.
    const tvscg::ParallelProjector A(out.geom);
    std::printf("%-10s %8s %12s %14s %14s %12s\n", "method", "stop_k", "stop_time_s", "final_f",
                "final_tv", "final_rel_err");
    for (const tvscg::MethodRun& run : out.runs) {
        const tvscg::SolveResult& r = run.result;
        const tvscg::IterationRecord& rec =
            r.stop_k >= 0 ? r.records[static_cast<size_t>(r.stop_k)] : r.records.back();
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < r.x.v.size(); ++i) {
            const double d = r.x.v[i] - out.truth.v[i];
            num += d * d;
            den += out.truth.v[i] * out.truth.v[i];
        }
        std::printf("%-10s %8d %12.6f %14.6g %14.6g %12.4g\n", run.name.c_str(), r.stop_k,
                    rec.time_s, tvscg::half_squared_residual(A, r.x, out.data),
                    tvscg::tv_norm(r.x), den > 0.0 ? std::sqrt(num / den) : std::nan(""));
    }
    std::printf("outputs in %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_check_theory(int size, int angles, int rays, double noise, uint64_t seed, double eta0,
                     int bound_iters, int term_max_iter, const std::string& eps_text,
                     const std::string& out) {
    if (angles <= 0) angles = size;
    if (rays <= 0) rays = size + size / 2;
    const tvscg::Image truth = tvscg::make_phantom(size);
    const tvscg::Geometry geom = tvscg::make_geometry(angles, rays, size, size);
    const tvscg::ParallelProjector A(geom);
    const tvscg::Sinogram clean = tvscg::forward_project(geom, truth);
    auto [y, nm] = tvscg::add_noise(clean, noise, seed);
    const tvscg::Image x0(size, size, 0.0);

    // A negative eta0 flag means "use eta_l", which needs the constants first.
    if (eta0 < 0.0) eta0 = tvscg::compute_constants(A, y).eta_l;
    // Bound suite: epsilon 0 so the run never stops short of bound_iters steps.
    const tvscg::InstrumentedReport rep =
        tvscg::run_s_cg_instrumented(A, y, x0, 0.0, eta0, bound_iters + 1);

    const tvscg::TheoryConstants& tc = rep.constants;
    std::printf("c=%s eta1=%s eta2=%s eta_l=%s eps0=%s theta_hint=%s\n", g17(tc.c).c_str(),
                g17(tc.eta1).c_str(), g17(tc.eta2).c_str(), g17(tc.eta_l).c_str(),
                g17(tc.eps0).c_str(), g17(tc.theta_hint).c_str());
    std::printf("bound rows: %zu, violations: %d, premise %s\n", rep.rows.size(), rep.violations,
                rep.premise_ok ? "holds" : "broken (eta0 > eta_l: violations not asserted)");

    std::string csv = "k,which,lhs,rhs,margin,pass\n";
    for (const tvscg::BoundRow& r : rep.rows)
        csv += std::to_string(r.k) + ',' + std::to_string(r.which) + ',' + g17(r.lhs) + ',' +
               g17(r.rhs) + ',' + g17(r.margin) + ',' + (r.pass ? "1" : "0") + '\n';
    tvscg::write_text(out, csv);

    std::vector<double> eps_list;
    if (eps_text == "auto") {
        eps_list.push_back(1.5 * tc.eps0 + nm.sigma2);
        eps_list.push_back(static_cast<double>(y.size()) * nm.sigma2);
        if (tc.eps0 > 0.0) eps_list.push_back(0.5 * tc.eps0);
    } else {
        eps_list.push_back(std::stod(eps_text));
    }
    const std::vector<tvscg::TerminationRow> term =
        tvscg::check_termination(A, y, x0, eps_list, term_max_iter);
    bool guarantee_broken = rep.premise_ok && rep.violations > 0;
    for (const tvscg::TerminationRow& row : term) {
        std::printf("eps=%s expected_terminate=%d terminated=%d f_ok=%d iterations=%d\n",
                    g17(row.epsilon).c_str(), row.expected_terminate ? 1 : 0,
                    row.terminated ? 1 : 0, row.f_ok ? 1 : 0, row.iterations);
        if (row.expected_terminate && (!row.terminated || !row.f_ok)) guarantee_broken = true;
    }
    std::printf("%s\n", guarantee_broken ? "FAIL" : "OK");
    return guarantee_broken ? kExitError : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TV-superiorized conjugate-gradient tomography toolkit"};
    app.require_subcommand(1);

    // phantom
    auto* sc_phantom = app.add_subcommand("phantom", "Write a head phantom image");
    int ph_size = 128;
    std::string ph_out, ph_pgm;
    sc_phantom->add_option("--size", ph_size, "Image side length (>= 8)");
    sc_phantom->add_option("--out", ph_out, "Output .img1 path")->required();
    sc_phantom->add_option("--pgm", ph_pgm, "Also write a 16-bit PGM preview");

    // project
    auto* sc_project = app.add_subcommand("project", "Forward-project an image and add noise");
    std::string pj_in, pj_out;
    int pj_angles = 120, pj_rays = 184;
    double pj_noise = 0.05;
    uint64_t pj_seed = 7;
    sc_project->add_option("phantom", pj_in, "Input .img1 image")->required();
    sc_project->add_option("--angles", pj_angles, "Projection angles over [0, pi)");
    sc_project->add_option("--rays", pj_rays, "Rays per angle");
    sc_project->add_option("--noise", pj_noise, "Noise level as a fraction of rms(y); must be > 0")
        ->check(CLI::PositiveNumber);
    sc_project->add_option("--seed", pj_seed, "Noise seed");
    sc_project->add_option("--out", pj_out, "Output .sgm1 path (sidecar .meta written too)")
        ->required();

    // reconstruct
    auto* sc_rec = app.add_subcommand("reconstruct", "Run one solver on a sinogram");
    std::string rc_in, rc_method, rc_eps = "auto", rc_out, rc_csv, rc_truth;
    tvscg::MethodParams rc_params;
    int rc_K = 0;
    double rc_post_stop = 0.0;
    sc_rec->add_option("sinogram", rc_in, "Input .sgm1 (with .meta sidecar)")->required();
    sc_rec->add_option("--method", rc_method,
                       "cg | pcg | fbp | ista | fista | s-cg | s-cg-cd | s-pcg | "
                       "s-cg-<K> | s-pcg-<K>")
        ->required();
    sc_rec->add_option("--eps", rc_eps, "Stopping level: auto (= L*sigma2) or a number");
    sc_rec->add_option("--gamma0", rc_params.gamma0, "Initial perturbation step (superiorized)");
    sc_rec->add_option("--a", rc_params.a, "Perturbation decay factor in (0,1)");
    sc_rec->add_option("--kappa", rc_params.kappa, "TV smoothing floor");
    sc_rec->add_option("--K", rc_K, "Inner steps for the restarted variants (part of the name)");
    sc_rec->add_option("--mu", rc_params.mu, "Preconditioner filter offset");
    sc_rec->add_option("--lambda", rc_params.lambda, "TV weight for ista/fista");
    sc_rec->add_option("--max-iter", rc_params.max_iter, "Outer iteration cap");
    sc_rec->add_option("--post-stop", rc_post_stop, "Extra fraction of iterations after the stop");
    sc_rec->add_option("--truth", rc_truth, "Ground-truth .img1 enabling rel_err in the CSV");
    sc_rec->add_option("--out", rc_out, "Output .img1 path")->required();
    sc_rec->add_option("--csv", rc_csv, "Metrics CSV path (default: out with .csv)");

    // bench
    auto* sc_bench = app.add_subcommand("bench", "Run the configured method comparison");
    std::string bn_config, bn_out;
    int64_t bn_seed = -1;
    sc_bench->add_option("config", bn_config, "key=value config file (default desk experiment)");
    sc_bench->add_option("--out", bn_out, "Output directory (overrides config out_dir)");
    sc_bench->add_option("--seed", bn_seed, "Noise seed (overrides config)");

    // check-theory
    auto* sc_theory = app.add_subcommand("check-theory", "Verify the convergence-guarantee bounds");
    int th_size = 16, th_angles = 0, th_rays = 0, th_bound_iters = 50, th_max_iter = 2000;
    double th_noise = 0.05, th_eta0 = -1.0;
    uint64_t th_seed = 7;
    std::string th_eps = "auto", th_out = "theory.csv";
    sc_theory->add_option("--size", th_size, "Image side length (8..32)")
        ->check(CLI::Range(8, 32));
    sc_theory->add_option("--angles", th_angles, "Projection angles (default: size)");
    sc_theory->add_option("--rays", th_rays, "Rays per angle (default: 1.5*size)");
    sc_theory->add_option("--noise", th_noise, "Noise level")->check(CLI::PositiveNumber);
    sc_theory->add_option("--seed", th_seed, "Noise seed");
    sc_theory->add_option("--eta0", th_eta0, "Perturbation coefficient (default: eta_l)");
    sc_theory->add_option("--iters", th_bound_iters, "Bound-checked iterations");
    sc_theory->add_option("--max-iter", th_max_iter, "Cap for the termination runs");
    sc_theory->add_option("--eps", th_eps, "Termination level: auto (sweep) or a number");
    sc_theory->add_option("--out", th_out, "Bound-row CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_phantom->parsed()) return cmd_phantom(ph_size, ph_out, ph_pgm);
        if (sc_project->parsed())
            return cmd_project(pj_in, pj_angles, pj_rays, pj_noise, pj_seed, pj_out);
        if (sc_rec->parsed())
            return cmd_reconstruct(rc_in, rc_method, rc_eps, rc_params, rc_K, rc_post_stop,
                                   rc_truth, rc_out, rc_csv);
        if (sc_bench->parsed()) return cmd_bench(bn_config, bn_out, bn_seed);
        if (sc_theory->parsed())
            return cmd_check_theory(th_size, th_angles, th_rays, th_noise, th_seed, th_eta0,
                                    th_bound_iters, th_max_iter, th_eps, th_out);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return 0;
}
