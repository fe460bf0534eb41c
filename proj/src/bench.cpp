#include "tvscg/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <utility>

#include "run_support.hpp"
#include "tvscg/cg.hpp"
#include "tvscg/fista.hpp"
#include "tvscg/io.hpp"
#include "tvscg/pcg.hpp"
#include "tvscg/tv.hpp"

namespace tvscg {

namespace {

// K for names of the shape <family>-<digits>, 0 otherwise.
int k_suffix(const std::string& name, const std::string& family) {
    if (name.size() <= family.size() + 1) return 0;
    if (name.compare(0, family.size(), family) != 0 || name[family.size()] != '-') return 0;
    const std::string tail = name.substr(family.size() + 1);
    if (tail.size() > 3 || tail.find_first_not_of("0123456789") != std::string::npos) return 0;
    return std::stoi(tail);
}

std::string trim(const std::string& s) {
    const size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_line(int line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double parse_num(const std::string& v, int line) {
    try {
        size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) bad_line(line, "trailing junk in number '" + v + "'");
        return d;
    } catch (const std::logic_error&) {
        bad_line(line, "bad number '" + v + "'");
    }
}

int parse_int(const std::string& v, int line) {
    const double d = parse_num(v, line);
    if (d != std::floor(d) || std::abs(d) > 1e9) bad_line(line, "expected integer, got '" + v + "'");
    return static_cast<int>(d);
}

// Keys meaningful both globally (defaults) and inside [method.*] sections.
bool apply_method_key(MethodParams& p, const std::string& key, const std::string& value,
                      int line) {
    if (key == "gamma0") {
        p.gamma0 = parse_num(value, line);
    } else if (key == "a") {
        p.a = parse_num(value, line);
        if (!(p.a > 0.0 && p.a < 1.0)) bad_line(line, "a must be in (0,1)");
    } else if (key == "kappa") {
        p.kappa = parse_num(value, line);
        if (!(p.kappa > 0.0)) bad_line(line, "kappa must be > 0");
    } else if (key == "mu") {
        p.mu = parse_num(value, line);
        if (p.mu < 0.0) bad_line(line, "mu must be >= 0");
    } else if (key == "lambda") {
        p.lambda = parse_num(value, line);
        if (p.lambda < 0.0) bad_line(line, "lambda must be >= 0");
    } else if (key == "eps") {
        if (value == "auto") {
            p.epsilon = -1.0;
        } else {
            p.epsilon = parse_num(value, line);
            if (p.epsilon < 0.0) bad_line(line, "eps must be >= 0 or auto");
        }
    } else if (key == "max_iter") {
        p.max_iter = parse_int(value, line);
        if (p.max_iter < 1) bad_line(line, "max_iter must be >= 1");
    } else if (key == "inner_iters") {
        p.inner_iters = parse_int(value, line);
        if (p.inner_iters < 1) bad_line(line, "inner_iters must be >= 1");
    } else {
        return false;
    }
    return true;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t c = s.find(',', pos);
        if (c == std::string::npos) c = s.size();
        const std::string item = trim(s.substr(pos, c - pos));
        if (!item.empty()) out.push_back(item);
        pos = c + 1;
    }
    return out;
}

} // namespace

std::vector<std::string> default_method_list() {
    return {"cg", "s-cg-2", "s-cg", "s-cg-cd", "s-pcg-2", "s-pcg", "fista"};
}

bool known_method(const std::string& name) {
    if (name == "cg" || name == "pcg" || name == "fbp" || name == "ista" || name == "fista" ||
        name == "s-cg" || name == "s-cg-cd" || name == "s-pcg")
        return true;
    return k_suffix(name, "s-cg") > 0 || k_suffix(name, "s-pcg") > 0;
}

double default_gamma0(const std::string& method) {
    // Desk-scale grid picks, regenerated by tools/tune_defaults.sh.
    if (method == "s-cg") return 1.0;
    if (method == "s-cg-cd") return 1.0;
    if (method == "s-pcg") return 2.0;
    if (k_suffix(method, "s-cg") > 0) return 2.0;
    if (k_suffix(method, "s-pcg") > 0) return 2.0;
    return 1.0;
}

double default_lambda() { return 55.0; }

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<std::string> listed;   // from methods=
    bool have_list = false;
    int list_line = 0;
    MethodParams* current = &cfg.base; // base until the first section
    bool in_section = false;

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        if (line.front() == '[') {
            if (line.back() != ']') bad_line(line_no, "unterminated section header");
            const std::string inner = trim(line.substr(1, line.size() - 2));
            if (inner.rfind("method.", 0) != 0)
                bad_line(line_no, "expected [method.<name>], got [" + inner + "]");
            const std::string name = trim(inner.substr(7));
            if (!known_method(name)) bad_line(line_no, "unknown method '" + name + "'");
            MethodEntry* entry = nullptr;
            for (MethodEntry& e : cfg.methods)
                if (e.name == name) entry = &e;
            if (!entry) {
                cfg.methods.push_back({name, cfg.base});
                entry = &cfg.methods.back();
            }
            current = &entry->params;
            in_section = true;
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos) bad_line(line_no, "expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) bad_line(line_no, "empty key");

        if (apply_method_key(*current, key, value, line_no)) continue;
        if (in_section) bad_line(line_no, "key '" + key + "' not allowed in a method section");

        if (key == "size") {
            cfg.size = parse_int(value, line_no);
        } else if (key == "angles") {
            cfg.angles = parse_int(value, line_no);
        } else if (key == "rays") {
            cfg.rays = parse_int(value, line_no);
        } else if (key == "noise") {
            cfg.noise = parse_num(value, line_no);
            if (cfg.noise < 0.0) bad_line(line_no, "noise must be >= 0");
        } else if (key == "seed") {
            const double d = parse_num(value, line_no);
            if (d < 0.0 || d != std::floor(d)) bad_line(line_no, "seed must be a nonnegative integer");
            cfg.seed = static_cast<uint64_t>(d);
        } else if (key == "post_stop_fraction") {
            cfg.post_stop_fraction = parse_num(value, line_no);
            if (cfg.post_stop_fraction < 0.0) bad_line(line_no, "post_stop_fraction must be >= 0");
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else if (key == "methods") {
            listed = split_csv(value);
            have_list = true;
            list_line = line_no;
            if (listed.empty()) bad_line(line_no, "methods list is empty");
            for (const std::string& m : listed)
                if (!known_method(m)) bad_line(line_no, "unknown method '" + m + "'");
        } else {
            bad_line(line_no, "unknown key '" + key + "'");
        }
    }

    if (have_list) {
        // methods= fixes the order; sections only override parameters.
        for (const MethodEntry& e : cfg.methods) {
            bool found = false;
            for (const std::string& m : listed)
                if (m == e.name) found = true;
            if (!found)
                bad_line(list_line, "section [method." + e.name + "] not in methods list");
        }
        std::vector<MethodEntry> ordered;
        for (const std::string& m : listed) {
            MethodParams p = cfg.base;
            for (const MethodEntry& e : cfg.methods)
                if (e.name == m) p = e.params;
            ordered.push_back({m, p});
        }
        cfg.methods = std::move(ordered);
    }
    return cfg;
}

SolveResult run_method(const std::string& name, const ParallelProjector& A, const Sinogram& y,
                       const Image& x0, const MethodParams& p, double epsilon,
                       const RunOptions& opt) {
    SolverConfig scfg;
    scfg.epsilon = epsilon;
    scfg.max_iter = p.max_iter;
    PerturbationSchedule sched;
    sched.gamma0 = p.gamma0 < 0.0 ? default_gamma0(name) : p.gamma0;
    sched.a = p.a;
    SmoothingParams sp;
    sp.kappa = p.kappa;

    if (name == "cg") return run_cg(A, y, x0, scfg, opt);
    if (name == "pcg")
        return run_pcg(A, y, x0, make_preconditioner(A.geometry(), p.mu), scfg, opt);
    if (name == "fbp") {
        const auto t0 = std::chrono::steady_clock::now();
        SolveResult r;
        r.x = fbp_reconstruct(A.geometry(), y);
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double f = half_squared_residual(A, r.x, y);
        r.records.push_back({0, dt, f, tv_norm(r.x), detail::rel_err_vs(opt.ground_truth, r.x)});
        r.f_tested.push_back(f);
        r.reached_epsilon = f <= epsilon;
        r.stop_k = r.reached_epsilon ? 0 : -1;
        return r;
    }
    if (name == "ista" || name == "fista") {
        ProxConfig pc;
        pc.lambda = p.lambda < 0.0 ? default_lambda() : p.lambda;
        pc.inner_iters = p.inner_iters;
        return name == "ista" ? run_ista(A, y, x0, pc, scfg, opt)
                              : run_fista(A, y, x0, pc, scfg, opt);
    }
    if (name == "s-cg") return run_s_cg(A, y, x0, scfg, sched, sp, opt);
    if (name == "s-cg-cd") return run_s_cg_cd(A, y, x0, scfg, sched, sp, opt);
    if (name == "s-pcg")
        return run_s_pcg(A, y, x0, make_preconditioner(A.geometry(), p.mu), scfg, sched, sp, opt);
    if (const int K = k_suffix(name, "s-cg"); K > 0) {
        scfg.K = K;
        return run_s_cg_k(A, y, x0, scfg, sched, sp, opt);
    }
    if (const int K = k_suffix(name, "s-pcg"); K > 0) {
        scfg.K = K;
        return run_s_pcg_k(A, y, x0, make_preconditioner(A.geometry(), p.mu), scfg, sched, sp,
                           opt);
    }
    throw std::invalid_argument("unknown method: " + name);
}

BenchOutput run_bench(const ExperimentConfig& cfg) {
    if (cfg.size < 8) throw std::invalid_argument("bench: size must be >= 8");
    if (cfg.angles < 1 || cfg.rays < 1)
        throw std::invalid_argument("bench: angles and rays must be >= 1");
    if (cfg.noise < 0.0) throw std::invalid_argument("bench: noise must be >= 0");

    BenchOutput out;
    out.geom = make_geometry(cfg.angles, cfg.rays, cfg.size, cfg.size);
    out.truth = make_phantom(cfg.size);
    const ParallelProjector A(out.geom);
    const Sinogram clean = forward_project(out.geom, out.truth);
    auto [noisy, nm] = add_noise(clean, cfg.noise, cfg.seed);
    out.data = std::move(noisy);
    out.noise = nm;

    std::vector<MethodEntry> methods = cfg.methods;
    if (methods.empty())
        for (const std::string& m : default_method_list()) methods.push_back({m, cfg.base});

    const double L = static_cast<double>(out.geom.n_angles) * out.geom.n_rays;
    const Image x0(cfg.size, cfg.size, 0.0);
    for (const MethodEntry& e : methods) {
        double eps = e.params.epsilon;
        if (eps < 0.0) {
            if (nm.sigma2 <= 0.0)
                throw std::invalid_argument("bench: eps auto requires noise > 0");
            eps = L * nm.sigma2;
        }
        RunOptions opt;
        opt.ground_truth = &out.truth;
        opt.post_stop_fraction = cfg.post_stop_fraction;
        MethodRun mr;
        mr.name = e.name;
        mr.epsilon = eps;
        mr.result = run_method(e.name, A, out.data, x0, e.params, eps, opt);
        out.runs.push_back(std::move(mr));
    }
    return out;
}

void write_bench_outputs(const ExperimentConfig& cfg, const BenchOutput& out) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string dir = cfg.out_dir + "/";

    write_img1(dir + "truth.img1", out.truth);
    SinogramMeta meta;
    meta.sigma2 = out.noise.sigma2;
    meta.seed = out.noise.seed;
    meta.n_angles = out.data.n_angles;
    meta.n_rays = out.data.n_rays;
    meta.image_width = out.truth.width;
    meta.image_height = out.truth.height;
    write_sgm1(dir + "data.sgm1", out.data, meta);

    std::vector<MetricsRow> rows;
    for (const MethodRun& run : out.runs)
        for (const IterationRecord& rec : run.result.records) rows.push_back({run.name, rec});
    write_text(dir + "metrics.csv", metrics_csv(rows));

    auto g17 = [](double x) {
        if (std::isnan(x)) return std::string("nan");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    // The final_* columns describe the reconstruction written next to the
    // table, which for superiorized runs is the perturbed point that passed
    // the stopping test, not the trace row logged after the following step.
    const ParallelProjector A(out.geom);
    std::string summary = "method,stop_k,stop_time_s,final_f,final_tv,final_rel_err\n";
    for (const MethodRun& run : out.runs) {
        const SolveResult& r = run.result;
        const IterationRecord& rec =
            r.stop_k >= 0 ? r.records[static_cast<size_t>(r.stop_k)] : r.records.back();
        char tbuf[40];
        std::snprintf(tbuf, sizeof tbuf, "%.6f", rec.time_s);
        summary += run.name + ',' + std::to_string(r.stop_k) + ',' + tbuf + ',' +
                   g17(half_squared_residual(A, r.x, out.data)) + ',' + g17(tv_norm(r.x)) + ',' +
                   g17(detail::rel_err_vs(&out.truth, r.x)) + '\n';
        write_img1(dir + run.name + ".img1", r.x);
    }
    write_text(dir + "summary.csv", summary);
}

} // namespace tvscg
