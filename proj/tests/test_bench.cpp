#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tvscg/bench.hpp"
#include "tvscg/io.hpp"

using namespace tvscg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// csv with the time column blanked, so reruns can be compared byte for byte
std::string strip_time(const std::string& csv, int time_col) {
    std::string out;
    size_t pos = 0;
    while (pos < csv.size()) {
        size_t end = csv.find('\n', pos);
        if (end == std::string::npos) end = csv.size();
        const std::string line = csv.substr(pos, end - pos);
        int col = 0;
        size_t start = 0;
        for (size_t i = 0; i <= line.size(); ++i)
            if (i == line.size() || line[i] == ',') {
                if (col != time_col) out += line.substr(start, i - start);
                if (i < line.size()) out += ',';
                start = i + 1;
                ++col;
            }
        out += '\n';
        pos = end + 1;
    }
    return out;
}

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.size = 16;
    cfg.angles = 12;
    cfg.rays = 24;
    cfg.noise = 0.05;
    cfg.seed = 7;
    cfg.post_stop_fraction = 0.25;
    cfg.base.max_iter = 80;
    cfg.methods = {{"cg", cfg.base}, {"s-cg", cfg.base}};
    return cfg;
}

} // namespace

TEST_CASE("method registry") {
    CHECK(default_method_list() ==
          std::vector<std::string>{"cg", "s-cg-2", "s-cg", "s-cg-cd", "s-pcg-2", "s-pcg", "fista"});

    for (const std::string& m : default_method_list()) CHECK(known_method(m));
    CHECK(known_method("pcg"));
    CHECK(known_method("fbp"));
    CHECK(known_method("ista"));
    CHECK(known_method("s-pcg-125"));
    CHECK_FALSE(known_method("s-cg-"));
    CHECK_FALSE(known_method("s-cg-1234"));
    CHECK_FALSE(known_method("s-cg-2x"));
    CHECK_FALSE(known_method("CG"));
    CHECK_FALSE(known_method("gradient"));

    for (const std::string& m : {"s-cg", "s-cg-2", "s-cg-cd", "s-pcg", "s-pcg-2"})
        CHECK(default_gamma0(m) > 0.0);
    CHECK(default_lambda() > 0.0);
}

TEST_CASE("config parsing with sections and overrides") {
    const std::string text =
        "# comment\n"
        "size=16\n"
        "angles=12\n"
        "rays=24\n"
        "noise=0.04\n"
        "seed=9\n"
        "post_stop_fraction=0.1\n"
        "out_dir=custom_out\n"
        "gamma0=2.5\n"
        "methods=cg, s-cg\n"
        "[method.s-cg]\n"
        "gamma0=0.75\n";
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.size == 16);
    CHECK(cfg.angles == 12);
    CHECK(cfg.rays == 24);
    CHECK(cfg.noise == 0.04);
    CHECK(cfg.seed == 9);
    CHECK(cfg.post_stop_fraction == 0.1);
    CHECK(cfg.out_dir == "custom_out");
    CHECK(cfg.base.gamma0 == 2.5);
    REQUIRE(cfg.methods.size() == 2);
    CHECK(cfg.methods[0].name == "cg");
    CHECK(cfg.methods[0].params.gamma0 == 2.5); // inherits the global
    CHECK(cfg.methods[1].name == "s-cg");
    CHECK(cfg.methods[1].params.gamma0 == 0.75);
}

TEST_CASE("config errors carry the line number") {
    try {
        parse_config("size=16\nangles=12\nbogus_key=1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config("size=banana\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("methods=cg,warp-drive\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("a=1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[method.cg\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[method.cg]\nsize=8\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("methods=cg\n[method.s-cg]\ngamma0=1\n"), ConfigError);
}

TEST_CASE("bench runs every configured method against one shared sinogram") {
    const ExperimentConfig cfg = tiny_config();
    const BenchOutput out = run_bench(cfg);
    REQUIRE(out.runs.size() == 2);
    const double L = 12.0 * 24.0;
    for (const MethodRun& r : out.runs) {
        CHECK(r.epsilon == L * out.noise.sigma2);
        CHECK_FALSE(r.result.records.empty());
        CHECK(r.result.reached_epsilon);
    }

    ExperimentConfig noiseless = cfg;
    noiseless.noise = 0.0;
    CHECK_THROWS_AS(run_bench(noiseless), std::invalid_argument);
}

TEST_CASE("bench outputs are complete and rerun byte-identical modulo time") {
    ExperimentConfig cfg = tiny_config();
    const fs::path dir = fs::temp_directory_path() / "tvscg_bench_test";
    fs::remove_all(dir);
    cfg.out_dir = (dir / "a").string();
    write_bench_outputs(cfg, run_bench(cfg));

    for (const char* name :
         {"truth.img1", "data.sgm1", "data.meta", "metrics.csv", "summary.csv", "cg.img1",
          "s-cg.img1"})
        CHECK(fs::exists(fs::path(cfg.out_dir) / name));

    const std::string metrics = slurp(fs::path(cfg.out_dir) / "metrics.csv");
    CHECK(metrics.rfind("method,k,time_s,f,tv,rel_err\n", 0) == 0);
    const std::string summary = slurp(fs::path(cfg.out_dir) / "summary.csv");
    CHECK(summary.rfind("method,stop_k,stop_time_s,final_f,final_tv,final_rel_err\n", 0) == 0);

    ExperimentConfig cfg2 = tiny_config();
    cfg2.out_dir = (dir / "b").string();
    write_bench_outputs(cfg2, run_bench(cfg2));

    CHECK(strip_time(metrics, 2) ==
          strip_time(slurp(fs::path(cfg2.out_dir) / "metrics.csv"), 2));
    CHECK(strip_time(summary, 2) ==
          strip_time(slurp(fs::path(cfg2.out_dir) / "summary.csv"), 2));
    CHECK(slurp(fs::path(cfg.out_dir) / "cg.img1") == slurp(fs::path(cfg2.out_dir) / "cg.img1"));
}

TEST_CASE("run_method covers the whole registry on a tiny instance") {
    const Geometry g = make_geometry(12, 24, 16, 16);
    const ParallelProjector A(g);
    auto [y, nm] = add_noise(forward_project(g, make_phantom(16)), 0.05, 7);
    const Image x0(16, 16, 0.0);
    MethodParams p;
    p.max_iter = 60;
    const double eps = static_cast<double>(y.size()) * nm.sigma2;

    for (const std::string& name :
         {"cg", "pcg", "ista", "fista", "s-cg", "s-cg-cd", "s-pcg", "s-cg-2", "s-pcg-3"}) {
        const SolveResult r = run_method(name, A, y, x0, p, eps, {});
        INFO(name);
        CHECK_FALSE(r.records.empty());
        CHECK(r.f_tested.size() >= 1);
    }

    const SolveResult fbp = run_method("fbp", A, y, x0, p, eps, {});
    CHECK(fbp.records.size() == 1);

    CHECK_THROWS_AS(run_method("warp-drive", A, y, x0, p, eps, {}), std::invalid_argument);
}
