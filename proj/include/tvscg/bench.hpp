#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvscg/projector.hpp"
#include "tvscg/solve.hpp"
#include "tvscg/types.hpp"

namespace tvscg {

/// Config-file problem; the message carries the 1-based line number.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-method knobs. Negative gamma0/lambda mean "use the committed
/// per-method default"; negative epsilon means "auto", i.e. L * sigma2.
struct MethodParams {
    double gamma0 = -1.0;
    double a = 0.975;
    double kappa = 1e-4;
    double mu = 0.01;
    double lambda = -1.0;
    double epsilon = -1.0;
    int max_iter = 10000;
    int inner_iters = 20;
};

struct MethodEntry {
    std::string name;
    MethodParams params;
};

struct ExperimentConfig {
    int size = 128;
    int angles = 120;
    int rays = 184;
    double noise = 0.05;
    uint64_t seed = 7;
    double post_stop_fraction = 0.25;
    std::string out_dir = "bench_out";
    MethodParams base;
    std::vector<MethodEntry> methods; // empty means the default method list
};

/// The methods the default experiment compares.
std::vector<std::string> default_method_list();

/// True when name is in the registry: cg, pcg, fbp, ista, fista, s-cg,
/// s-cg-cd, s-pcg, s-cg-<int>, s-pcg-<int>.
bool known_method(const std::string& name);

/// Committed step-size defaults from the one-time desk-scale grid search
/// (tools/tune_defaults.sh): gamma0 per superiorized method, lambda for the
/// proximal baselines.
double default_gamma0(const std::string& method);
double default_lambda();

/// Parses key=value text with [method.<name>] sections overriding globals.
/// The optional top-level key methods=<comma list> fixes the method order.
ExperimentConfig parse_config(const std::string& text);

/// Runs one registry method on the given instance and returns its trace.
/// epsilon is the resolved stopping level (auto already applied).
SolveResult run_method(const std::string& name, const ParallelProjector& A,
                       const Sinogram& y, const Image& x0, const MethodParams& p,
                       double epsilon, const RunOptions& opt);

struct MethodRun {
    std::string name;
    double epsilon = 0.0;
    SolveResult result;
};

struct BenchOutput {
    Geometry geom;
    Image truth;
    Sinogram data; // the one shared noisy sinogram
    NoiseModel noise;
    std::vector<MethodRun> runs;
};

/// Phantom + projection + noise once, then every configured method on the
/// shared sinogram, each continuing post_stop_fraction past its stop.
BenchOutput run_bench(const ExperimentConfig& cfg);

/// Writes truth.img1, data.sgm1 (+ sidecar), metrics.csv, summary.csv and
/// one <method>.img1 per run into cfg.out_dir (created if needed).
void write_bench_outputs(const ExperimentConfig& cfg, const BenchOutput& out);

} // namespace tvscg
