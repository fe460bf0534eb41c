#pragma once

// Shared plumbing for the run_* drivers: explicit-f guards, trace records,
// stop bookkeeping with optional post-stop overrun. Internal to src/.

#include <chrono>
#include <cmath>

#include "tvscg/operators.hpp"
#include "tvscg/solve.hpp"
#include "tvscg/tv.hpp"

namespace tvscg::detail {

inline double rel_err_vs(const Image* truth, const Image& x) {
    if (!truth) return std::nan("");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.v.size(); ++i) {
        const double d = x.v[i] - truth->v[i];
        num += d * d;
        den += truth->v[i] * truth->v[i];
    }
    if (den == 0.0) return std::nan("");
    return std::sqrt(num / den);
}

class RunLoop {
public:
    RunLoop(const LinearMap& A, const Sinogram& y, const SolverConfig& cfg,
            const RunOptions& opt, SolveResult& res)
        : A_(A), y_(y), cfg_(cfg), opt_(opt), res_(res),
          t0_(std::chrono::steady_clock::now()) {
        if (cfg.epsilon < 0.0) throw std::invalid_argument("run: epsilon must be >= 0");
        if (cfg.max_iter < 1) throw std::invalid_argument("run: max_iter must be >= 1");
    }

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

    /// Explicit f(x) = 1/2 ||y - Ax||^2, recomputed from scratch.
    double f_explicit(const Image& x) const { return half_squared_residual(A_, x, y_); }

    /// Appends the trace row for iterate x_k.
    void emit(int k, const Image& xk, double f) {
        res_.records.push_back({k, seconds(), f, tv_norm(xk), rel_err_vs(opt_.ground_truth, xk)});
    }

    /// Runs one stopping test. f_test is the guard value, cand the algorithm's
    /// output if the run stopped here, k the latest record index. Returns true
    /// when the loop must exit (test passed and any overrun is exhausted, or
    /// max_iter is spent; the flagged case leaves reached_epsilon false).
    /// Runners whose tested candidate trails the current iterate pass the
    /// latter as `exhausted`: a flagged run returns the most advanced point.
    bool stop_check(double f_test, const Image& cand, int k, const Image* exhausted = nullptr) {
        res_.f_tested.push_back(f_test);
        if (res_.stop_k < 0 && f_test <= cfg_.epsilon) {
            res_.stop_k = k;
            res_.reached_epsilon = true;
            res_.x = cand;
            extra_ = static_cast<long>(std::ceil(opt_.post_stop_fraction * k));
        }
        if (k >= cfg_.max_iter) {
            if (res_.stop_k < 0) res_.x = exhausted ? *exhausted : cand;
            return true;
        }
        if (res_.stop_k >= 0) {
            if (extra_ <= 0) return true;
            --extra_;
        }
        return false;
    }

    bool stopped() const { return res_.stop_k >= 0; }

private:
    const LinearMap& A_;
    const Sinogram& y_;
    const SolverConfig& cfg_;
    const RunOptions& opt_;
    SolveResult& res_;
    std::chrono::steady_clock::time_point t0_;
    long extra_ = 0;
};

inline void check_instance(const LinearMap& A, const Sinogram& y, const Image& x0) {
    if (x0.size() != A.domain_dim())
        throw DimensionError("run: x0 size does not match operator domain");
    if (y.size() != A.range_dim())
        throw DimensionError("run: sinogram size does not match operator range");
}

} // namespace tvscg::detail
