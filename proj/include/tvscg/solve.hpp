#pragma once

#include <vector>

#include "tvscg/types.hpp"

namespace tvscg {

struct SolverConfig {
    double epsilon = 0.0; // target residual level: stop once f <= epsilon
    int max_iter = 10000; // outer-iteration cap; exceeding it flags the result
    int K = 2;            // inner CG steps per outer iteration for the -K variants
};

/// One row of a convergence trace. rel_err is NaN when no ground truth was given.
struct IterationRecord {
    int k = 0;
    double time_s = 0.0;
    double f = 0.0;
    double tv = 0.0;
    double rel_err = 0.0;
};

struct RunOptions {
    const Image* ground_truth = nullptr; // enables rel_err in records
    double post_stop_fraction = 0.0;     // keep iterating ceil(frac*stop_k) steps past the stop
    bool check_identities = false;       // track orthogonality/conjugacy residuals per step
};

struct SolveResult {
    /// The algorithm's defined output (for superiorized runs: the perturbed
    /// iterate at the first satisfied stopping test, even when the run
    /// continues past it for post_stop_fraction). A run flagged by max_iter
    /// returns its most advanced iterate instead.
    Image x;
    /// One row per iterate, k ascending from 0 (row 0 is x0).
    std::vector<IterationRecord> records;
    /// Stopping-test values in evaluation order. Plain runs test every
    /// iterate, so entry i is f at record i. Superiorized runs with a
    /// warm-up test f(x0) first and then the perturbed point x_{k-1/2}
    /// after each step k >= 2 (the warm-up itself is never tested); the
    /// K-variants restart each outer step, so they test at every k.
    std::vector<double> f_tested;
    bool reached_epsilon = false;
    int stop_k = -1; // latest record index when the test first passed; -1 if never
    /// Largest relative |<g_{k+1}, p_k>| and |<A p_k, A p_{k-1}>| seen
    /// (only filled when RunOptions::check_identities is set).
    double max_orth = 0.0;
    double max_conj = 0.0;
};

} // namespace tvscg
