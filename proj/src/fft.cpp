#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace tvscg::detail {

namespace {
// FFTW's planner is not thread-safe; executions on distinct buffers are.
std::mutex planner_mutex;
} // namespace

void filter_rows_inplace(std::vector<double>& data, int n_rows, int n,
                         const std::vector<double>& gains) {
    if (n < 1 || n_rows < 1) throw std::invalid_argument("filter_rows: empty layout");
    if (static_cast<long long>(n_rows) * n != static_cast<long long>(data.size()))
        throw std::invalid_argument("filter_rows: data size does not match rows*n");
    if (static_cast<int>(gains.size()) != n)
        throw std::invalid_argument("filter_rows: gains length must equal row length");

    const int nb = n / 2 + 1; // real-transform bin count
    double* in = fftw_alloc_real(n);
    fftw_complex* spec = fftw_alloc_complex(nb);

    fftw_plan fwd, inv;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fwd = fftw_plan_dft_r2c_1d(n, in, spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(n, spec, in, FFTW_ESTIMATE);
    }

    for (int row = 0; row < n_rows; ++row) {
        double* src = data.data() + static_cast<size_t>(row) * n;
        for (int i = 0; i < n; ++i) in[i] = src[i];
        fftw_execute(fwd);
        for (int j = 0; j < nb; ++j) {
            spec[j][0] *= gains[j];
            spec[j][1] *= gains[j];
        }
        fftw_execute(inv);
        for (int i = 0; i < n; ++i) src[i] = in[i] / n; // FFTW leaves the n scaling to us
    }

    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    fftw_free(in);
    fftw_free(spec);
}

} // namespace tvscg::detail
