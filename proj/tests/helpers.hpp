#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tvscg/operators.hpp"
#include "tvscg/rng.hpp"
#include "tvscg/types.hpp"

namespace testutil {

inline tvscg::Image random_image(int w, int h, uint64_t seed) {
    tvscg::Image img(w, h);
    for (size_t i = 0; i < img.v.size(); ++i) img.v[i] = tvscg::uniform01(seed, i);
    return img;
}

inline tvscg::Sinogram random_sinogram(int na, int nr, uint64_t seed) {
    tvscg::Sinogram s(na, nr);
    for (size_t i = 0; i < s.v.size(); ++i) s.v[i] = tvscg::uniform01(seed, i);
    return s;
}

inline std::vector<double> random_vector(int n, uint64_t seed) {
    std::vector<double> v(static_cast<size_t>(n));
    for (size_t i = 0; i < v.size(); ++i) v[i] = tvscg::gaussian(seed, i);
    return v;
}

inline tvscg::DenseMatrix random_matrix(int rows, int cols, uint64_t seed) {
    tvscg::DenseMatrix m(rows, cols);
    for (size_t i = 0; i < m.a.size(); ++i) m.a[i] = tvscg::gaussian(seed, i);
    return m;
}

// Diagonal operator with the given singular values (rows = cols = n).
inline tvscg::DenseMatrix diagonal_matrix(const std::vector<double>& d) {
    const int n = static_cast<int>(d.size());
    tvscg::DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = d[static_cast<size_t>(i)];
    return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Reference value of the smoothed TV (kappa^2 under each root), written
// against the forward-difference convention with the last row/column flat.
inline double smoothed_tv(const tvscg::Image& x, double kappa) {
    double s = 0.0;
    for (int i = 0; i < x.height; ++i)
        for (int j = 0; j < x.width; ++j) {
            const double dh = j + 1 < x.width ? x.at(i, j + 1) - x.at(i, j) : 0.0;
            const double dv = i + 1 < x.height ? x.at(i + 1, j) - x.at(i, j) : 0.0;
            s += std::sqrt(dh * dh + dv * dv + kappa * kappa);
        }
    return s;
}

} // namespace testutil
