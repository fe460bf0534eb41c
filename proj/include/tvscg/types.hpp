#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tvscg {

/// Mismatched operand shapes (image/sinogram/operator dimensions).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A search direction with <p, A^T A p> = 0, i.e. p in the null space of A.
struct SingularDirectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A conjugate-descent beta with zero denominator <g, p>.
struct DegenerateBetaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grayscale image, float64, row-major: v[i*width + j] is row i, column j.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), v(static_cast<size_t>(w) * h, fill) {}

    double& at(int i, int j) { return v[static_cast<size_t>(i) * width + j]; }
    double at(int i, int j) const { return v[static_cast<size_t>(i) * width + j]; }
    int size() const { return width * height; }
};

/// Parallel-beam sinogram, angle-major: v[a*n_rays + r] is angle a, ray r.
struct Sinogram {
    int n_angles = 0;
    int n_rays = 0;
    std::vector<double> v;

    Sinogram() = default;
    Sinogram(int na, int nr, double fill = 0.0)
        : n_angles(na), n_rays(nr), v(static_cast<size_t>(na) * nr, fill) {}

    double& at(int a, int r) { return v[static_cast<size_t>(a) * n_rays + r]; }
    double at(int a, int r) const { return v[static_cast<size_t>(a) * n_rays + r]; }
    int size() const { return n_angles * n_rays; }
};

/// Dense row-major matrix; only used for small oracles and theory checks.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

} // namespace tvscg
