#include "tvscg/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "tvscg/rng.hpp"

namespace tvscg {

void DenseMap::apply(const std::vector<double>& x, std::vector<double>& out) const {
    if (static_cast<int>(x.size()) != m_.cols)
        throw DimensionError("DenseMap::apply: x has length " + std::to_string(x.size()) +
                             ", expected " + std::to_string(m_.cols));
    out.assign(m_.rows, 0.0);
    for (int i = 0; i < m_.rows; ++i) {
        double s = 0.0;
        const double* row = &m_.a[static_cast<size_t>(i) * m_.cols];
        for (int j = 0; j < m_.cols; ++j) s += row[j] * x[j];
        out[i] = s;
    }
}

void DenseMap::apply_adjoint(const std::vector<double>& y, std::vector<double>& out) const {
    if (static_cast<int>(y.size()) != m_.rows)
        throw DimensionError("DenseMap::apply_adjoint: y has length " + std::to_string(y.size()) +
                             ", expected " + std::to_string(m_.rows));
    out.assign(m_.cols, 0.0);
    for (int i = 0; i < m_.rows; ++i) {
        const double yi = y[i];
        const double* row = &m_.a[static_cast<size_t>(i) * m_.cols];
        for (int j = 0; j < m_.cols; ++j) out[j] += row[j] * yi;
    }
}

double inner_product(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        throw DimensionError("inner_product: lengths " + std::to_string(u.size()) + " and " +
                             std::to_string(v.size()));
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

double norm2(const std::vector<double>& u) {
    return std::sqrt(inner_product(u, u));
}

Image gradient(const LinearMap& A, const Image& x, const Sinogram& y) {
    if (x.size() != A.domain_dim())
        throw DimensionError("gradient: image size does not match operator domain");
    if (y.size() != A.range_dim())
        throw DimensionError("gradient: sinogram size does not match operator range");
    std::vector<double> r = A.apply(x.v);
    for (size_t i = 0; i < r.size(); ++i) r[i] -= y.v[i];
    Image g(x.width, x.height);
    A.apply_adjoint(r, g.v);
    return g;
}

double half_squared_residual(const LinearMap& A, const Image& x, const Sinogram& y) {
    if (x.size() != A.domain_dim())
        throw DimensionError("half_squared_residual: image size does not match operator domain");
    if (y.size() != A.range_dim())
        throw DimensionError("half_squared_residual: sinogram size does not match operator range");
    std::vector<double> r = A.apply(x.v);
    double s = 0.0;
    for (size_t i = 0; i < r.size(); ++i) {
        const double d = y.v[i] - r[i];
        s += d * d;
    }
    return 0.5 * s;
}

SpectralNormResult spectral_norm(const LinearMap& A, int max_iters, double tol, uint64_t seed) {
    if (max_iters < 1) throw std::invalid_argument("spectral_norm: max_iters must be >= 1");
    if (tol <= 0.0) throw std::invalid_argument("spectral_norm: tol must be positive");

    const int n = A.domain_dim();
    std::vector<double> v(n), av, w(n);
    for (int i = 0; i < n; ++i) v[i] = 2.0 * uniform01(seed, i) - 1.0;
    double nv = norm2(v);
    if (nv == 0.0) v[0] = nv = 1.0;
    for (double& e : v) e /= nv;

    SpectralNormResult res;
    double est = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        A.apply(v, av);
        // Rayleigh quotient of A^T A at unit v is ||Av||^2.
        const double next = std::sqrt(inner_product(av, av));
        A.apply_adjoint(av, w);
        const double nw = norm2(w);
        res.iterations = it;
        if (nw == 0.0) {
            // v is in the null space of A^T A; the operator norm along this start is 0.
            res.value = 0.0;
            res.converged = true;
            return res;
        }
        for (int i = 0; i < n; ++i) v[i] = w[i] / nw;
        if (it > 1 && std::abs(next - est) <= tol * std::max(next, 1e-300)) {
            res.value = next;
            res.converged = true;
            return res;
        }
        est = next;
    }
    res.value = est;
    res.converged = false;
    return res;
}

DenseMatrix materialize_dense(const LinearMap& A) {
    const long long rows = A.range_dim(), cols = A.domain_dim();
    if (rows * cols > 1000000LL)
        throw std::invalid_argument("materialize_dense: refusing " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " (over 1e6 entries)");
    DenseMatrix m(static_cast<int>(rows), static_cast<int>(cols));
    std::vector<double> e(cols, 0.0), col;
    for (int j = 0; j < cols; ++j) {
        e[j] = 1.0;
        A.apply(e, col);
        e[j] = 0.0;
        for (int i = 0; i < rows; ++i) m.at(i, j) = col[i];
    }
    return m;
}

} // namespace tvscg
