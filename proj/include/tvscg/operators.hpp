#pragma once

#include <cstdint>
#include <vector>

#include "tvscg/types.hpp"

namespace tvscg {

/// Matrix-free linear operator between image space (domain) and sinogram
/// space (range). Implementations must be exact adjoint pairs.
class LinearMap {
public:
    virtual ~LinearMap() = default;

    virtual int domain_dim() const = 0;
    virtual int range_dim() const = 0;

    /// out = A x. Resizes out; throws DimensionError on a mismatched x.
    virtual void apply(const std::vector<double>& x, std::vector<double>& out) const = 0;
    /// out = A^T y. Resizes out; throws DimensionError on a mismatched y.
    virtual void apply_adjoint(const std::vector<double>& y, std::vector<double>& out) const = 0;

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> out;
        apply(x, out);
        return out;
    }
    std::vector<double> apply_adjoint(const std::vector<double>& y) const {
        std::vector<double> out;
        apply_adjoint(y, out);
        return out;
    }
};

/// Explicit dense operator; handy for small reference instances.
class DenseMap final : public LinearMap {
public:
    explicit DenseMap(DenseMatrix m) : m_(std::move(m)) {}

    int domain_dim() const override { return m_.cols; }
    int range_dim() const override { return m_.rows; }
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    void apply(const std::vector<double>& x, std::vector<double>& out) const override;
    void apply_adjoint(const std::vector<double>& y, std::vector<double>& out) const override;
    const DenseMatrix& matrix() const { return m_; }

private:
    DenseMatrix m_;
};

/// <u, v>; throws DimensionError on length mismatch.
double inner_product(const std::vector<double>& u, const std::vector<double>& v);

/// ||u||_2.
double norm2(const std::vector<double>& u);

/// Gradient of f(x) = 1/2 ||y - Ax||^2, i.e. g = A^T (Ax - y).
Image gradient(const LinearMap& A, const Image& x, const Sinogram& y);

/// f(x) = 1/2 ||y - Ax||^2.
double half_squared_residual(const LinearMap& A, const Image& x, const Sinogram& y);

struct SpectralNormResult {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Largest singular value of A by power iteration on A^T A from a seeded
/// random start. Non-convergence returns the best estimate, converged=false.
SpectralNormResult spectral_norm(const LinearMap& A, int max_iters = 200,
                                 double tol = 1e-8, uint64_t seed = 42);

/// A as an explicit matrix, column by column. Refuses operators with more
/// than 1e6 entries; oracle use only.
DenseMatrix materialize_dense(const LinearMap& A);

} // namespace tvscg
