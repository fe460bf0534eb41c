#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tvscg/operators.hpp"
#include "tvscg/types.hpp"

namespace tvscg {

/// Parallel-beam acquisition geometry over a square pixel grid.
struct Geometry {
    int n_angles = 0;
    int n_rays = 0;
    int image_width = 0;
    int image_height = 0;
    double detector_spacing = 1.0; // distance between adjacent rays, in pixel units
    std::vector<double> angles;    // angles[i] = i * pi / n_angles
};

/// Equispaced angles over [0, pi); detector spacing max(1, diagonal/n_rays)
/// so the ray bundle always spans the image diagonal.
Geometry make_geometry(int n_angles, int n_rays, int image_width, int image_height);

/// Joseph forward projection: per ray, traverse the dominant axis and
/// linearly interpolate across the other one; sum scaled by step length.
Sinogram forward_project(const Geometry& g, const Image& x);

/// Exact adjoint of forward_project (same traversal, scatter instead of gather).
Image back_project(const Geometry& g, const Sinogram& s);

/// LinearMap facade over forward_project / back_project.
class ParallelProjector final : public LinearMap {
public:
    explicit ParallelProjector(Geometry g) : geom_(std::move(g)) {}

    int domain_dim() const override { return geom_.image_width * geom_.image_height; }
    int range_dim() const override { return geom_.n_angles * geom_.n_rays; }
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    void apply(const std::vector<double>& x, std::vector<double>& out) const override;
    void apply_adjoint(const std::vector<double>& y, std::vector<double>& out) const override;
    const Geometry& geometry() const { return geom_; }

private:
    Geometry geom_;
};

/// Modified Shepp-Logan head phantom on a size x size grid, values in [0, 1].
Image make_phantom(int size);

struct NoiseModel {
    double level = 0.0;  // sigma as a fraction of rms(y)
    double sigma2 = 0.0; // resulting noise variance
    uint64_t seed = 0;
};

/// Adds white Gaussian noise with sigma = level * rms(y); counter-based
/// stream, so the same (y, level, seed) always yields the same bytes.
std::pair<Sinogram, NoiseModel> add_noise(const Sinogram& y, double level, uint64_t seed);

} // namespace tvscg
