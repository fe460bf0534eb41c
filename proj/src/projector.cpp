#include "tvscg/projector.hpp"

#include <cmath>
#include <stdexcept>

#include "tvscg/rng.hpp"

namespace tvscg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Enumerates every nonzero matrix entry of the Joseph projector as
// touch(angle, ray, pixel, weight). Forward and adjoint both walk this,
// which makes them an exact transpose pair by construction.
template <class F>
void walk_rays(const Geometry& g, F&& touch) {
    const int W = g.image_width, H = g.image_height;
    const double cx = 0.5 * (W - 1), cy = 0.5 * (H - 1);
    const double off = 0.5 * (g.n_rays - 1);
    for (int a = 0; a < g.n_angles; ++a) {
        const double c = std::cos(g.angles[a]);
        const double s = std::sin(g.angles[a]);
        for (int r = 0; r < g.n_rays; ++r) {
            const double u = (r - off) * g.detector_spacing;
            // Ray: P(tau) = u*(c, s) + tau*(-s, c), so x = u*c - tau*s, y = u*s + tau*c.
            if (std::abs(s) >= std::abs(c)) {
                // Column-dominant: one interpolated sample per pixel column.
                const double scale = 1.0 / std::abs(s);
                for (int j = 0; j < W; ++j) {
                    const double x = j - cx;
                    const double tau = (u * c - x) / s;
                    const double y = u * s + tau * c + cy;
                    const double fl = std::floor(y);
                    const int i0 = static_cast<int>(fl);
                    const double w1 = y - fl;
                    if (i0 >= 0 && i0 < H) touch(a, r, i0 * W + j, (1.0 - w1) * scale);
                    if (i0 + 1 >= 0 && i0 + 1 < H) touch(a, r, (i0 + 1) * W + j, w1 * scale);
                }
            } else {
                // Row-dominant.
                const double scale = 1.0 / std::abs(c);
                for (int i = 0; i < H; ++i) {
                    const double y = i - cy;
                    const double tau = (y - u * s) / c;
                    const double x = u * c - tau * s + cx;
                    const double fl = std::floor(x);
                    const int j0 = static_cast<int>(fl);
                    const double w1 = x - fl;
                    if (j0 >= 0 && j0 < W) touch(a, r, i * W + j0, (1.0 - w1) * scale);
                    if (j0 + 1 >= 0 && j0 + 1 < W) touch(a, r, i * W + j0 + 1, w1 * scale);
                }
            }
        }
    }
}

void check_geometry(const Geometry& g) {
    if (g.n_angles < 1 || g.n_rays < 1 || g.image_width < 1 || g.image_height < 1)
        throw std::invalid_argument("geometry: all dimensions must be positive");
    if (static_cast<int>(g.angles.size()) != g.n_angles)
        throw DimensionError("geometry: angles table does not match n_angles");
    if (g.detector_spacing <= 0.0)
        throw std::invalid_argument("geometry: detector_spacing must be positive");
}

} // namespace

Geometry make_geometry(int n_angles, int n_rays, int image_width, int image_height) {
    if (n_angles < 1 || n_rays < 1 || image_width < 1 || image_height < 1)
        throw std::invalid_argument("make_geometry: all dimensions must be positive");
    Geometry g;
    g.n_angles = n_angles;
    g.n_rays = n_rays;
    g.image_width = image_width;
    g.image_height = image_height;
    const double diag = std::hypot(image_width, image_height);
    g.detector_spacing = std::max(1.0, diag / n_rays);
    g.angles.resize(n_angles);
    for (int i = 0; i < n_angles; ++i) g.angles[i] = i * kPi / n_angles;
    return g;
}

Sinogram forward_project(const Geometry& g, const Image& x) {
    check_geometry(g);
    if (x.width != g.image_width || x.height != g.image_height)
        throw DimensionError("forward_project: image shape does not match geometry");
    Sinogram out(g.n_angles, g.n_rays, 0.0);
    const int nr = g.n_rays;
    walk_rays(g, [&](int a, int r, int pix, double w) {
        out.v[static_cast<size_t>(a) * nr + r] += w * x.v[pix];
    });
    return out;
}

Image back_project(const Geometry& g, const Sinogram& s) {
    check_geometry(g);
    if (s.n_angles != g.n_angles || s.n_rays != g.n_rays)
        throw DimensionError("back_project: sinogram shape does not match geometry");
    Image out(g.image_width, g.image_height, 0.0);
    const int nr = g.n_rays;
    walk_rays(g, [&](int a, int r, int pix, double w) {
        out.v[pix] += w * s.v[static_cast<size_t>(a) * nr + r];
    });
    return out;
}

void ParallelProjector::apply(const std::vector<double>& x, std::vector<double>& out) const {
    if (static_cast<int>(x.size()) != domain_dim())
        throw DimensionError("ParallelProjector::apply: bad input length");
    Image img(geom_.image_width, geom_.image_height);
    img.v = x;
    out = forward_project(geom_, img).v;
}

void ParallelProjector::apply_adjoint(const std::vector<double>& y, std::vector<double>& out) const {
    if (static_cast<int>(y.size()) != range_dim())
        throw DimensionError("ParallelProjector::apply_adjoint: bad input length");
    Sinogram s(geom_.n_angles, geom_.n_rays);
    s.v = y;
    out = back_project(geom_, s).v;
}

namespace {

// Modified Shepp-Logan ellipses: contrast, half-axes (a, b), center, angle (deg).
struct Ellipse {
    double A, a, b, x0, y0, phi_deg;
};
const Ellipse kSheppLogan[] = {
    {1.0, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.8, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
    {0.1, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.1, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.1, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.1, 0.0230, 0.0230, 0.00, -0.6050, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
};

} // namespace

Image make_phantom(int size) {
    if (size < 8) throw std::invalid_argument("make_phantom: size must be >= 8");
    Image img(size, size, 0.0);
    const double half = 0.5 * (size - 1);
    for (int i = 0; i < size; ++i) {
        const double y = (half - i) / half; // row 0 is the top of the head
        for (int j = 0; j < size; ++j) {
            const double x = (j - half) / half;
            double val = 0.0;
            for (const Ellipse& e : kSheppLogan) {
                const double phi = e.phi_deg * kPi / 180.0;
                const double dx = x - e.x0, dy = y - e.y0;
                const double xr = dx * std::cos(phi) + dy * std::sin(phi);
                const double yr = -dx * std::sin(phi) + dy * std::cos(phi);
                if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) val += e.A;
            }
            img.at(i, j) = std::min(1.0, std::max(0.0, val));
        }
    }
    return img;
}

std::pair<Sinogram, NoiseModel> add_noise(const Sinogram& y, double level, uint64_t seed) {
    if (y.size() == 0) throw std::invalid_argument("add_noise: empty sinogram");
    if (level < 0.0) throw std::invalid_argument("add_noise: level must be >= 0");
    double ss = 0.0;
    for (double e : y.v) ss += e * e;
    const double sigma = level * std::sqrt(ss / y.size());
    Sinogram noisy = y;
    for (size_t i = 0; i < noisy.v.size(); ++i)
        noisy.v[i] += sigma * gaussian(seed, static_cast<uint64_t>(i));
    NoiseModel nm{level, sigma * sigma, seed};
    return {std::move(noisy), nm};
}

} // namespace tvscg
