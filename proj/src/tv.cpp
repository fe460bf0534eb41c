#include "tvscg/tv.hpp"

#include <cmath>
#include <stdexcept>

namespace tvscg {

namespace {

inline double dh(const Image& x, int i, int j) {
    return j + 1 < x.width ? x.at(i, j + 1) - x.at(i, j) : 0.0;
}
inline double dv(const Image& x, int i, int j) {
    return i + 1 < x.height ? x.at(i + 1, j) - x.at(i, j) : 0.0;
}

} // namespace

double tv_norm(const Image& x) {
    if (x.size() == 0) throw std::invalid_argument("tv_norm: empty image");
    double s = 0.0;
    for (int i = 0; i < x.height; ++i)
        for (int j = 0; j < x.width; ++j) {
            const double h = dh(x, i, j), v = dv(x, i, j);
            s += std::sqrt(h * h + v * v);
        }
    return s;
}

Image tv_smoothed_gradient(const Image& x, const SmoothingParams& p) {
    if (x.size() == 0) throw std::invalid_argument("tv_smoothed_gradient: empty image");
    if (p.kappa <= 0.0) throw std::invalid_argument("tv_smoothed_gradient: kappa must be > 0");
    const double k2 = p.kappa * p.kappa;
    Image g(x.width, x.height, 0.0);
    // Each pixel term sqrt(Dh^2 + Dv^2 + kappa^2) touches x(i,j), x(i,j+1), x(i+1,j).
    for (int i = 0; i < x.height; ++i)
        for (int j = 0; j < x.width; ++j) {
            const double h = dh(x, i, j), v = dv(x, i, j);
            const double s = std::sqrt(h * h + v * v + k2);
            g.at(i, j) += (-h - v) / s;
            if (j + 1 < x.width) g.at(i, j + 1) += h / s;
            if (i + 1 < x.height) g.at(i + 1, j) += v / s;
        }
    return g;
}

Image nonascending_direction(const Image& x, const SmoothingParams& p) {
    Image g = tv_smoothed_gradient(x, p);
    double n2 = 0.0;
    for (double e : g.v) n2 += e * e;
    const double n = std::sqrt(n2);
    if (n == 0.0) {
        for (double& e : g.v) e = 0.0;
        return g;
    }
    for (double& e : g.v) e = -e / n;
    return g;
}

Image perturbed(const Image& x, PerturbationSchedule& sched, const SmoothingParams& p) {
    if (sched.gamma0 < 0.0) throw std::invalid_argument("perturbed: gamma0 must be >= 0");
    if (!(sched.a > 0.0 && sched.a < 1.0)) throw std::invalid_argument("perturbed: a must be in (0,1)");
    if (sched.max_attempts < 1) throw std::invalid_argument("perturbed: max_attempts must be >= 1");

    const Image v = nonascending_direction(x, p);
    bool v_zero = true;
    for (double e : v.v)
        if (e != 0.0) {
            v_zero = false;
            break;
        }
    if (v_zero) {
        sched.ell += 1; // the draw is consumed even when no move is possible
        return x;
    }

    const double tv0 = tv_norm(x);
    for (int attempt = 0; attempt < sched.max_attempts; ++attempt) {
        const double gamma = sched.gamma0 * std::pow(sched.a, static_cast<double>(sched.ell));
        sched.ell += 1;
        Image cand = x;
        for (int n = 0; n < cand.size(); ++n) cand.v[n] += gamma * v.v[n];
        if (tv_norm(cand) <= tv0) return cand;
    }
    return x;
}

} // namespace tvscg
