#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "tvscg/bench.hpp"
#include "tvscg/fista.hpp"
#include "tvscg/operators.hpp"
#include "tvscg/pcg.hpp"
#include "tvscg/projector.hpp"
#include "tvscg/theory.hpp"
#include "tvscg/tv.hpp"

namespace py = pybind11;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

tvscg::Image to_image(const DArray& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2D array (height x width)");
    tvscg::Image img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::memcpy(img.v.data(), a.data(), img.v.size() * sizeof(double));
    return img;
}

py::array image_out(const tvscg::Image& img) {
    py::array_t<double> a({img.height, img.width});
    std::memcpy(a.mutable_data(), img.v.data(), img.v.size() * sizeof(double));
    return a;
}

tvscg::Sinogram to_sinogram(const DArray& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2D array (angles x rays)");
    tvscg::Sinogram s(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::memcpy(s.v.data(), a.data(), s.v.size() * sizeof(double));
    return s;
}

py::array sinogram_out(const tvscg::Sinogram& s) {
    py::array_t<double> a({s.n_angles, s.n_rays});
    std::memcpy(a.mutable_data(), s.v.data(), s.v.size() * sizeof(double));
    return a;
}

py::array vec_out(const std::vector<double>& v) {
    // Shape-container ctor: strides come from sizeof(double) at compile time,
    // not from a runtime dtype read (broken for numpy 2 with old headers).
    py::array_t<double> a({static_cast<py::ssize_t>(v.size())});
    std::memcpy(a.mutable_data(), v.data(), v.size() * sizeof(double));
    return a;
}

py::dict result_out(const tvscg::SolveResult& res) {
    std::vector<double> k, t, f, tv, re;
    for (const tvscg::IterationRecord& r : res.records) {
        k.push_back(r.k);
        t.push_back(r.time_s);
        f.push_back(r.f);
        tv.push_back(r.tv);
        re.push_back(r.rel_err);
    }
    py::dict d;
    d["x"] = image_out(res.x);
    d["k"] = vec_out(k);
    d["time_s"] = vec_out(t);
    d["f"] = vec_out(f);
    d["tv"] = vec_out(tv);
    d["rel_err"] = vec_out(re);
    d["f_tested"] = vec_out(res.f_tested);
    d["reached_epsilon"] = res.reached_epsilon;
    d["stop_k"] = res.stop_k;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Matrix-free tomographic reconstruction with TV-superiorized CG solvers";

    m.def("phantom", [](int size) { return image_out(tvscg::make_phantom(size)); },
          py::arg("size"), "Head phantom on a size x size grid, values in [0, 1].");

    m.def(
        "project",
        [](const DArray& image, int angles, int rays) {
            const tvscg::Image img = to_image(image);
            const tvscg::Geometry g = tvscg::make_geometry(angles, rays, img.width, img.height);
            return sinogram_out(tvscg::forward_project(g, img));
        },
        py::arg("image"), py::arg("angles"), py::arg("rays"),
        "Parallel-beam forward projection to an (angles x rays) sinogram.");

    m.def(
        "back_project",
        [](const DArray& sino, int width, int height) {
            const tvscg::Sinogram s = to_sinogram(sino);
            const tvscg::Geometry g = tvscg::make_geometry(s.n_angles, s.n_rays, width, height);
            return image_out(tvscg::back_project(g, s));
        },
        py::arg("sinogram"), py::arg("width"), py::arg("height"),
        "Adjoint of project onto a width x height grid.");

    m.def(
        "add_noise",
        [](const DArray& sino, double level, uint64_t seed) {
            auto [noisy, nm] = tvscg::add_noise(to_sinogram(sino), level, seed);
            return py::make_tuple(sinogram_out(noisy), nm.sigma2);
        },
        py::arg("sinogram"), py::arg("level"), py::arg("seed"),
        "White Gaussian noise with sigma = level * rms; returns (noisy, sigma2).");

    m.def(
        "fbp",
        [](const DArray& sino, int width, int height, double mu) {
            const tvscg::Sinogram s = to_sinogram(sino);
            const tvscg::Geometry g = tvscg::make_geometry(s.n_angles, s.n_rays, width, height);
            return image_out(tvscg::fbp_reconstruct(g, s, mu));
        },
        py::arg("sinogram"), py::arg("width"), py::arg("height"), py::arg("mu") = 0.0,
        "Filtered backprojection reference reconstruction.");

    m.def("tv_norm", [](const DArray& image) { return tvscg::tv_norm(to_image(image)); },
          py::arg("image"), "Isotropic total variation.");

    m.def(
        "tv_prox",
        [](const DArray& image, double alpha, int inner_iters) {
            return image_out(tvscg::tv_prox(to_image(image), alpha, inner_iters));
        },
        py::arg("image"), py::arg("alpha"), py::arg("inner_iters") = 20,
        "Proximal map of alpha * TV by dual fast gradient projection.");

    m.def(
        "spectral_norm",
        [](int angles, int rays, int width, int height) {
            const tvscg::ParallelProjector A(tvscg::make_geometry(angles, rays, width, height));
            return tvscg::spectral_norm(A).value;
        },
        py::arg("angles"), py::arg("rays"), py::arg("width"), py::arg("height"),
        "Largest singular value of the projector (power iteration).");

    m.def(
        "constants",
        [](const DArray& sino, int width, int height) {
            const tvscg::Sinogram s = to_sinogram(sino);
            const tvscg::ParallelProjector A(
                tvscg::make_geometry(s.n_angles, s.n_rays, width, height));
            const tvscg::TheoryConstants tc = tvscg::compute_constants(A, s);
            py::dict d;
            d["c"] = tc.c;
            d["eta1"] = tc.eta1;
            d["eta2"] = tc.eta2;
            d["eta_l"] = tc.eta_l;
            d["eps0"] = tc.eps0;
            return d;
        },
        py::arg("sinogram"), py::arg("width"), py::arg("height"),
        "Guarantee constants (c, eta1, eta2, eta_l, eps0); small instances only.");

    m.def(
        "reconstruct",
        [](const DArray& sino, int width, int height, const std::string& method, double eps,
           std::optional<double> gamma0, double a, double kappa, double mu,
           std::optional<double> lam, int max_iter, double post_stop,
           std::optional<DArray> truth) {
            if (!tvscg::known_method(method))
                throw py::value_error("unknown method '" + method + "'");
            const tvscg::Sinogram s = to_sinogram(sino);
            const tvscg::ParallelProjector A(
                tvscg::make_geometry(s.n_angles, s.n_rays, width, height));
            tvscg::MethodParams p;
            if (gamma0) p.gamma0 = *gamma0;
            p.a = a;
            p.kappa = kappa;
            p.mu = mu;
            if (lam) p.lambda = *lam;
            p.max_iter = max_iter;
            tvscg::RunOptions opt;
            opt.post_stop_fraction = post_stop;
            tvscg::Image truth_img;
            if (truth) {
                truth_img = to_image(*truth);
                opt.ground_truth = &truth_img;
            }
            const tvscg::Image x0(width, height, 0.0);
            return result_out(tvscg::run_method(method, A, s, x0, p, eps, opt));
        },
        py::arg("sinogram"), py::arg("width"), py::arg("height"), py::arg("method"),
        py::arg("eps"), py::arg("gamma0") = std::nullopt, py::arg("a") = 0.975,
        py::arg("kappa") = 1e-4, py::arg("mu") = 0.01, py::arg("lam") = std::nullopt,
        py::arg("max_iter") = 10000, py::arg("post_stop") = 0.0,
        py::arg("truth") = std::nullopt,
        "Run one solver (cg, pcg, fbp, ista, fista, s-cg, s-cg-cd, s-pcg, s-cg-<K>, "
        "s-pcg-<K>) until f <= eps; returns the trace and output image.");
}
