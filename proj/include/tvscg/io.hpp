#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvscg/solve.hpp"
#include "tvscg/types.hpp"

namespace tvscg {

/// File that cannot be opened, parsed, or written completely.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sidecar metadata stored next to a sinogram file as <stem>.meta.
struct SinogramMeta {
    double sigma2 = 0.0;
    uint64_t seed = 0;
    int n_angles = 0;
    int n_rays = 0;
    int image_width = 0;
    int image_height = 0;
};

// Image container: magic "IMG1", width and height as little-endian uint32,
// then width*height little-endian float64 values, row-major.
void write_img1(const std::string& path, const Image& img);
Image read_img1(const std::string& path);

// Sinogram container: magic "SGM1", n_angles and n_rays as little-endian
// uint32, then float64 values, angle-major. write_sgm1 also writes the
// plain-text key=value sidecar.
void write_sgm1(const std::string& path, const Sinogram& s, const SinogramMeta& meta);
Sinogram read_sgm1(const std::string& path);
SinogramMeta read_sinogram_meta(const std::string& sinogram_path);

/// Binary 16-bit PGM (big-endian samples); the linear min-max scaling used
/// is recorded in a comment line.
void write_pgm16(const std::string& path, const Image& img);

struct MetricsRow {
    std::string method;
    IterationRecord rec;
};

/// CSV with header exactly "method,k,time_s,f,tv,rel_err". Values are
/// printed at full round-trip precision except time_s (microseconds);
/// missing rel_err prints as "nan". LF line endings.
std::string metrics_csv(const std::vector<MetricsRow>& rows);

/// Atomic text write (temp file + rename), used for CSV and summaries.
void write_text(const std::string& path, const std::string& content);

} // namespace tvscg
