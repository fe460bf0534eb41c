#include "tvscg/io.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace tvscg {

namespace {

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
    const uint64_t bits = std::bit_cast<uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

uint32_t get_u32(const unsigned char* p) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
    return v;
}

double get_f64(const unsigned char* p) {
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

void atomic_write(const std::string& path, const std::string& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open for writing: " + tmp);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        f.flush();
        if (!f) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + tmp + " -> " + path + ": " + ec.message());
}

std::string read_all(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failed: " + path);
    return bytes;
}

// Shared shape of the two binary containers: magic + two u32 dims + f64 grid.
std::string encode_grid(const char magic[4], uint32_t d0, uint32_t d1,
                        const std::vector<double>& v) {
    std::string out;
    out.reserve(12 + 8 * v.size());
    out.append(magic, 4);
    put_u32(out, d0);
    put_u32(out, d1);
    for (double x : v) put_f64(out, x);
    return out;
}

void decode_grid(const std::string& path, const char magic[4], uint32_t& d0, uint32_t& d1,
                 std::vector<double>& v) {
    const std::string bytes = read_all(path);
    if (bytes.size() < 12 || bytes.compare(0, 4, magic, 4) != 0)
        throw IoError(path + ": not a " + std::string(magic, 4) + " file");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    d0 = get_u32(p + 4);
    d1 = get_u32(p + 8);
    if (d0 == 0 || d1 == 0 || d0 > (1u << 20) || d1 > (1u << 20))
        throw IoError(path + ": bad dimensions " + std::to_string(d0) + "x" + std::to_string(d1));
    const size_t n = static_cast<size_t>(d0) * d1;
    if (bytes.size() != 12 + 8 * n)
        throw IoError(path + ": expected " + std::to_string(12 + 8 * n) + " bytes, got " +
                      std::to_string(bytes.size()));
    v.resize(n);
    for (size_t i = 0; i < n; ++i) v[i] = get_f64(p + 12 + 8 * i);
}

std::string meta_path_for(const std::string& sinogram_path) {
    return std::filesystem::path(sinogram_path).replace_extension(".meta").string();
}

std::string fmt_g17(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

void write_img1(const std::string& path, const Image& img) {
    if (img.width < 1 || img.height < 1 || img.v.size() != static_cast<size_t>(img.size()))
        throw DimensionError("write_img1: malformed image");
    atomic_write(path, encode_grid("IMG1", static_cast<uint32_t>(img.width),
                                   static_cast<uint32_t>(img.height), img.v));
}

Image read_img1(const std::string& path) {
    uint32_t w = 0, h = 0;
    Image img;
    decode_grid(path, "IMG1", w, h, img.v);
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    return img;
}

void write_sgm1(const std::string& path, const Sinogram& s, const SinogramMeta& meta) {
    if (s.n_angles < 1 || s.n_rays < 1 || s.v.size() != static_cast<size_t>(s.size()))
        throw DimensionError("write_sgm1: malformed sinogram");
    atomic_write(path, encode_grid("SGM1", static_cast<uint32_t>(s.n_angles),
                                   static_cast<uint32_t>(s.n_rays), s.v));
    std::string m;
    m += "sigma2=" + fmt_g17(meta.sigma2) + "\n";
    m += "seed=" + std::to_string(meta.seed) + "\n";
    m += "n_angles=" + std::to_string(s.n_angles) + "\n";
    m += "n_rays=" + std::to_string(s.n_rays) + "\n";
    m += "image_width=" + std::to_string(meta.image_width) + "\n";
    m += "image_height=" + std::to_string(meta.image_height) + "\n";
    atomic_write(meta_path_for(path), m);
}

Sinogram read_sgm1(const std::string& path) {
    uint32_t na = 0, nr = 0;
    Sinogram s;
    decode_grid(path, "SGM1", na, nr, s.v);
    s.n_angles = static_cast<int>(na);
    s.n_rays = static_cast<int>(nr);
    return s;
}

SinogramMeta read_sinogram_meta(const std::string& sinogram_path) {
    const std::string path = meta_path_for(sinogram_path);
    const std::string text = read_all(path);
    std::map<std::string, std::string> kv;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw IoError(path + ": malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw IoError(path + ": missing key '" + std::string(key) + "'");
        return it->second;
    };
    SinogramMeta meta;
    try {
        meta.sigma2 = std::stod(need("sigma2"));
        meta.seed = std::stoull(need("seed"));
        meta.n_angles = std::stoi(need("n_angles"));
        meta.n_rays = std::stoi(need("n_rays"));
        meta.image_width = std::stoi(need("image_width"));
        meta.image_height = std::stoi(need("image_height"));
    } catch (const std::logic_error&) {
        throw IoError(path + ": malformed numeric value");
    }
    return meta;
}

void write_pgm16(const std::string& path, const Image& img) {
    if (img.width < 1 || img.height < 1)
        throw DimensionError("write_pgm16: malformed image");
    double lo = img.v[0], hi = img.v[0];
    for (double x : img.v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    std::string out;
    out += "P5\n# min=" + fmt_g17(lo) + " max=" + fmt_g17(hi) + "\n";
    out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n65535\n";
    for (double x : img.v) {
        const double t = (x - lo) / span;
        const auto s = static_cast<uint16_t>(std::lround(t * 65535.0));
        out.push_back(static_cast<char>(s >> 8));
        out.push_back(static_cast<char>(s & 0xff));
    }
    atomic_write(path, out);
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = "method,k,time_s,f,tv,rel_err\n";
    char tbuf[40];
    for (const MetricsRow& r : rows) {
        std::snprintf(tbuf, sizeof tbuf, "%.6f", r.rec.time_s);
        out += r.method;
        out += ',' + std::to_string(r.rec.k);
        out += ',';
        out += tbuf;
        out += ',' + fmt_g17(r.rec.f);
        out += ',' + fmt_g17(r.rec.tv);
        out += ',' + fmt_g17(r.rec.rel_err);
        out += '\n';
    }
    return out;
}

void write_text(const std::string& path, const std::string& content) {
    atomic_write(path, content);
}

} // namespace tvscg
