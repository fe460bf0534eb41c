#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "tvscg/io.hpp"
#include "tvscg/solve.hpp"

using namespace tvscg;
namespace fs = std::filesystem;

namespace {

fs::path tmp_path(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "tvscg_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("image container round-trips exactly") {
    const Image img = testutil::random_image(9, 7, 131);
    const fs::path p = tmp_path("roundtrip.img1");
    write_img1(p.string(), img);
    const Image back = read_img1(p.string());
    REQUIRE(back.width == 9);
    REQUIRE(back.height == 7);
    CHECK(back.v == img.v);

    const std::string bytes = slurp(p);
    CHECK(bytes.substr(0, 4) == "IMG1");
}

TEST_CASE("sinogram container round-trips with its sidecar") {
    const Sinogram s = testutil::random_sinogram(5, 11, 132);
    SinogramMeta meta;
    meta.sigma2 = 0.125;
    meta.seed = 99;
    meta.n_angles = 5;
    meta.n_rays = 11;
    meta.image_width = 16;
    meta.image_height = 16;
    const fs::path p = tmp_path("roundtrip.sgm1");
    write_sgm1(p.string(), s, meta);

    const Sinogram back = read_sgm1(p.string());
    REQUIRE(back.n_angles == 5);
    REQUIRE(back.n_rays == 11);
    CHECK(back.v == s.v);

    const SinogramMeta m = read_sinogram_meta(p.string());
    CHECK(m.sigma2 == 0.125);
    CHECK(m.seed == 99);
    CHECK(m.n_angles == 5);
    CHECK(m.n_rays == 11);
    CHECK(m.image_width == 16);
    CHECK(m.image_height == 16);
}

TEST_CASE("unreadable containers raise io errors") {
    CHECK_THROWS_AS(read_img1(tmp_path("missing.img1").string()), IoError);

    const fs::path junk = tmp_path("junk.img1");
    std::ofstream(junk, std::ios::binary) << "XXXXnot a container";
    CHECK_THROWS_AS(read_img1(junk.string()), IoError);

    const fs::path junk2 = tmp_path("junk.sgm1");
    std::ofstream(junk2, std::ios::binary) << "YYYY";
    CHECK_THROWS_AS(read_sgm1(junk2.string()), IoError);
}

TEST_CASE("pgm preview is 16-bit big-endian with min-max scaling") {
    Image img(2, 1);
    img.v = {0.0, 1.0};
    const fs::path p = tmp_path("preview.pgm");
    write_pgm16(p.string(), img);
    const std::string bytes = slurp(p);

    CHECK(bytes.substr(0, 2) == "P5");
    CHECK(bytes.find("65535") != std::string::npos);
    REQUIRE(bytes.size() >= 4);
    const auto u8 = [&](size_t i) { return static_cast<unsigned char>(bytes[i]); };
    // row-major samples at the tail: min then max
    CHECK(u8(bytes.size() - 4) == 0x00);
    CHECK(u8(bytes.size() - 3) == 0x00);
    CHECK(u8(bytes.size() - 2) == 0xFF);
    CHECK(u8(bytes.size() - 1) == 0xFF);
}

TEST_CASE("metrics csv pins its header and precision") {
    IterationRecord rec;
    rec.k = 3;
    rec.time_s = 0.004375;
    rec.f = 1.0 / 3.0;
    rec.tv = 2.5;
    rec.rel_err = std::nan("");
    const std::string csv = metrics_csv({{"s-cg", rec}});

    const size_t nl = csv.find('\n');
    REQUIRE(nl != std::string::npos);
    CHECK(csv.substr(0, nl) == "method,k,time_s,f,tv,rel_err");
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.back() == '\n');

    const std::string row = csv.substr(nl + 1, csv.size() - nl - 2);
    CHECK(row.substr(0, 5) == "s-cg,");
    CHECK(row.find(",nan") == row.size() - 4);

    // f survives a parse round trip
    size_t start = 0;
    int field = 0;
    std::string fstr;
    for (size_t i = 0; i <= row.size(); ++i)
        if (i == row.size() || row[i] == ',') {
            if (field == 3) fstr = row.substr(start, i - start);
            start = i + 1;
            ++field;
        }
    CHECK(std::stod(fstr) == 1.0 / 3.0);
}

TEST_CASE("text writes land atomically at the final name") {
    const fs::path p = tmp_path("note.txt");
    write_text(p.string(), "first\n");
    CHECK(slurp(p) == "first\n");
    write_text(p.string(), "second\n");
    CHECK(slurp(p) == "second\n");
    // no temp litter left behind
    int count = 0;
    for (const auto& e : fs::directory_iterator(p.parent_path()))
        if (e.path().filename().string().rfind("note", 0) == 0) ++count;
    CHECK(count == 1);
}
