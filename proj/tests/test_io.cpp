#include <doctest.h>

#include <png.h>

#include <fstream>
#include <sstream>

#include "planeguard/bitplane.hpp"
#include "planeguard/error.hpp"
#include "planeguard/feature_io.hpp"
#include "planeguard/image_io.hpp"
#include "test_support.hpp"

using namespace planeguard;
using planeguard::testing::random_image;
using planeguard::testing::TempDir;

namespace {

// Minimal libpng writer for colour types the library does not emit.
void write_raw_png(const std::filesystem::path& path, std::uint32_t w, std::uint32_t h, int depth, int color,
                   std::size_t bytes_per_pixel, const std::vector<std::uint8_t>& data) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    REQUIRE(fp);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, fp);
    png_set_IHDR(png, info, w, h, depth, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::uint32_t r = 0; r < h; ++r) png_write_row(png, data.data() + r * w * bytes_per_pixel);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

TEST_CASE("PGM round trip") {
    const auto img = random_image(1, 37, 21);
    std::stringstream ss;
    write_pgm(ss, img);
    CHECK(ss.str().rfind("P5\n37 21\n255\n", 0) == 0);
    CHECK(read_pgm(ss) == img);
}

TEST_CASE("PGM header comments and whitespace") {
    std::string text = "P5 # magic\n# a comment line\n2\t1\n255\n";
    text += std::string("\x07\xF0", 2);
    std::istringstream is(text);
    const auto img = read_pgm(is);
    CHECK(img.width() == 2);
    CHECK(img.at(0, 0) == 7);
    CHECK(img.at(0, 1) == 0xF0);
}

TEST_CASE("PGM rejections") {
    auto fails = [](const std::string& text) {
        std::istringstream is(text);
        CHECK_THROWS_AS(read_pgm(is), InvalidInput);
    };
    fails("P2\n1 1\n255\n0");
    fails("P5\n1 1\n65535\n\x00\x00");
    fails("P5\n2 2\n255\nab");
    fails("P5\n0 2\n255\n");
    fails("P5\nx 2\n255\n");
}

TEST_CASE("PNG gray round trip and format dispatch") {
    TempDir dir("png");
    const auto img = random_image(2, 19, 33);
    write_image(dir / "a.png", img);
    write_image(dir / "a.pgm", img);
    CHECK(read_png(dir / "a.png") == img);
    CHECK(read_image(dir / "a.png") == img);
    CHECK(read_image(dir / "a.pgm") == img);
    std::ifstream is(dir / "a.png", std::ios::binary);
    char sig[4] = {};
    is.read(sig, 4);
    CHECK(std::string(sig + 1, 3) == "PNG");
}

TEST_CASE("RGB PNG is converted to luminance") {
    TempDir dir("rgb");
    const std::vector<std::uint8_t> rgb = {255, 0, 0, 42, 42, 42, 255, 255, 255, 0, 0, 255};
    write_raw_png(dir / "c.png", 2, 2, 8, PNG_COLOR_TYPE_RGB, 3, rgb);
    const auto img = read_image(dir / "c.png");
    CHECK(img == to_luminance(ColorImage{2, 2, 3, rgb}));
    CHECK(img.at(0, 0) == 76);
    CHECK(img.at(1, 0) == 255);
}

TEST_CASE("unsupported PNG variants are rejected") {
    TempDir dir("png16");
    write_raw_png(dir / "deep.png", 2, 1, 16, PNG_COLOR_TYPE_GRAY, 2, {0, 1, 2, 3});
    CHECK_THROWS_AS(read_image(dir / "deep.png"), InvalidInput);
    write_raw_png(dir / "alpha.png", 1, 1, 8, PNG_COLOR_TYPE_RGBA, 4, {1, 2, 3, 4});
    CHECK_THROWS_AS(read_image(dir / "alpha.png"), InvalidInput);
    {
        std::ofstream os(dir / "junk.png", std::ios::binary);
        os << "\x89PNG\r\n\x1a\n garbage";
    }
    CHECK_THROWS_AS(read_image(dir / "junk.png"), InvalidInput);
    {
        std::ofstream os(dir / "text.txt");
        os << "hello";
    }
    CHECK_THROWS_AS(read_image(dir / "text.txt"), InvalidInput);
    CHECK_THROWS_AS(read_image(dir / "missing.pgm"), IoError);
}

TEST_CASE("atomic writes leave no partial output") {
    TempDir dir("atomic");
    const auto target = dir / "out.txt";
    CHECK_THROWS(write_file_atomic(target, [](std::ostream& os) {
        os << "partial";
        throw IoError("simulated failure");
    }));
    CHECK_FALSE(std::filesystem::exists(target));
    CHECK(std::distance(std::filesystem::directory_iterator(dir.path()), std::filesystem::directory_iterator{}) == 0);

    write_file_atomic(target, [](std::ostream& os) { os << "done"; });
    std::ifstream is(target);
    std::string s;
    is >> s;
    CHECK(s == "done");
    CHECK_THROWS_AS(write_image(dir / "no" / "such" / "dir.pgm", random_image(3, 4, 4)), IoError);
}

TEST_CASE("feature file layout") {
    Eigen::MatrixXd m(1, 2);
    m << 1.0, -2.5;
    std::stringstream ss;
    write_feature_file(ss, m);
    const std::string expect("RM1F\x01\x00\x02\x00\x00\x00\x01\x00\x00\x00\x00\x00\x80\x3f\x00\x00\x20\xc0", 22);
    CHECK(ss.str() == expect);
    CHECK(read_feature_file(ss) == m);
}

TEST_CASE("feature file round trip at float precision") {
    Rng rng(4);
    Eigen::MatrixXd m(5, 40);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
    std::stringstream ss;
    write_feature_file(ss, m);
    CHECK(ss.str().size() == 14 + 4 * 5 * 40);
    const auto back = read_feature_file(ss);
    REQUIRE(back.rows() == 5);
    REQUIRE(back.cols() == 40);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        REQUIRE(back.data()[i] == static_cast<double>(static_cast<float>(m.data()[i])));

    auto fails = [](const std::string& s) {
        std::istringstream is(s);
        CHECK_THROWS_AS(read_feature_file(is), InvalidInput);
    };
    fails("RM2F");
    fails(std::string("RM1F\x02\x00\x01\x00\x00\x00\x01\x00\x00\x00", 14));
    fails(ss.str().substr(0, 30));
    fails(ss.str().substr(0, 9));
}

TEST_CASE("feature CSV and label sidecar") {
    LabeledFeatureSet d;
    d.features.resize(2, 3);
    d.features << 0.1, 0.2, 0.3, 1e-17, 0.5, 1.0 / 3.0;
    d.labels = {Label::Tampered, Label::Authentic};
    std::stringstream ss;
    write_feature_csv(ss, d);
    CHECK(ss.str().rfind("label,f0,f1,f2\ntampered,0.1,0.2,0.3\n", 0) == 0);
    const auto back = read_feature_csv(ss);
    CHECK(back.features == d.features);
    CHECK(back.labels == d.labels);

    std::istringstream bad("label,f0,f1\nauthentic,1\n");
    try {
        read_feature_csv(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }

    std::stringstream ls;
    write_labels(ls, d.labels);
    CHECK(ls.str() == "tampered\nauthentic\n");
    CHECK(read_labels(ls) == d.labels);
    std::istringstream bad_labels("authentic\nmaybe\n");
    CHECK_THROWS_AS(read_labels(bad_labels), ParseError);
}
