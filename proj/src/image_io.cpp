#include "planeguard/image_io.hpp"

#include <png.h>
#include <unistd.h>

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include "planeguard/bitplane.hpp"
#include "planeguard/error.hpp"

namespace planeguard {
namespace fs = std::filesystem;
namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

std::size_t pgm_number(std::istream& is, const char* what) {
    const std::string tok = pgm_token(is);
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9) {
        throw InvalidInput(std::string("PGM: invalid ") + what + " '" + tok + "'");
    }
    return std::stoul(tok);
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

GrayImage read_pgm(std::istream& is) {
    if (pgm_token(is) != "P5") throw InvalidInput("PGM: expected binary 'P5' magic");
    const std::size_t w = pgm_number(is, "width");
    const std::size_t h = pgm_number(is, "height");
    const std::size_t maxval = pgm_number(is, "maxval");
    if (maxval != 255) throw InvalidInput("PGM: only maxval 255 (8-bit) is supported, got " + std::to_string(maxval));
    if (w == 0 || h == 0) throw InvalidInput("PGM: empty image");
    std::vector<std::uint8_t> px(w * h);
    is.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (static_cast<std::size_t>(is.gcount()) != px.size()) throw InvalidInput("PGM: truncated pixel data");
    return GrayImage(w, h, std::move(px));
}

void write_pgm(std::ostream& os, const GrayImage& img) {
    os << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.pixels().data()), static_cast<std::streamsize>(img.size()));
}

GrayImage read_png(const fs::path& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng initialization failed");
    }
    std::vector<std::uint8_t> data;
    png_uint_32 w = 0, h = 0;
    int depth = 0, color = 0;
    std::string failure;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InvalidInput("PNG: decode error in " + path.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    png_get_IHDR(png, info, &w, &h, &depth, &color, nullptr, nullptr, nullptr);
    std::size_t channels = 0;
    if (depth != 8) {
        failure = "PNG: bit depth " + std::to_string(depth) + " is not supported (8-bit only)";
    } else if (color == PNG_COLOR_TYPE_GRAY) {
        channels = 1;
    } else if (color == PNG_COLOR_TYPE_RGB) {
        channels = 3;
    } else {
        failure = "PNG: only 8-bit grayscale or RGB images are supported";
    }
    if (failure.empty()) {
        png_set_interlace_handling(png);
        png_read_update_info(png, info);
        data.resize(static_cast<std::size_t>(w) * h * channels);
        std::vector<png_bytep> rows(h);
        for (png_uint_32 r = 0; r < h; ++r) rows[r] = data.data() + static_cast<std::size_t>(r) * w * channels;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (!failure.empty()) throw InvalidInput(failure + " (" + path.string() + ")");

    if (channels == 1) return GrayImage(w, h, std::move(data));
    return to_luminance(ColorImage{w, h, 3, std::move(data)});
}

void write_png(const fs::path& path, const GrayImage& img) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot create " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG: encode error for " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < img.height(); ++r) {
        png_write_row(png, const_cast<png_bytep>(img.pixels().data() + r * img.width()));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

GrayImage read_image(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::array<char, 8> sig{};
    in.read(sig.data(), sig.size());
    static constexpr std::array<unsigned char, 8> kPngSig = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (in.gcount() == 8 && std::equal(kPngSig.begin(), kPngSig.end(), sig.begin(),
                                       [](unsigned char a, char b) { return a == static_cast<unsigned char>(b); })) {
        in.close();
        return read_png(path);
    }
    in.clear();
    in.seekg(0);
    try {
        return read_pgm(in);
    } catch (const InvalidInput& e) {
        throw InvalidInput(std::string(e.what()) + " (" + path.string() + ")");
    }
}

void write_file_atomic(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + tmp.string());
        try {
            writer(out);
            out.flush();
            if (!out) throw IoError("write failed for " + path.string());
        } catch (...) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw;
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place: " + path.string());
    }
}

void write_image(const fs::path& path, const GrayImage& img) {
    if (path.extension() == ".png") {
        fs::path tmp = path;
        tmp += ".tmp" + std::to_string(::getpid());
        try {
            write_png(tmp, img);
        } catch (...) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw;
        }
        std::error_code ec;
        fs::rename(tmp, path, ec);
        if (ec) throw IoError("cannot move output into place: " + path.string());
        return;
    }
    write_file_atomic(path, [&img](std::ostream& os) { write_pgm(os, img); });
}

}  // namespace planeguard
