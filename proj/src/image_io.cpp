#include "uwe/image_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#ifdef UWE_WITH_PNG
#include <png.h>
#endif

namespace uwe {

namespace {

Tensor from_rgb8(const std::vector<unsigned char>& rgb, int w, int h) {
    Tensor t(1, 3, h, w);
    float* r = t.plane(0, 0);
    float* g = t.plane(0, 1);
    float* b = t.plane(0, 2);
    for (std::int64_t i = 0; i < t.plane_size(); ++i) {
        r[i] = rgb[static_cast<std::size_t>(3 * i)] / 255.0f;
        g[i] = rgb[static_cast<std::size_t>(3 * i + 1)] / 255.0f;
        b[i] = rgb[static_cast<std::size_t>(3 * i + 2)] / 255.0f;
    }
    return t;
}

std::vector<unsigned char> to_rgb8(const Tensor& image) {
    if (image.batch != 1 || image.channels != 3) {
        throw ShapeError("save_image: expected a 1x3xHxW tensor");
    }
    std::vector<unsigned char> rgb(static_cast<std::size_t>(image.plane_size()) * 3);
    const float* r = image.plane(0, 0);
    const float* g = image.plane(0, 1);
    const float* b = image.plane(0, 2);
    for (std::int64_t i = 0; i < image.plane_size(); ++i) {
        rgb[static_cast<std::size_t>(3 * i)] = quantize_u8(r[i]);
        rgb[static_cast<std::size_t>(3 * i + 1)] = quantize_u8(g[i]);
        rgb[static_cast<std::size_t>(3 * i + 2)] = quantize_u8(b[i]);
    }
    return rgb;
}

// PPM token reader: skips whitespace and '#' comment lines.
int read_ppm_int(std::istream& in, const std::string& path) {
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') {
                ch = in.get();
            }
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF || !std::isdigit(ch)) {
        throw FormatError("'" + path + "': malformed PPM header");
    }
    long value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        if (value > 1 << 30) {
            throw FormatError("'" + path + "': absurd PPM header value");
        }
        ch = in.get();
    }
    if (ch != EOF) {
        in.unget();
    }
    return static_cast<int>(value);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) {
        return false;
    }
    std::string tail = s.substr(s.size() - suffix.size());
    for (char& c : tail) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return tail == suffix;
}

} // namespace

unsigned char quantize_u8(float v) {
    const float c = std::min(1.0f, std::max(0.0f, v));
    return static_cast<unsigned char>(std::lround(c * 255.0f));
}

bool png_supported() {
#ifdef UWE_WITH_PNG
    return true;
#else
    return false;
#endif
}

Tensor load_ppm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    char magic[2] = {0, 0};
    f.read(magic, 2);
    if (!f || magic[0] != 'P' || magic[1] != '6') {
        throw FormatError("'" + path + "': not a binary PPM (P6) file");
    }
    const int w = read_ppm_int(f, path);
    const int h = read_ppm_int(f, path);
    const int maxval = read_ppm_int(f, path);
    if (w < 1 || h < 1) {
        throw FormatError("'" + path + "': bad PPM dimensions");
    }
    if (maxval != 255) {
        throw FormatError("'" + path + "': unsupported PPM maxval " + std::to_string(maxval) +
                          " (need 255)");
    }
    f.get(); // single whitespace byte after the header

    std::vector<unsigned char> rgb(static_cast<std::size_t>(w) * h * 3);
    f.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (f.gcount() != static_cast<std::streamsize>(rgb.size())) {
        throw FormatError("'" + path + "': truncated PPM pixel data");
    }
    return from_rgb8(rgb, w, h);
}

void save_ppm(const Tensor& image, const std::string& path) {
    const std::vector<unsigned char> rgb = to_rgb8(image);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    f << "P6\n" << image.width << " " << image.height << "\n255\n";
    f.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!f) {
        throw IoError("failed while writing '" + path + "'");
    }
}

#ifdef UWE_WITH_PNG

Tensor load_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) {
            png_destroy_read_struct(&png, &info, nullptr);
        }
        std::fclose(fp);
        throw IoError("libpng initialization failed");
    }
    std::vector<unsigned char> rgb;
    int w = 0;
    int h = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw FormatError("'" + path + "': not a decodable PNG file");
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB; alpha is dropped.
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
        png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_read_update_info(png, info);

    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    rgb.resize(static_cast<std::size_t>(w) * h * 3);
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) {
        rows[static_cast<std::size_t>(y)] = rgb.data() + static_cast<std::size_t>(y) * w * 3;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return from_rgb8(rgb, w, h);
}

void save_png(const Tensor& image, const std::string& path) {
    const std::vector<unsigned char> rgb = to_rgb8(image);
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) {
            png_destroy_write_struct(&png, &info);
        }
        std::fclose(fp);
        throw IoError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("failed while writing '" + path + "'");
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(y) * image.width * 3));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

#else

Tensor load_png(const std::string& path) {
    throw IoError("'" + path + "': PNG support was not built in (rebuild with libpng)");
}

void save_png(const Tensor&, const std::string& path) {
    throw IoError("'" + path + "': PNG support was not built in (rebuild with libpng)");
}

#endif

Tensor load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    unsigned char sig[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(sig), 2);
    probe.close();
    if (sig[0] == 'P' && sig[1] == '6') {
        return load_ppm(path);
    }
    if (sig[0] == 0x89 && sig[1] == 'P') {
        return load_png(path);
    }
    throw FormatError("'" + path + "': unrecognized image format (need PPM P6 or PNG)");
}

void save_image(const Tensor& image, const std::string& path) {
    if (has_suffix(path, ".png")) {
        save_png(image, path);
        return;
    }
    if (has_suffix(path, ".ppm")) {
        save_ppm(image, path);
        return;
    }
    throw FormatError("'" + path + "': unsupported output extension (use .ppm or .png)");
}

} // namespace uwe
