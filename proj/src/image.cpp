#include "animalguard/image.hpp"

#include <fstream>
#include <istream>
#include <string>

namespace animalguard {

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h),
      pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

bool GrayImage::valid() const {
    return width >= kMinImageSide && height >= kMinImageSide &&
           pixels.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    // Fixed-point weights keep the half-up rounding exact.
    const unsigned v = 299u * r + 587u * g + 114u * b + 500u;
    return static_cast<std::uint8_t>(v / 1000u);
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
long read_header_int(std::istream& in, const std::filesystem::path& path) {
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string discard;
            std::getline(in, discard);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            in.get();
        } else {
            break;
        }
    }
    long value = -1;
    if (!(in >> value)) throw ImageFormatError(path.string() + ": bad PNM header");
    return value;
}

}  // namespace

GrayImage read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageFormatError(path.string() + ": cannot open");
    char magic[2] = {};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw ImageFormatError(path.string() + ": not a binary P5/P6 file");
    const bool rgb = magic[1] == '6';

    const long w = read_header_int(in, path);
    const long h = read_header_int(in, path);
    const long maxval = read_header_int(in, path);
    if (w < kMinImageSide || h < kMinImageSide || w > 1 << 15 || h > 1 << 15)
        throw ImageFormatError(path.string() + ": unsupported dimensions");
    if (maxval != 255) throw ImageFormatError(path.string() + ": only maxval 255 supported");
    in.get();  // single whitespace byte after maxval

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    if (!rgb) {
        in.read(reinterpret_cast<char*>(img.pixels.data()),
                static_cast<std::streamsize>(img.pixels.size()));
    } else {
        std::vector<std::uint8_t> raw(img.pixels.size() * 3);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        for (std::size_t i = 0; i < img.pixels.size(); ++i)
            img.pixels[i] = luminance(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]);
    }
    if (!in) throw ImageFormatError(path.string() + ": truncated pixel data");
    return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageFormatError(path.string() + ": cannot write");
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
}

}  // namespace animalguard
