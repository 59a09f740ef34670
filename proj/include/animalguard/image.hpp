#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace animalguard {

/// Row-major 8-bit luminance raster.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0);

    [[nodiscard]] std::uint8_t at(int x, int y) const { return pixels[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return pixels[index(x, y)]; }
    [[nodiscard]] bool valid() const;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    [[nodiscard]] std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x);
    }
};

inline constexpr int kMinImageSide = 16;

class ImageFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads binary P5 (gray) or P6 (RGB) with maxval 255. RGB is reduced to
/// luminance 0.299R + 0.587G + 0.114B rounded half-up.
GrayImage read_pnm(const std::filesystem::path& path);

/// Writes binary P5.
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Integer luminance of one RGB triple, rounded half-up.
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace animalguard
