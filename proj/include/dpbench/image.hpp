#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace dpbench {

// 8-bit interleaved image, rows top to bottom.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 4;  // 3 (RGB) or 4 (RGBA)
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w) * h * c, 0) {}

  std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * channels; }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * channels;
  }
  friend bool operator==(const Image&, const Image&) = default;
};

enum class ImageFormat { Ppm, Png };

/// Binary PPM (P6); alpha, if any, is dropped.
void write_ppm(const Image& image, std::ostream& sink);
void write_png(const Image& image, const std::filesystem::path& path);
void write_image(const Image& image, const std::filesystem::path& path, ImageFormat format);

/// Parses the subset of P6 written by write_ppm (maxval 255).
Image read_ppm(std::istream& source);

}  // namespace dpbench
