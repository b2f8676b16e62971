#include "dpbench/image.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include "dpbench/errors.hpp"

namespace dpbench {

void write_ppm(const Image& image, std::ostream& sink) {
  sink << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  if (image.channels == 3) {
    sink.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  } else {
    std::vector<std::uint8_t> rgb;
    rgb.reserve(static_cast<std::size_t>(image.width) * image.height * 3);
    for (std::size_t i = 0; i < image.pixels.size(); i += static_cast<std::size_t>(image.channels)) {
      rgb.insert(rgb.end(), image.pixels.begin() + static_cast<std::ptrdiff_t>(i),
                 image.pixels.begin() + static_cast<std::ptrdiff_t>(i + 3));
    }
    sink.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  }
  sink.flush();
  if (!sink) throw IoError("ppm: write to sink failed");
}

void write_png(const Image& image, const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot open '" + path.string() + "' for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png: cannot allocate encoder");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png: encoding '" + path.string() + "' failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               image.channels == 4 ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) png_write_row(png, image.at(0, y));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_image(const Image& image, const std::filesystem::path& path, ImageFormat format) {
  if (format == ImageFormat::Png) {
    write_png(image, path);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_ppm(image, out);
}

Image read_ppm(std::istream& source) {
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  source >> magic >> w >> h >> maxval;
  if (!source || magic != "P6" || w <= 0 || h <= 0 || maxval != 255) throw ParseError("ppm: unsupported header");
  source.get();  // single whitespace before the raster
  Image img(w, h, 3);
  source.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (source.gcount() != static_cast<std::streamsize>(img.pixels.size())) throw ParseError("ppm: truncated raster");
  return img;
}

}  // namespace dpbench
