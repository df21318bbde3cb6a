#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cadact {

// 8-bit grayscale raster, row-major, row 0 at the top.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 255) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, std::uint8_t v) {
    if (in_bounds(x, y)) at(x, y) = v;
  }

  bool operator==(const GrayImage&) const = default;
};

// Binary PGM (P5, maxval 255).
std::string encode_pgm(const GrayImage& img);
GrayImage decode_pgm(const std::string& bytes);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
GrayImage read_pgm(const std::filesystem::path& path);

namespace raster {

void line(GrayImage& img, int x0, int y0, int x1, int y1, std::uint8_t v);
void fill_rect(GrayImage& img, int x0, int y0, int x1, int y1, std::uint8_t v);
void outline_rect(GrayImage& img, int x0, int y0, int x1, int y1, std::uint8_t v);

// Canvas coordinates (u right, v up, both in [0,1]) to pixel indices.
inline int to_px(double u, int width) { return static_cast<int>(u * width); }
inline int to_py(double v, int height) { return static_cast<int>((1.0 - v) * height); }

}  // namespace raster

}  // namespace cadact
