#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace salrc {

/// 8-bit single-plane luma image, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;

  std::uint8_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::int64_t pixel_count() const { return static_cast<std::int64_t>(width) * height; }
};

inline Image make_image(int width, int height, std::uint8_t fill = 0) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  Image img;
  img.width = width;
  img.height = height;
  img.samples.assign(static_cast<std::size_t>(width) * height, fill);
  return img;
}

/// BT.601 luma from 8-bit RGB, rounded to nearest.
inline std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  double y = 0.299 * r + 0.587 * g + 0.114 * b;
  long v = std::lround(y);
  return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

namespace detail {

// Reads one whitespace-delimited PNM header token, skipping '#' comments.
inline std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw std::runtime_error("truncated PNM header");
  return tok;
}

inline int pnm_int(std::istream& in) {
  std::string tok = pnm_token(in);
  try {
    std::size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("malformed PNM header field '" + tok + "'");
  }
}

}  // namespace detail

/// Loads a binary PGM (P5) or PPM (P6, converted to luma). 8-bit only.
inline Image load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image file: " + path);

  std::string magic = detail::pnm_token(in);
  if (magic != "P5" && magic != "P6") {
    throw std::runtime_error("unsupported image format (need P5/P6): " + path);
  }
  int width = detail::pnm_int(in);
  int height = detail::pnm_int(in);
  int maxval = detail::pnm_int(in);
  if (width < 1 || height < 1) {
    throw std::runtime_error("image has zero dimension: " + path);
  }
  if (maxval < 1 || maxval > 255) {
    throw std::runtime_error("unsupported PNM maxval (8-bit only): " + path);
  }

  Image img = make_image(width, height);
  std::size_t n = img.samples.size();
  if (magic == "P5") {
    in.read(reinterpret_cast<char*>(img.samples.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw std::runtime_error("truncated PGM payload: " + path);
    }
  } else {
    std::vector<std::uint8_t> rgb(n * 3);
    in.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (static_cast<std::size_t>(in.gcount()) != rgb.size()) {
      throw std::runtime_error("truncated PPM payload: " + path);
    }
    for (std::size_t i = 0; i < n; ++i) {
      img.samples[i] = luma_bt601(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
    }
  }
  return img;
}

inline void save_pgm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image file: " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.samples.data()),
            static_cast<std::streamsize>(img.samples.size()));
  if (!out) throw std::runtime_error("failed writing image file: " + path);
}

}  // namespace salrc
