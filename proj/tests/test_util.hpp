#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "salrc/conv.hpp"
#include "salrc/image.hpp"

namespace test_util {

/// Unique temp directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("salrc_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline salrc::Image random_image(int w, int h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  salrc::Image img = salrc::make_image(w, h);
  for (std::uint8_t& s : img.samples) s = static_cast<std::uint8_t>(dist(rng));
  return img;
}

/// Piecewise-smooth image: gradient background plus a textured disc. More
/// representative of coding behavior than white noise.
inline salrc::Image structured_image(int w, int h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double cx = w * (0.3 + 0.4 * uni(rng));
  const double cy = h * (0.3 + 0.4 * uni(rng));
  const double r = 0.2 * std::min(w, h) * (0.8 + 0.4 * uni(rng));
  const double freq = 0.3 + 0.5 * uni(rng);
  salrc::Image img = salrc::make_image(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = 70.0 + 60.0 * x / w + 30.0 * y / h;
      const double d = std::hypot(x - cx, y - cy);
      if (d < r) {
        v = 150.0 + 50.0 * std::sin(freq * x) * std::cos(freq * y);
      }
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return img;
}

inline salrc::FeatureTensor random_tensor(int channels, int w, int h, std::uint32_t seed,
                                          double lo = -1.0, double hi = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  salrc::FeatureTensor t;
  t.width = w;
  t.height = h;
  t.channels.assign(channels, std::vector<double>(static_cast<std::size_t>(w) * h));
  for (auto& ch : t.channels) {
    for (double& v : ch) v = dist(rng);
  }
  return t;
}

}  // namespace test_util
