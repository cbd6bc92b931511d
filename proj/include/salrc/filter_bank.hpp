#pragma once

#include <array>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace salrc {

/// 3x3 kernel, row-major.
struct Kernel3x3 {
  std::array<double, 9> k{};
};

/// One filter: a 3x3 tap set per input channel, summed over channels.
struct Filter {
  std::vector<Kernel3x3> taps;
};

struct LayerSpec {
  int in_channels = 1;
  double slope = 0.1;  // leaky activation negative slope, [0,1)
  bool pool = false;   // 2x2 stride-2 max pool after this layer
  std::vector<Filter> filters;

  int filter_count() const { return static_cast<int>(filters.size()); }
};

struct FilterBank {
  std::vector<LayerSpec> layers;

  int depth() const { return static_cast<int>(layers.size()); }
};

inline void validate_bank(const FilterBank& bank) {
  if (bank.layers.empty()) throw std::invalid_argument("filter bank has no layers");
  int in_ch = 1;
  for (std::size_t li = 0; li < bank.layers.size(); ++li) {
    const LayerSpec& layer = bank.layers[li];
    std::string where = "layer " + std::to_string(li + 1);
    if (layer.filters.empty()) throw std::invalid_argument(where + ": no filters");
    if (layer.in_channels != in_ch) {
      throw std::invalid_argument(where + ": expects " + std::to_string(layer.in_channels) +
                                  " input channels, pipeline provides " + std::to_string(in_ch));
    }
    if (!(layer.slope >= 0.0 && layer.slope < 1.0)) {
      throw std::invalid_argument(where + ": slope must be in [0,1)");
    }
    for (const Filter& f : layer.filters) {
      if (static_cast<int>(f.taps.size()) != layer.in_channels) {
        throw std::invalid_argument(where + ": filter tap count != input channels");
      }
    }
    in_ch = layer.filter_count();
  }
}

namespace detail {

inline const std::array<Kernel3x3, 8>& kernel_menu() {
  static const std::array<Kernel3x3, 8> menu = {{
      // Gaussian blur
      {{1 / 16.0, 2 / 16.0, 1 / 16.0, 2 / 16.0, 4 / 16.0, 2 / 16.0, 1 / 16.0, 2 / 16.0, 1 / 16.0}},
      // horizontal gradient (Sobel x)
      {{-0.25, 0, 0.25, -0.5, 0, 0.5, -0.25, 0, 0.25}},
      // vertical gradient (Sobel y)
      {{-0.25, -0.5, -0.25, 0, 0, 0, 0.25, 0.5, 0.25}},
      // main-diagonal gradient
      {{-0.5, -0.25, 0, -0.25, 0, 0.25, 0, 0.25, 0.5}},
      // anti-diagonal gradient
      {{0, -0.25, -0.5, 0.25, 0, -0.25, 0.5, 0.25, 0}},
      // Laplacian
      {{0, -0.25, 0, -0.25, 1.0, -0.25, 0, -0.25, 0}},
      // center-surround
      {{-0.125, -0.125, -0.125, -0.125, 1.0, -0.125, -0.125, -0.125, -0.125}},
      // identity
      {{0, 0, 0, 0, 1.0, 0, 0, 0, 0}},
  }};
  return menu;
}

}  // namespace detail

/// Built-in 7-layer bank of oriented-edge / Laplacian / center-surround /
/// Gaussian kernels. Pools follow layers 1, 2, 4 and 6. Multi-channel layers
/// rotate each filter's spatial kernel over a deterministic channel pick;
/// every fourth filter averages all input channels instead.
inline FilterBank default_filter_bank() {
  const auto& menu = detail::kernel_menu();
  const int counts[] = {8, 12, 16, 16, 24, 24, 32};
  const bool pools[] = {true, true, false, true, false, true, false};

  FilterBank bank;
  int in_ch = 1;
  for (int li = 0; li < 7; ++li) {
    LayerSpec layer;
    layer.in_channels = in_ch;
    layer.slope = 0.1;
    layer.pool = pools[li];
    for (int n = 0; n < counts[li]; ++n) {
      Filter f;
      f.taps.assign(in_ch, Kernel3x3{});
      const Kernel3x3& spatial = menu[(n + li) % menu.size()];
      if (in_ch > 1 && n % 4 == 3) {
        for (int c = 0; c < in_ch; ++c) {
          for (int i = 0; i < 9; ++i) f.taps[c].k[i] = spatial.k[i] / in_ch;
        }
      } else {
        int c = (5 * n + li + 1) % in_ch;
        f.taps[c] = spatial;
      }
      layer.filters.push_back(std::move(f));
    }
    bank.layers.push_back(std::move(layer));
    in_ch = counts[li];
  }
  validate_bank(bank);
  return bank;
}

/// Bank file format (line oriented, '#' comments):
///   bank
///   layer filters=<N> slope=<float> pool=<0|1>
///   filter
///   k <9 row-major coefficients>     -- one line per input channel, in order
/// Layer 1 has one input channel; layer l>1 has as many as layer l-1 filters.
inline FilterBank load_filter_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open filter bank: " + path);

  FilterBank bank;
  LayerSpec* layer = nullptr;
  Filter* filter = nullptr;
  int expected_in = 1;
  int lineno = 0;
  bool saw_bank = false;
  std::string line;

  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;

    if (word == "bank") {
      saw_bank = true;
    } else if (word == "layer") {
      if (!saw_bank) fail("missing 'bank' header");
      if (layer != nullptr) expected_in = layer->filter_count();
      bank.layers.emplace_back();
      layer = &bank.layers.back();
      filter = nullptr;
      layer->in_channels = expected_in;
      std::string kv;
      while (ls >> kv) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos) fail("expected key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        std::string val = kv.substr(eq + 1);
        try {
          if (key == "filters") {
            (void)std::stoi(val);  // informative; actual count from filter blocks
          } else if (key == "slope") {
            layer->slope = std::stod(val);
          } else if (key == "pool") {
            layer->pool = std::stoi(val) != 0;
          } else {
            fail("unknown layer key '" + key + "'");
          }
        } catch (const std::runtime_error&) {
          throw;
        } catch (const std::exception&) {
          fail("bad value for '" + key + "'");
        }
      }
    } else if (word == "filter") {
      if (layer == nullptr) fail("'filter' before any 'layer'");
      layer->filters.emplace_back();
      filter = &layer->filters.back();
    } else if (word == "k") {
      if (filter == nullptr) fail("'k' before any 'filter'");
      if (static_cast<int>(filter->taps.size()) >= layer->in_channels) {
        fail("too many kernels for filter (layer has " + std::to_string(layer->in_channels) +
             " input channels)");
      }
      Kernel3x3 kern;
      for (int i = 0; i < 9; ++i) {
        if (!(ls >> kern.k[i])) fail("kernel needs 9 coefficients");
      }
      double extra;
      if (ls >> extra) fail("kernel has more than 9 coefficients");
      filter->taps.push_back(kern);
    } else {
      fail("unknown directive '" + word + "'");
    }
  }
  if (!saw_bank) throw std::runtime_error(path + ": not a filter bank file");
  validate_bank(bank);
  return bank;
}

inline void save_filter_bank(const FilterBank& bank, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write filter bank: " + path);
  out << "bank\n";
  for (const LayerSpec& layer : bank.layers) {
    out << "layer filters=" << layer.filter_count() << " slope=" << layer.slope
        << " pool=" << (layer.pool ? 1 : 0) << "\n";
    for (const Filter& f : layer.filters) {
      out << "filter\n";
      for (const Kernel3x3& kern : f.taps) {
        out << "k";
        for (double v : kern.k) out << " " << v;
        out << "\n";
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing filter bank: " + path);
}

}  // namespace salrc
