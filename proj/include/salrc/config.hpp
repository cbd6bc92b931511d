#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "salrc/rate_control.hpp"
#include "salrc/rate_model.hpp"

namespace salrc {

/// Run configuration shared by the CLI commands. Every field can be set from
/// a flat key=value config file; command-line flags override file values.
struct RunConfig {
  std::string filter_bank;  // path; empty selects the built-in default bank
  int layer = 3;
  int cu_size = 16;
  int input_size = 416;  // long side fed to layer 1 (C_1)
  RateModel model;
  int sw = 4;
  QpBands bands;
  std::string corpus_dir;
  std::string out_dir = ".";
  std::vector<int> anchor_qps = {22, 27, 32, 37};
  bool bd_piecewise = false;
  int jobs = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

}  // namespace detail

/// Keys: filter_bank, layer, cu_size, input_size, rl_a, rl_b, rl_c1, rl_c2,
/// sw, qp_pre_band, qp_act_band, corpus_dir, out_dir, anchor_qps (comma
/// separated), bd_piecewise, jobs. Lines starting with '#' are comments.
inline void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    try {
      if (key == "filter_bank") {
        cfg.filter_bank = val;
      } else if (key == "layer") {
        cfg.layer = std::stoi(val);
      } else if (key == "cu_size") {
        cfg.cu_size = std::stoi(val);
      } else if (key == "input_size") {
        cfg.input_size = std::stoi(val);
      } else if (key == "rl_a") {
        cfg.model.a = std::stod(val);
      } else if (key == "rl_b") {
        cfg.model.b = std::stod(val);
      } else if (key == "rl_c1") {
        cfg.model.c1 = std::stod(val);
      } else if (key == "rl_c2") {
        cfg.model.c2 = std::stod(val);
      } else if (key == "sw") {
        cfg.sw = std::stoi(val);
      } else if (key == "qp_pre_band") {
        cfg.bands.pre = std::stoi(val);
      } else if (key == "qp_act_band") {
        cfg.bands.act = std::stoi(val);
      } else if (key == "corpus_dir") {
        cfg.corpus_dir = val;
      } else if (key == "out_dir") {
        cfg.out_dir = val;
      } else if (key == "anchor_qps") {
        cfg.anchor_qps = detail::parse_int_list(val);
      } else if (key == "bd_piecewise") {
        cfg.bd_piecewise = std::stoi(val) != 0;
      } else if (key == "jobs") {
        cfg.jobs = std::stoi(val);
      } else {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                                 "'");
      }
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad value for '" + key +
                               "'");
    }
  }
}

}  // namespace salrc
