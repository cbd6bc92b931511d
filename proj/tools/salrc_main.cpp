// salrc: importance-map extraction, importance-guided intra encoding, and
// RD evaluation tools around the block-transform toy codec.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "salrc/codec.hpp"
#include "salrc/config.hpp"
#include "salrc/conv.hpp"
#include "salrc/importance.hpp"
#include "salrc/metrics.hpp"
#include "salrc/sweep.hpp"

namespace fs = std::filesystem;
using namespace salrc;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string bank_path;
  int layer = 0;
  int cu = 0;
  int input_size = 0;
  int sw = 0;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "flat key=value config file");
  cmd->add_option("--bank", f.bank_path, "filter bank file (default: built-in bank)");
  cmd->add_option("--layer", f.layer, "feature layer for the importance map");
  cmd->add_option("--cu", f.cu, "coding unit size (8 or 16)");
  cmd->add_option("--input-size", f.input_size, "long-side size fed to layer 1");
  cmd->add_option("--sw", f.sw, "rate-control sliding window");
  cmd->add_option("--jobs", f.jobs, "parallel per-image jobs (sweep only)");
}

RunConfig resolve_config(const CLI::App* cmd, const CommonFlags& f) {
  RunConfig cfg;
  if (cmd->count("--config")) load_config_file(f.config_path, cfg);
  if (cmd->count("--bank")) cfg.filter_bank = f.bank_path;
  if (cmd->count("--layer")) cfg.layer = f.layer;
  if (cmd->count("--cu")) cfg.cu_size = f.cu;
  if (cmd->count("--input-size")) cfg.input_size = f.input_size;
  if (cmd->count("--sw")) cfg.sw = f.sw;
  if (cmd->count("--jobs")) cfg.jobs = f.jobs;
  return cfg;
}

FilterBank resolve_bank(const RunConfig& cfg) {
  return cfg.filter_bank.empty() ? default_filter_bank() : load_filter_bank(cfg.filter_bank);
}

void require_pipeline_size(const Image& img) {
  if (img.width < 16 || img.height < 16) {
    throw std::runtime_error("image must be at least 16x16 for the coding pipeline");
  }
}

ImportanceMap importance_for(const Image& img, const FilterBank& bank, const RunConfig& cfg,
                             ScaleInfo* scale_out) {
  if (cfg.layer < 1 || cfg.layer > bank.depth()) {
    throw std::runtime_error("layer " + std::to_string(cfg.layer) + " outside bank depth " +
                             std::to_string(bank.depth()));
  }
  const StackResult stack = run_stack(img, bank, cfg.layer, cfg.input_size);
  const FeatureTensor clamped = clamp_unit(stack.tensor);
  if (scale_out) *scale_out = stack.scale;
  return fuse(clamped, filter_weights(clamped));
}

void save_importance_pgm(const ImportanceMap& map, const std::string& path) {
  Image img = make_image(map.width, map.height);
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    img.samples[i] = static_cast<std::uint8_t>(std::lround(map.values[i] * 255.0));
  }
  save_pgm(img, path);
}

void write_grid_csv(const BlockImportanceGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV: " + path);
  out << "i,j,importance\n";
  for (int row = 0; row < grid.blocks_y; ++row) {
    for (int col = 0; col < grid.blocks_x; ++col) {
      out << col * grid.cu_size << "," << row * grid.cu_size << "," << std::setprecision(12)
          << grid.at(col, row) << "\n";
    }
  }
}

void write_block_csv(const std::vector<BlockRecord>& blocks, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV: " + path);
  out << "i,j,importance,qp_p,t_bits_blk,qp_a,bits_actual\n";
  out << std::setprecision(12);
  for (const BlockRecord& b : blocks) {
    out << b.x << "," << b.y << "," << b.importance << "," << b.qp_p << "," << b.t_bits_blk << ","
        << b.qp_a << "," << b.bits_actual << "\n";
  }
}

RdCurve load_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open curve file: " + path);
  RdCurve curve;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream ls(line);
    RdPoint p;
    if (ls >> p.rate >> p.quality) curve.push_back(p);
  }
  if (curve.empty()) throw std::runtime_error("no RD points in " + path);
  return curve;
}

std::vector<std::string> collect_corpus(const std::string& dir) {
  std::vector<std::string> paths;
  if (!fs::is_directory(dir)) throw std::runtime_error("corpus directory not found: " + dir);
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = e.path().extension().string();
    if (ext == ".pgm" || ext == ".ppm") paths.push_back(e.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw std::runtime_error("no .pgm/.ppm images in corpus: " + dir);
  return paths;
}

std::string out_path(const std::string& out_dir, const std::string& stem,
                     const std::string& suffix) {
  fs::create_directories(out_dir);
  return (fs::path(out_dir) / (stem + suffix)).string();
}

int cmd_importance(const CLI::App* cmd, const CommonFlags& flags, const std::string& input,
                   const std::string& out_dir) {
  RunConfig cfg = resolve_config(cmd, flags);
  const Image img = load_image(input);
  require_pipeline_size(img);
  const FilterBank bank = resolve_bank(cfg);
  ScaleInfo scale;
  const ImportanceMap map = importance_for(img, bank, cfg, &scale);
  const BlockImportanceGrid grid = block_importance(map, cfg.cu_size, scale);

  const std::string stem = fs::path(input).stem().string();
  const std::string pgm = out_path(out_dir, stem, "_imp_l" + std::to_string(cfg.layer) + ".pgm");
  const std::string csv = out_path(out_dir, stem, "_blocks.csv");
  save_importance_pgm(map, pgm);
  write_grid_csv(grid, csv);

  double sum = 0.0;
  for (double v : grid.importance) sum += v;
  if (std::fabs(sum - 1.0) > 1e-9) throw std::runtime_error("block importance does not sum to 1");

  std::cout << "importance map: " << pgm << " (" << map.width << "x" << map.height << ")\n"
            << "block grid:     " << csv << " (" << grid.blocks_x << "x" << grid.blocks_y
            << " blocks)\n";
  return 0;
}

int cmd_encode(const CLI::App* cmd, const CommonFlags& flags, const std::string& input,
               const std::string& out_dir, int fixed_qp, std::int64_t target_bits, bool uniform) {
  RunConfig cfg = resolve_config(cmd, flags);
  const Image img = load_image(input);
  require_pipeline_size(img);

  const bool fixed_mode = cmd->count("--qp") > 0;
  if (fixed_mode == (cmd->count("--target-bits") > 0)) {
    throw std::runtime_error("choose exactly one of --qp or --target-bits");
  }

  CodedImage coded;
  if (fixed_mode) {
    coded = encode_fixed_qp(img, cfg.cu_size, fixed_qp);
  } else {
    if (target_bits <= 0) throw std::runtime_error("--target-bits must be positive");
    const BlockPartition part = BlockPartition::make(img.width, img.height, cfg.cu_size);
    BlockImportanceGrid grid;
    if (uniform) {
      grid = uniform_importance_grid(part);
    } else {
      const FilterBank bank = resolve_bank(cfg);
      ScaleInfo scale;
      const ImportanceMap map = importance_for(img, bank, cfg, &scale);
      grid = block_importance(map, cfg.cu_size, scale);
    }
    coded = encode_rate_controlled(img, cfg.cu_size, target_bits, grid, cfg.model, cfg.bands,
                                   cfg.sw);
    // session invariants
    double wsum = 0.0;
    for (const BlockRecord& b : coded.blocks) {
      wsum += b.weight;
      const bool shifted = b.qp_p >= coded.qp_s + cfg.bands.pre;
      const int lo = std::max(kMinQp, shifted ? coded.qp_s : coded.qp_s - cfg.bands.act);
      const int hi =
          std::min(kMaxQp, shifted ? coded.qp_s + 2 * cfg.bands.act : coded.qp_s + cfg.bands.act);
      if (b.qp_a < lo || b.qp_a > hi) throw std::runtime_error("QP band violation");
    }
    if (std::fabs(wsum - 1.0) > 1e-9) throw std::runtime_error("block weights do not sum to 1");
  }

  const std::string stem = fs::path(input).stem().string();
  const std::string bit = out_path(out_dir, stem, ".bit");
  const std::string rec = out_path(out_dir, stem, "_recon.pgm");
  const std::string csv = out_path(out_dir, stem, "_blocks.csv");
  save_bitstream(coded.bytes, bit);
  save_pgm(coded.recon, rec);
  write_block_csv(coded.blocks, csv);

  const double px = static_cast<double>(img.pixel_count());
  std::cout << std::fixed << std::setprecision(4);
  std::cout << "bitstream: " << bit << "\n"
            << "recon:     " << rec << "\n"
            << "blocks:    " << csv << "\n"
            << "payload bits " << coded.payload_bits << " (" << coded.payload_bits / px
            << " bpp), PSNR " << psnr(img, coded.recon) << " dB\n";
  if (!fixed_mode) {
    const double err =
        std::fabs(static_cast<double>(coded.payload_bits) - target_bits) / target_bits;
    std::cout << "target " << target_bits << " bits, relative error " << 100.0 * err << "%\n";
  }
  return 0;
}

int cmd_decode(const std::string& input, const std::string& output) {
  const DecodedImage dec = decode(load_bitstream(input));
  save_pgm(dec.image, output);
  std::cout << "decoded " << input << " -> " << output << " (" << dec.image.width << "x"
            << dec.image.height << ")\n";
  return 0;
}

int cmd_sweep(const CLI::App* cmd, const CommonFlags& flags, const std::string& corpus,
              const std::string& out_dir) {
  RunConfig cfg = resolve_config(cmd, flags);
  if (!corpus.empty()) cfg.corpus_dir = corpus;
  const std::vector<std::string> paths = collect_corpus(cfg.corpus_dir);
  const SweepReport report = run_sweep(cfg, paths);

  fs::create_directories(out_dir);
  const std::string csv = (fs::path(out_dir) / "sweep.csv").string();
  const std::string summary = (fs::path(out_dir) / "summary.txt").string();
  {
    std::ofstream out(csv);
    if (!out) throw std::runtime_error("cannot write " + csv);
    write_sweep_csv(report, out);
  }
  {
    std::ofstream out(summary);
    if (!out) throw std::runtime_error("cannot write " + summary);
    write_sweep_summary(report, cfg, out);
  }
  write_sweep_summary(report, cfg, std::cout);
  std::cout << "\nwrote " << csv << " and " << summary << "\n";
  return 0;
}

int cmd_bdrate(const std::string& anchor_path, const std::string& test_path, bool piecewise) {
  const RdCurve anchor = load_curve_csv(anchor_path);
  const RdCurve test = load_curve_csv(test_path);
  const double bd = bd_rate(anchor, test, piecewise ? BdFit::PiecewiseCubic : BdFit::CubicPoly);
  std::cout << "BD-rate: " << std::fixed << std::setprecision(4) << bd << "%\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"importance-guided bit allocation over a block-transform toy codec"};
  app.require_subcommand(1);

  // importance
  CommonFlags imp_flags;
  std::string imp_input, imp_out = ".";
  CLI::App* imp = app.add_subcommand("importance", "extract importance map and block grid");
  imp->add_option("-i,--input", imp_input, "input image (PGM/PPM)")->required();
  imp->add_option("-o,--out", imp_out, "output directory");
  add_common(imp, imp_flags);

  // encode
  CommonFlags enc_flags;
  std::string enc_input, enc_out = ".";
  int enc_qp = 32;
  std::int64_t enc_target = 0;
  bool enc_uniform = false;
  CLI::App* enc = app.add_subcommand("encode", "encode with fixed QP or rate control");
  enc->add_option("-i,--input", enc_input, "input image (PGM/PPM)")->required();
  enc->add_option("-o,--out", enc_out, "output directory");
  enc->add_option("--qp", enc_qp, "fixed QP mode")->check(CLI::Range(0, 51));
  enc->add_option("--target-bits", enc_target, "rate-control mode: picture bit budget");
  enc->add_flag("--uniform", enc_uniform, "uniform importance instead of the feature stack");
  add_common(enc, enc_flags);

  // decode
  std::string dec_input, dec_output;
  CLI::App* dec = app.add_subcommand("decode", "decode a bitstream to PGM");
  dec->add_option("-i,--input", dec_input, "input bitstream")->required();
  dec->add_option("-o,--output", dec_output, "output PGM")->required();

  // sweep
  CommonFlags sw_flags;
  std::string sw_corpus, sw_out = ".";
  CLI::App* sw = app.add_subcommand("sweep", "anchor + rate-control sweep over a corpus");
  sw->add_option("--corpus", sw_corpus, "directory of PGM/PPM images");
  sw->add_option("-o,--out", sw_out, "output directory");
  add_common(sw, sw_flags);

  // bdrate
  std::string bd_anchor, bd_test;
  bool bd_piecewise = false;
  CLI::App* bd = app.add_subcommand("bdrate", "Bjontegaard delta rate between two curves");
  bd->add_option("--anchor", bd_anchor, "anchor curve CSV (rate,quality per line)")->required();
  bd->add_option("--test", bd_test, "test curve CSV")->required();
  bd->add_flag("--piecewise", bd_piecewise, "piecewise-cubic fit instead of the cubic polynomial");

  CLI11_PARSE(app, argc, argv);

  try {
    if (imp->parsed()) return cmd_importance(imp, imp_flags, imp_input, imp_out);
    if (enc->parsed())
      return cmd_encode(enc, enc_flags, enc_input, enc_out, enc_qp, enc_target, enc_uniform);
    if (dec->parsed()) return cmd_decode(dec_input, dec_output);
    if (sw->parsed()) return cmd_sweep(sw, sw_flags, sw_corpus, sw_out);
    if (bd->parsed()) return cmd_bdrate(bd_anchor, bd_test, bd_piecewise);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
