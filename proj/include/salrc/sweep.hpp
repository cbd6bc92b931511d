#pragma once

#include <filesystem>
#include <future>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "salrc/bd_metric.hpp"
#include "salrc/codec.hpp"
#include "salrc/config.hpp"
#include "salrc/conv.hpp"
#include "salrc/metrics.hpp"

namespace salrc {

struct EncodePoint {
  int anchor_qp = 0;
  std::int64_t target_bits = 0;  // 0 for the anchor itself
  std::int64_t bits = 0;         // payload bits
  double bpp = 0.0;
  double psnr_db = 0.0;
  double wpsnr_db = 0.0;
};

/// One corpus image: fixed-QP anchor points plus uniform- and
/// importance-guided rate-controlled points at the anchors' bit counts.
struct ImageSweepResult {
  std::string name;
  int width = 0;
  int height = 0;
  std::vector<EncodePoint> anchor;
  std::vector<EncodePoint> uniform_rc;
  std::vector<EncodePoint> guided_rc;
};

struct SweepReport {
  std::vector<ImageSweepResult> images;
  AccuracyStats dbpp_uniform;
  AccuracyStats dbpp_guided;
  double budget_err_uniform = 0.0;  // mean |achieved - target| / target
  double budget_err_guided = 0.0;
};

/// Runs the full pipeline on one image: importance map at cfg.layer, anchors
/// at cfg.anchor_qps, then both rate-controlled modes at the anchor bits.
inline ImageSweepResult sweep_image(const RunConfig& cfg, const FilterBank& bank,
                                    const std::string& path) {
  const Image img = load_image(path);
  ImageSweepResult res;
  res.name = std::filesystem::path(path).filename().string();
  res.width = img.width;
  res.height = img.height;

  const StackResult stack = run_stack(img, bank, cfg.layer, cfg.input_size);
  const FeatureTensor clamped = clamp_unit(stack.tensor);
  const ImportanceMap map = fuse(clamped, filter_weights(clamped));
  const BlockImportanceGrid guided = block_importance(map, cfg.cu_size, stack.scale);
  const BlockPartition part = BlockPartition::make(img.width, img.height, cfg.cu_size);
  const BlockImportanceGrid uniform = uniform_importance_grid(part);

  const double px = static_cast<double>(img.pixel_count());
  auto point = [&](const CodedImage& coded, int anchor_qp, std::int64_t target) {
    EncodePoint p;
    p.anchor_qp = anchor_qp;
    p.target_bits = target;
    p.bits = coded.payload_bits;
    p.bpp = coded.payload_bits / px;
    p.psnr_db = psnr(img, coded.recon);
    p.wpsnr_db = weighted_psnr(img, coded.recon, map);
    return p;
  };

  for (int qp : cfg.anchor_qps) {
    const CodedImage anchor = encode_fixed_qp(img, cfg.cu_size, qp);
    const std::int64_t target = anchor.payload_bits;
    res.anchor.push_back(point(anchor, qp, 0));
    if (target > 0) {
      const CodedImage uni =
          encode_rate_controlled(img, cfg.cu_size, target, uniform, cfg.model, cfg.bands, cfg.sw);
      const CodedImage gui =
          encode_rate_controlled(img, cfg.cu_size, target, guided, cfg.model, cfg.bands, cfg.sw);
      res.uniform_rc.push_back(point(uni, qp, target));
      res.guided_rc.push_back(point(gui, qp, target));
    }
  }
  return res;
}

inline SweepReport run_sweep(const RunConfig& cfg, const std::vector<std::string>& image_paths) {
  if (image_paths.empty()) throw std::invalid_argument("sweep: empty corpus");
  const FilterBank bank =
      cfg.filter_bank.empty() ? default_filter_bank() : load_filter_bank(cfg.filter_bank);
  if (cfg.layer < 1 || cfg.layer > bank.depth()) {
    throw std::invalid_argument("sweep: layer outside bank depth");
  }

  SweepReport report;
  report.images.resize(image_paths.size());
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < image_paths.size(); ++i) {
      report.images[i] = sweep_image(cfg, bank, image_paths[i]);
    }
  } else {
    std::vector<std::future<ImageSweepResult>> futures(image_paths.size());
    std::size_t next = 0;
    while (next < image_paths.size()) {
      const std::size_t batch = std::min<std::size_t>(jobs, image_paths.size() - next);
      for (std::size_t k = 0; k < batch; ++k) {
        const std::string& p = image_paths[next + k];
        futures[next + k] =
            std::async(std::launch::async, [&cfg, &bank, p] { return sweep_image(cfg, bank, p); });
      }
      for (std::size_t k = 0; k < batch; ++k) {
        report.images[next + k] = futures[next + k].get();
      }
      next += batch;
    }
  }

  // rate-control accuracy over all (image, target) pairs
  std::vector<std::int64_t> targets, uni_bits, gui_bits, pixels;
  for (const ImageSweepResult& im : report.images) {
    const std::int64_t px = static_cast<std::int64_t>(im.width) * im.height;
    for (std::size_t k = 0; k < im.uniform_rc.size(); ++k) {
      targets.push_back(im.uniform_rc[k].target_bits);
      uni_bits.push_back(im.uniform_rc[k].bits);
      gui_bits.push_back(im.guided_rc[k].bits);
      pixels.push_back(px);
    }
  }
  if (!targets.empty()) {
    report.dbpp_uniform = delta_bpp(targets, uni_bits, pixels);
    report.dbpp_guided = delta_bpp(targets, gui_bits, pixels);
    double eu = 0.0, eg = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      eu += std::fabs(static_cast<double>(uni_bits[i] - targets[i])) / targets[i];
      eg += std::fabs(static_cast<double>(gui_bits[i] - targets[i])) / targets[i];
    }
    report.budget_err_uniform = eu / targets.size();
    report.budget_err_guided = eg / targets.size();
  }
  return report;
}

enum class SweepMode { Anchor, UniformRc, GuidedRc };

inline const std::vector<EncodePoint>& sweep_points(const ImageSweepResult& im, SweepMode mode) {
  switch (mode) {
    case SweepMode::Anchor:
      return im.anchor;
    case SweepMode::UniformRc:
      return im.uniform_rc;
    default:
      return im.guided_rc;
  }
}

/// Corpus-pooled RD curve: mean bpp and mean quality per anchor QP.
inline RdCurve pooled_curve(const SweepReport& report, SweepMode mode, bool weighted) {
  if (report.images.empty()) throw std::invalid_argument("pooled_curve: empty report");
  const std::size_t npts = sweep_points(report.images.front(), mode).size();
  RdCurve curve(npts);
  for (std::size_t k = 0; k < npts; ++k) {
    double rate = 0.0, quality = 0.0;
    for (const ImageSweepResult& im : report.images) {
      const EncodePoint& p = sweep_points(im, mode)[k];
      rate += p.bpp;
      quality += weighted ? p.wpsnr_db : p.psnr_db;
    }
    curve[k].rate = rate / report.images.size();
    curve[k].quality = quality / report.images.size();
  }
  // anchor QPs descend in rate as QP grows; store by increasing rate
  std::sort(curve.begin(), curve.end(),
            [](const RdPoint& a, const RdPoint& b) { return a.rate < b.rate; });
  return curve;
}

inline RdCurve image_curve(const ImageSweepResult& im, SweepMode mode, bool weighted) {
  const std::vector<EncodePoint>& pts = sweep_points(im, mode);
  RdCurve curve(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    curve[k].rate = pts[k].bpp;
    curve[k].quality = weighted ? pts[k].wpsnr_db : pts[k].psnr_db;
  }
  std::sort(curve.begin(), curve.end(),
            [](const RdPoint& a, const RdPoint& b) { return a.rate < b.rate; });
  return curve;
}

inline void write_sweep_csv(const SweepReport& report, std::ostream& out) {
  out << "image,mode,anchor_qp,target_bits,bits,bpp,psnr_db,wpsnr_db\n";
  auto rows = [&out](const ImageSweepResult& im, const char* mode,
                     const std::vector<EncodePoint>& pts) {
    for (const EncodePoint& p : pts) {
      out << im.name << "," << mode << "," << p.anchor_qp << "," << p.target_bits << "," << p.bits
          << "," << std::setprecision(10) << p.bpp << "," << p.psnr_db << "," << p.wpsnr_db
          << "\n";
    }
  };
  for (const ImageSweepResult& im : report.images) {
    rows(im, "anchor", im.anchor);
    rows(im, "uniform_rc", im.uniform_rc);
    rows(im, "guided_rc", im.guided_rc);
  }
}

namespace detail {

struct BdSummary {
  double pooled = 0.0;
  double per_image_mean = 0.0;
  int per_image_count = 0;
};

inline BdSummary bd_summary(const SweepReport& report, SweepMode anchor_mode, SweepMode test_mode,
                            bool weighted, BdFit fit) {
  BdSummary s;
  s.pooled = bd_rate(pooled_curve(report, anchor_mode, weighted),
                     pooled_curve(report, test_mode, weighted), fit);
  double acc = 0.0;
  for (const ImageSweepResult& im : report.images) {
    try {
      acc += bd_rate(image_curve(im, anchor_mode, weighted), image_curve(im, test_mode, weighted),
                     fit);
      ++s.per_image_count;
    } catch (const std::invalid_argument&) {
      // per-image curve unusable (non-monotone or no overlap); skip it
    }
  }
  s.per_image_mean = s.per_image_count > 0 ? acc / s.per_image_count : 0.0;
  return s;
}

}  // namespace detail

/// Human-readable summary: rate-control accuracy and BD-rate tables over the
/// pooled and per-image-averaged curves, for PSNR and weighted PSNR.
inline void write_sweep_summary(const SweepReport& report, const RunConfig& cfg,
                                std::ostream& out) {
  out << std::fixed << std::setprecision(4);
  out << "images: " << report.images.size() << "  layer: " << cfg.layer
      << "  cu_size: " << cfg.cu_size << "\n";
  out << "anchor QPs:";
  for (int qp : cfg.anchor_qps) out << " " << qp;
  out << "\n\n";

  out << "rate-control accuracy vs. fixed-QP targets (all image/target pairs)\n";
  out << "  mode        delta_bpp   sigma_bpp   mean|rel budget err|\n";
  out << "  uniform_rc  " << std::setw(9) << report.dbpp_uniform.mean_abs_dev << "   "
      << std::setw(9) << report.dbpp_uniform.stddev << "   " << std::setw(8)
      << 100.0 * report.budget_err_uniform << "%\n";
  out << "  guided_rc   " << std::setw(9) << report.dbpp_guided.mean_abs_dev << "   "
      << std::setw(9) << report.dbpp_guided.stddev << "   " << std::setw(8)
      << 100.0 * report.budget_err_guided << "%\n\n";

  const BdFit fit = cfg.bd_piecewise ? BdFit::PiecewiseCubic : BdFit::CubicPoly;
  struct Row {
    const char* label;
    SweepMode anchor;
    SweepMode test;
  };
  const Row rows[] = {
      {"anchor vs uniform_rc", SweepMode::Anchor, SweepMode::UniformRc},
      {"anchor vs guided_rc ", SweepMode::Anchor, SweepMode::GuidedRc},
      {"uniform  vs guided_rc", SweepMode::UniformRc, SweepMode::GuidedRc},
  };
  out << "BD-rate tables (" << (cfg.bd_piecewise ? "piecewise cubic" : "cubic fit")
      << "; positive = test spends more bits at equal quality)\n";
  for (bool weighted : {false, true}) {
    out << (weighted ? "  quality metric: weighted PSNR (importance proxy)\n"
                     : "  quality metric: PSNR\n");
    for (const Row& r : rows) {
      try {
        const detail::BdSummary s = detail::bd_summary(report, r.anchor, r.test, weighted, fit);
        out << "    " << r.label << "  pooled " << std::setw(8) << s.pooled << "%   per-image "
            << std::setw(8) << s.per_image_mean << "% (" << s.per_image_count << "/"
            << report.images.size() << " images)\n";
      } catch (const std::invalid_argument& e) {
        out << "    " << r.label << "  unavailable (" << e.what() << ")\n";
      }
    }
  }

  int wins = 0;
  double mean_gain = 0.0;
  for (const ImageSweepResult& im : report.images) {
    double gain = 0.0;
    for (std::size_t k = 0; k < im.guided_rc.size(); ++k) {
      gain += im.guided_rc[k].wpsnr_db - im.uniform_rc[k].wpsnr_db;
    }
    if (!im.guided_rc.empty()) gain /= im.guided_rc.size();
    mean_gain += gain;
    if (gain > 0.05) ++wins;
  }
  if (!report.images.empty()) mean_gain /= report.images.size();
  out << "\nweighted-PSNR gain, guided over uniform at matched targets: mean " << mean_gain
      << " dB, wins " << wins << "/" << report.images.size() << " images (win: > 0.05 dB)\n";
}

}  // namespace salrc
