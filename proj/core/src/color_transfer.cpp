#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "dmdbg/error.hpp"
#include "dmdbg/imaging.hpp"

namespace dmdbg {

namespace {

// RGB -> LMS as published by Reinhard et al. The way back uses the exact
// inverse of this matrix; the published LMS -> RGB matrix is its 4-digit
// rounding and would leave ~1e-4 drift in the matched statistics.
const Eigen::Matrix3d& rgb_to_lms() {
  static const Eigen::Matrix3d m = (Eigen::Matrix3d() << 0.3811, 0.5783, 0.0402,
                                    0.1967, 0.7244, 0.0782,
                                    0.0241, 0.1288, 0.8444).finished();
  return m;
}

const Eigen::Matrix3d& lms_to_rgb() {
  static const Eigen::Matrix3d m = rgb_to_lms().inverse();
  return m;
}

const Eigen::Matrix3d& log_lms_to_lab() {
  static const Eigen::Matrix3d m =
      Eigen::Vector3d(1.0 / std::sqrt(3.0), 1.0 / std::sqrt(6.0), 1.0 / std::sqrt(2.0)).asDiagonal() *
      (Eigen::Matrix3d() << 1, 1, 1, 1, 1, -2, 1, -1, 0).finished();
  return m;
}

const Eigen::Matrix3d& lab_to_log_lms() {
  static const Eigen::Matrix3d m =
      (Eigen::Matrix3d() << 1, 1, 1, 1, 1, -1, 1, -2, 0).finished() *
      Eigen::Vector3d(std::sqrt(3.0) / 3.0, std::sqrt(6.0) / 6.0, std::sqrt(2.0) / 2.0).asDiagonal();
  return m;
}

Eigen::Vector3d pixel(const ImageRgb& img, std::size_t i) {
  return {img.rgb[i * 3], img.rgb[i * 3 + 1], img.rgb[i * 3 + 2]};
}

void store(ImageRgb& img, std::size_t i, const Eigen::Vector3d& v) {
  img.rgb[i * 3] = v.x();
  img.rgb[i * 3 + 1] = v.y();
  img.rgb[i * 3 + 2] = v.z();
}

}  // namespace

ImageRgb rgb_to_lab(const ImageRgb& unit) {
  ImageRgb lab(unit.rows, unit.cols);
  for (std::size_t i = 0; i < unit.pixels(); ++i) {
    Eigen::Vector3d lms = rgb_to_lms() * pixel(unit, i);
    for (int c = 0; c < 3; ++c) lms(c) = std::log10(std::max(lms(c), kLmsFloor));
    store(lab, i, log_lms_to_lab() * lms);
  }
  return lab;
}

ImageRgb lab_to_rgb(const ImageRgb& lab) {
  ImageRgb rgb(lab.rows, lab.cols);
  for (std::size_t i = 0; i < lab.pixels(); ++i) {
    Eigen::Vector3d lms = lab_to_log_lms() * pixel(lab, i);
    for (int c = 0; c < 3; ++c) lms(c) = std::pow(10.0, lms(c));
    store(rgb, i, lms_to_rgb() * lms);
  }
  return rgb;
}

ColorStats lab_statistics(const ImageRgb& lab) {
  ColorStats stats;
  const std::size_t n = lab.pixels();
  if (n == 0) return stats;
  for (std::size_t c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += lab.rgb[i * 3 + c];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = lab.rgb[i * 3 + c] - mean;
      ss += d * d;
    }
    stats.mean[c] = mean;
    stats.stddev[c] = std::sqrt(ss / static_cast<double>(n));
  }
  return stats;
}

BackgroundModel reinhard_transfer(const ImageRgb& source_unit, const BackgroundModel& target) {
  const ImageRgb& tgt = target.image;
  if (source_unit.rows != tgt.rows || source_unit.cols != tgt.cols) {
    throw Error(ErrorCode::dimension_mismatch,
                "color transfer: source is " + std::to_string(source_unit.rows) + "x" +
                    std::to_string(source_unit.cols) + ", target is " + std::to_string(tgt.rows) +
                    "x" + std::to_string(tgt.cols));
  }
  const ColorStats src_stats = lab_statistics(rgb_to_lab(source_unit));
  ImageRgb lab = rgb_to_lab(tgt);
  const ColorStats tgt_stats = lab_statistics(lab);

  for (std::size_t c = 0; c < 3; ++c) {
    const double ratio =
        tgt_stats.stddev[c] < kStdFloor ? 1.0 : src_stats.stddev[c] / tgt_stats.stddev[c];
    for (std::size_t i = 0; i < lab.pixels(); ++i) {
      double& x = lab.rgb[i * 3 + c];
      x = (x - tgt_stats.mean[c]) * ratio + src_stats.mean[c];
    }
  }

  BackgroundModel out = target;
  out.image = lab_to_rgb(lab);
  for (double& v : out.image.rgb) v = std::clamp(v, 0.0, 1.0);
  out.color_transfer_applied = true;
  return out;
}

BackgroundModel reinhard_transfer(const Frame& source, const BackgroundModel& target) {
  return reinhard_transfer(to_unit_image(source), target);
}

}  // namespace dmdbg
