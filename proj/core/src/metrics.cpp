#include "dmdbg/metrics.hpp"

#include <cmath>
#include <string>

#include "dmdbg/error.hpp"

namespace dmdbg {

YuvPlanes rct_yuv(const ImageRgb& image) {
  YuvPlanes out{image.rows, image.cols, {}, {}, {}};
  const std::size_t n = image.pixels();
  out.y.resize(n);
  out.u.resize(n);
  out.v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = image.rgb[i * 3];
    const double g = image.rgb[i * 3 + 1];
    const double b = image.rgb[i * 3 + 2];
    out.y[i] = (r + 2.0 * g + b) / 4.0;
    out.u[i] = b - g;
    out.v[i] = r - g;
  }
  return out;
}

ImageRgb rct_inverse(const YuvPlanes& planes) {
  ImageRgb out(planes.rows, planes.cols);
  for (std::size_t i = 0; i < out.pixels(); ++i) {
    const double g = planes.y[i] - (planes.u[i] + planes.v[i]) / 4.0;
    out.rgb[i * 3] = planes.v[i] + g;
    out.rgb[i * 3 + 1] = g;
    out.rgb[i * 3 + 2] = planes.u[i] + g;
  }
  return out;
}

Psnr psnr(std::span<const double> a, std::span<const double> b, double peak) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dimension_mismatch, "psnr: plane sizes differ (" +
                                                   std::to_string(a.size()) + " vs " +
                                                   std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw Error(ErrorCode::dimension_mismatch, "psnr: empty planes");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.size());
  if (mse == 0.0) return {kPsnrCap, true};
  return {10.0 * std::log10(peak * peak / mse), false};
}

CqmWeights::CqmWeights(double luma, double chroma) : luma_(luma), chroma_(chroma) {
  if (!(luma >= 0.0 && chroma >= 0.0) || std::abs(luma + chroma - 1.0) > 1e-12) {
    throw Error(ErrorCode::usage, "CQM weights must be non-negative and sum to 1");
  }
}

CqmReport cqm(const ImageRgb& ground_truth, const ImageRgb& background,
              const CqmWeights& weights) {
  if (ground_truth.rows != background.rows || ground_truth.cols != background.cols) {
    throw Error(ErrorCode::dimension_mismatch,
                "cqm: ground truth is " + std::to_string(ground_truth.rows) + "x" +
                    std::to_string(ground_truth.cols) + ", background is " +
                    std::to_string(background.rows) + "x" + std::to_string(background.cols));
  }
  const YuvPlanes gt = rct_yuv(ground_truth);
  const YuvPlanes bg = rct_yuv(background);
  const Psnr y = psnr(gt.y, bg.y);
  const Psnr u = psnr(gt.u, bg.u);
  const Psnr v = psnr(gt.v, bg.v);

  CqmReport report;
  report.psnr_y = y.db;
  report.psnr_u = u.db;
  report.psnr_v = v.db;
  report.capped = y.capped || u.capped || v.capped;
  report.weights = weights;
  report.cqm = y.db * weights.luma() + ((u.db + v.db) / 2.0) * weights.chroma();
  return report;
}

CqmReport cqm(const Frame& ground_truth, const Frame& background, const CqmWeights& weights) {
  return cqm(to_byte_scale(ground_truth), to_byte_scale(background), weights);
}

}  // namespace dmdbg
