#pragma once

#include <span>
#include <vector>

#include "dmdbg/imaging.hpp"

namespace dmdbg {

/// Reversible luminance/chrominance planes: Y = (R + 2G + B)/4, U = B − G,
/// V = R − G, kept in real arithmetic.
struct YuvPlanes {
  int rows = 0;
  int cols = 0;
  std::vector<double> y;
  std::vector<double> u;
  std::vector<double> v;
};

YuvPlanes rct_yuv(const ImageRgb& image);
/// G = Y − (U + V)/4, R = V + G, B = U + G
ImageRgb rct_inverse(const YuvPlanes& planes);

inline constexpr double kPsnrCap = 100.0;
inline constexpr double kPsnrPeak = 255.0;

struct Psnr {
  double db = 0.0;
  bool capped = false;
};

/// 10·log10(peak²/MSE); identical planes give kPsnrCap with capped set.
Psnr psnr(std::span<const double> a, std::span<const double> b, double peak = kPsnrPeak);

/// Luma/chroma weights of the CQM. Construction rejects weights that do not
/// sum to one.
class CqmWeights {
 public:
  CqmWeights() = default;
  CqmWeights(double luma, double chroma);

  double luma() const { return luma_; }
  double chroma() const { return chroma_; }

 private:
  double luma_ = 0.9449;
  double chroma_ = 0.0551;
};

struct CqmReport {
  double psnr_y = 0.0;
  double psnr_u = 0.0;
  double psnr_v = 0.0;
  double cqm = 0.0;
  bool capped = false;  // any plane hit the cap
  CqmWeights weights;
};

/// Both images on the 0–255 scale.
CqmReport cqm(const ImageRgb& ground_truth, const ImageRgb& background,
              const CqmWeights& weights = {});
CqmReport cqm(const Frame& ground_truth, const Frame& background,
              const CqmWeights& weights = {});

}  // namespace dmdbg
