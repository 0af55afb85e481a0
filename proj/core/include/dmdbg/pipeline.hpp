#pragma once

#include <complex>
#include <optional>

#include "dmdbg/dmd.hpp"
#include "dmdbg/imaging.hpp"

namespace dmdbg {

/// Image the color statistics are transferred from.
enum class ColorSource { temporal_mode, temporal_median };

struct ExtractConfig {
  double rank_tol = kDefaultRankTol;
  double delta_t = kDefaultDeltaT;
  bool color_transfer = true;
  ColorSource color_source = ColorSource::temporal_mode;
  Normalization normalization = Normalization::per_channel;
  ModeRealization mode_realization = ModeRealization::magnitude;

  /// Throws ErrorCode::usage on out-of-range parameters.
  void validate() const;
};

struct DmdSummary {
  Index frames = 0;
  Index rank = 0;
  Index mode_index = -1;
  double abs_mu = 0.0;
  std::complex<double> sigma;
  std::complex<double> mu;
};

struct ExtractResult {
  BackgroundModel dmd;
  std::optional<BackgroundModel> dmd_ct;
  DmdSummary summary;
};

/// stack → split → SVD → Ĥ → eigenpairs → frequencies → selection → unstack
/// → normalise, then the optional color transfer. The decomposition runs
/// once; DMD and DMD_CT share the selected mode.
ExtractResult extract_background(const FrameSequence& seq, const ExtractConfig& config = {});

/// Per-pixel, per-channel lower temporal median (sorted index ⌈N/2⌉, 1-based).
Frame median_baseline(const FrameSequence& seq);

}  // namespace dmdbg
