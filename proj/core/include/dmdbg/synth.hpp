#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dmdbg/imaging.hpp"

namespace dmdbg {

enum class SynthKind { static_scene, moving_square, two_mode };

/// "static", "moving-square", "two-mode"; anything else is a usage error.
SynthKind parse_synth_kind(std::string_view name);
std::string_view to_string(SynthKind kind);

struct SynthOptions {
  SynthKind kind = SynthKind::moving_square;
  int frames = 40;
  int width = 64;
  int height = 48;
  std::uint64_t seed = 0;
  /// Temporal period of the two-mode flicker, in frames.
  int flicker_period = 8;
};

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool contains(int r, int c) const { return c >= x && c < x + width && r >= y && r < y + height; }
};

/// Construction record written next to the frames.
struct SynthLog {
  int max_occlusion = 0;          // frames in which the most-covered pixel is hidden
  double occluded_fraction = 0.0; // share of pixels hidden in at least one frame
  int square_side = 0;
  Rect flicker_region;
  int flicker_period = 0;
  double flicker_abs_mu = 0.0;    // |ln σ| of the flicker eigenvalues, δt = 1
};

struct SynthSequence {
  SynthOptions options;
  std::vector<Frame> frames;
  Frame ground_truth;
  SynthLog log;
};

/// Textured background whose channels each span exactly [0,255].
Frame synth_background(int width, int height, std::uint64_t seed);

/// Deterministic for a fixed seed.
SynthSequence synthesize(const SynthOptions& options);

/// Writes <out>/input/frame_NNNN.png, <out>/GT/gt.png and <out>/synth.json,
/// which is the dataset layout that bench reads.
void write_synth(const SynthSequence& sequence, const std::filesystem::path& out);

}  // namespace dmdbg
