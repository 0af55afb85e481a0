#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmdbg/dmd.hpp"

namespace dmdbg {

/// 8-bit RGB frame, interleaved, row-major.
struct Frame {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> rgb;

  Frame() = default;
  Frame(int rows_, int cols_)
      : rows(rows_), cols(cols_), rgb(static_cast<std::size_t>(rows_) * cols_ * 3, 0) {}

  std::uint8_t& at(int r, int c, int ch) {
    return rgb[(static_cast<std::size_t>(r) * cols + c) * 3 + ch];
  }
  std::uint8_t at(int r, int c, int ch) const {
    return rgb[(static_cast<std::size_t>(r) * cols + c) * 3 + ch];
  }
  std::size_t pixels() const { return static_cast<std::size_t>(rows) * cols; }

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct FrameSequence {
  int rows = 0;
  int cols = 0;
  std::vector<Frame> frames;
  std::vector<std::string> source_names;
  /// Non-fatal conditions met while loading (e.g. grayscale replication).
  std::vector<std::string> warnings;

  std::size_t size() const { return frames.size(); }
};

/// Builds a sequence from in-memory frames; throws dimension_mismatch when the
/// frames differ in size.
FrameSequence make_sequence(std::vector<Frame> frames);

/// Real-valued RGB image, interleaved, row-major. The value scale is
/// contextual: backgrounds live in [0,1], metric inputs in [0,255].
struct ImageRgb {
  int rows = 0;
  int cols = 0;
  std::vector<double> rgb;

  ImageRgb() = default;
  ImageRgb(int rows_, int cols_)
      : rows(rows_), cols(cols_), rgb(static_cast<std::size_t>(rows_) * cols_ * 3, 0.0) {}

  double& at(int r, int c, int ch) { return rgb[(static_cast<std::size_t>(r) * cols + c) * 3 + ch]; }
  double at(int r, int c, int ch) const {
    return rgb[(static_cast<std::size_t>(r) * cols + c) * 3 + ch];
  }
  std::size_t pixels() const { return static_cast<std::size_t>(rows) * cols; }
};

/// Three separate row-major planes (R, G, B).
struct ChannelPlanes {
  int rows = 0;
  int cols = 0;
  std::array<std::vector<double>, 3> channel;
};

struct BackgroundModel {
  ImageRgb image;  // channels in [0,1]
  Index mode_index = -1;
  double abs_mu = 0.0;
  bool color_transfer_applied = false;
};

/// Per-channel mean and standard deviation in lαβ space.
struct ColorStats {
  std::array<double, 3> mean{};
  std::array<double, 3> stddev{};
};

enum class Normalization { per_channel, joint };
enum class ModeRealization { magnitude, real_part };

SnapshotMatrix build_data_matrix(const FrameSequence& seq);

ChannelPlanes unstack_vector(const Eigen::Ref<const Eigen::VectorXd>& v, int rows, int cols);
/// Complex entries are replaced by their magnitudes.
ChannelPlanes unstack_vector(const Eigen::Ref<const Eigen::VectorXcd>& v, int rows, int cols);

/// Turns a complex mode into real planes. real_part first rotates the mode by
/// a unit phase so that its entry sum is real and non-negative.
ChannelPlanes realize_mode(const Eigen::Ref<const Eigen::VectorXcd>& mode, int rows, int cols,
                           ModeRealization realization);

/// Min-max scaling to [0,1]; a constant channel (or constant image in joint
/// mode) maps to 0.5.
ImageRgb normalize_mode_image(const ChannelPlanes& planes,
                              Normalization normalization = Normalization::per_channel);

/// Per-pixel, per-channel most frequent 8-bit value over time; ties go to the
/// smallest value.
Frame statistical_mode_image(const FrameSequence& seq);

/// Rounds planes to the nearest integer and clamps to [0,255].
Frame frame_from_planes(const ChannelPlanes& planes);

ImageRgb to_unit_image(const Frame& frame);    // [0,255] -> [0,1]
ImageRgb to_byte_scale(const Frame& frame);    // values kept in [0,255]
ImageRgb to_byte_scale(const ImageRgb& unit);  // [0,1] -> [0,255]
/// [0,1] -> 8-bit, rounding half away from zero.
Frame quantize(const ImageRgb& unit);

// Reinhard color transfer in lαβ space.

/// RGB -> LMS -> log10 -> lαβ, LMS clamped to at least kLmsFloor.
ImageRgb rgb_to_lab(const ImageRgb& unit);
ImageRgb lab_to_rgb(const ImageRgb& lab);
ColorStats lab_statistics(const ImageRgb& lab);

inline constexpr double kLmsFloor = 1e-4;
inline constexpr double kStdFloor = 1e-12;

BackgroundModel reinhard_transfer(const ImageRgb& source_unit, const BackgroundModel& target);
BackgroundModel reinhard_transfer(const Frame& source, const BackgroundModel& target);

}  // namespace dmdbg
