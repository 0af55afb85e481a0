#include "dmdbg/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "dmdbg/error.hpp"
#include "dmdbg/parallel.hpp"

namespace dmdbg {

namespace {

std::string dims(int rows, int cols) { return std::to_string(rows) + "x" + std::to_string(cols); }

void check_length(Index length, int rows, int cols) {
  const Index expected = Index{3} * rows * cols;
  if (length != expected) {
    throw Error(ErrorCode::dimension_mismatch,
                "vector of length " + std::to_string(length) + " cannot be unstacked into " +
                    dims(rows, cols) + "x3 (expected " + std::to_string(expected) + ")");
  }
}

template <typename Value>
ChannelPlanes unstack_with(int rows, int cols, Value value) {
  ChannelPlanes planes{rows, cols, {}};
  const std::size_t mn = static_cast<std::size_t>(rows) * cols;
  for (int ch = 0; ch < 3; ++ch) {
    auto& plane = planes.channel[static_cast<std::size_t>(ch)];
    plane.resize(mn);
    for (std::size_t i = 0; i < mn; ++i) plane[i] = value(static_cast<Index>(ch * mn + i));
  }
  return planes;
}

}  // namespace

FrameSequence make_sequence(std::vector<Frame> frames) {
  FrameSequence seq;
  if (!frames.empty()) {
    seq.rows = frames.front().rows;
    seq.cols = frames.front().cols;
  }
  std::string offenders;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].rows != seq.rows || frames[i].cols != seq.cols) {
      offenders += " #" + std::to_string(i) + " (" + dims(frames[i].rows, frames[i].cols) + ")";
    }
  }
  if (!offenders.empty()) {
    throw Error(ErrorCode::dimension_mismatch,
                "frames differ from " + dims(seq.rows, seq.cols) + ":" + offenders);
  }
  seq.source_names.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) seq.source_names.push_back("frame" + std::to_string(i));
  seq.frames = std::move(frames);
  return seq;
}

SnapshotMatrix build_data_matrix(const FrameSequence& seq) {
  SnapshotMatrix out;
  out.rows = seq.rows;
  out.cols = seq.cols;
  const Index mn = out.pixels();
  out.values.resize(3 * mn, static_cast<Index>(seq.size()));
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const Frame& f = seq.frames[k];
    auto column = out.values.col(static_cast<Index>(k));
    for (Index p = 0; p < mn; ++p) {
      const std::size_t base = static_cast<std::size_t>(p) * 3;
      column(p) = f.rgb[base];
      column(mn + p) = f.rgb[base + 1];
      column(2 * mn + p) = f.rgb[base + 2];
    }
  }
  return out;
}

ChannelPlanes unstack_vector(const Eigen::Ref<const Eigen::VectorXd>& v, int rows, int cols) {
  check_length(v.size(), rows, cols);
  return unstack_with(rows, cols, [&](Index i) { return v(i); });
}

ChannelPlanes unstack_vector(const Eigen::Ref<const Eigen::VectorXcd>& v, int rows, int cols) {
  check_length(v.size(), rows, cols);
  return unstack_with(rows, cols, [&](Index i) { return std::abs(v(i)); });
}

ChannelPlanes realize_mode(const Eigen::Ref<const Eigen::VectorXcd>& mode, int rows, int cols,
                           ModeRealization realization) {
  if (realization == ModeRealization::magnitude) return unstack_vector(mode, rows, cols);
  check_length(mode.size(), rows, cols);
  const std::complex<double> total = mode.sum();
  const std::complex<double> rotation =
      std::abs(total) > 0.0 ? std::conj(total) / std::abs(total) : std::complex<double>(1.0, 0.0);
  return unstack_with(rows, cols, [&](Index i) { return (mode(i) * rotation).real(); });
}

ImageRgb normalize_mode_image(const ChannelPlanes& planes, Normalization normalization) {
  const std::size_t mn = static_cast<std::size_t>(planes.rows) * planes.cols;
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  for (std::size_t ch = 0; ch < 3; ++ch) {
    const auto& plane = planes.channel[ch];
    if (plane.size() != mn) {
      throw Error(ErrorCode::dimension_mismatch, "plane size does not match image dimensions");
    }
    lo[ch] = std::numeric_limits<double>::infinity();
    hi[ch] = -std::numeric_limits<double>::infinity();
    for (double x : plane) {
      if (!std::isfinite(x)) throw Error(ErrorCode::non_finite, "mode image contains non-finite values");
      lo[ch] = std::min(lo[ch], x);
      hi[ch] = std::max(hi[ch], x);
    }
  }
  if (normalization == Normalization::joint) {
    const double jlo = *std::min_element(lo.begin(), lo.end());
    const double jhi = *std::max_element(hi.begin(), hi.end());
    lo.fill(jlo);
    hi.fill(jhi);
  }

  ImageRgb out(planes.rows, planes.cols);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    const auto& plane = planes.channel[ch];
    const double range = hi[ch] - lo[ch];
    for (std::size_t i = 0; i < mn; ++i) {
      out.rgb[i * 3 + ch] = range > 0.0 ? std::clamp((plane[i] - lo[ch]) / range, 0.0, 1.0) : 0.5;
    }
  }
  return out;
}

Frame statistical_mode_image(const FrameSequence& seq) {
  Frame out(seq.rows, seq.cols);
  if (seq.size() == 0) return out;
  const std::size_t values = out.rgb.size();
  const std::size_t rows = static_cast<std::size_t>(seq.rows);
  const std::size_t row_values = values / std::max<std::size_t>(rows, 1);
  parallel_for(rows, [&](std::size_t r) {
    std::array<std::uint32_t, 256> histogram{};
    for (std::size_t i = r * row_values; i < (r + 1) * row_values; ++i) {
      histogram.fill(0);
      for (const Frame& f : seq.frames) ++histogram[f.rgb[i]];
      std::size_t best = 0;
      for (std::size_t v = 1; v < 256; ++v) {
        if (histogram[v] > histogram[best]) best = v;
      }
      out.rgb[i] = static_cast<std::uint8_t>(best);
    }
  });
  return out;
}

Frame frame_from_planes(const ChannelPlanes& planes) {
  Frame out(planes.rows, planes.cols);
  const std::size_t mn = out.pixels();
  for (std::size_t ch = 0; ch < 3; ++ch) {
    for (std::size_t i = 0; i < mn; ++i) {
      const double v = std::clamp(std::round(planes.channel[ch][i]), 0.0, 255.0);
      out.rgb[i * 3 + ch] = static_cast<std::uint8_t>(v);
    }
  }
  return out;
}

ImageRgb to_unit_image(const Frame& frame) {
  ImageRgb out(frame.rows, frame.cols);
  std::transform(frame.rgb.begin(), frame.rgb.end(), out.rgb.begin(),
                 [](std::uint8_t v) { return v / 255.0; });
  return out;
}

ImageRgb to_byte_scale(const Frame& frame) {
  ImageRgb out(frame.rows, frame.cols);
  std::copy(frame.rgb.begin(), frame.rgb.end(), out.rgb.begin());
  return out;
}

ImageRgb to_byte_scale(const ImageRgb& unit) {
  ImageRgb out = unit;
  for (double& v : out.rgb) v *= 255.0;
  return out;
}

Frame quantize(const ImageRgb& unit) {
  Frame out(unit.rows, unit.cols);
  for (std::size_t i = 0; i < unit.rgb.size(); ++i) {
    const double scaled = std::clamp(unit.rgb[i], 0.0, 1.0) * 255.0;
    out.rgb[i] = static_cast<std::uint8_t>(std::lround(scaled));
  }
  return out;
}

}  // namespace dmdbg
