#include "dmdbg/pipeline.hpp"

#include <array>
#include <cmath>
#include <string>

#include "dmdbg/error.hpp"
#include "dmdbg/parallel.hpp"

namespace dmdbg {

void ExtractConfig::validate() const {
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) {
    throw Error(ErrorCode::usage, "rank tolerance must lie in (0, 1)");
  }
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) {
    throw Error(ErrorCode::usage, "time step must be positive");
  }
}

ExtractResult extract_background(const FrameSequence& seq, const ExtractConfig& config) {
  config.validate();
  if (seq.size() < 2) {
    throw Error(ErrorCode::sequence_too_short,
                "background extraction needs at least 2 frames, got " + std::to_string(seq.size()));
  }

  const SnapshotMatrix snapshots = build_data_matrix(seq);
  const SnapshotSplit split = split_snapshots(snapshots);
  const DmdResult dmd = decompose(
      snapshots, DmdOptions{config.rank_tol, config.delta_t, /*materialize_modes=*/false});
  const ModeSelection selection = select_background_mode(dmd, split);

  ExtractResult out;
  out.summary.frames = snapshots.frames();
  out.summary.rank = dmd.rank();
  out.summary.mode_index = selection.index;
  out.summary.abs_mu = selection.abs_mu;
  out.summary.sigma = dmd.sigma(selection.index);
  out.summary.mu = *dmd.mu[static_cast<std::size_t>(selection.index)];

  const ChannelPlanes planes =
      realize_mode(selection.background_vector, seq.rows, seq.cols, config.mode_realization);
  out.dmd.image = normalize_mode_image(planes, config.normalization);
  out.dmd.mode_index = selection.index;
  out.dmd.abs_mu = selection.abs_mu;

  if (config.color_transfer) {
    const Frame source = config.color_source == ColorSource::temporal_mode
                             ? statistical_mode_image(seq)
                             : median_baseline(seq);
    out.dmd_ct = reinhard_transfer(source, out.dmd);
  }
  return out;
}

Frame median_baseline(const FrameSequence& seq) {
  Frame out(seq.rows, seq.cols);
  const std::size_t n = seq.size();
  if (n == 0) return out;
  // Lower median: the ⌈N/2⌉-th smallest value, i.e. 0-based rank (N-1)/2.
  const std::uint32_t target = static_cast<std::uint32_t>((n - 1) / 2);
  const std::size_t rows = static_cast<std::size_t>(seq.rows);
  const std::size_t row_values = out.rgb.size() / std::max<std::size_t>(rows, 1);
  parallel_for(rows, [&](std::size_t r) {
    std::array<std::uint32_t, 256> histogram{};
    for (std::size_t i = r * row_values; i < (r + 1) * row_values; ++i) {
      histogram.fill(0);
      for (const Frame& f : seq.frames) ++histogram[f.rgb[i]];
      std::uint32_t seen = 0;
      std::size_t v = 0;
      for (; v < 256; ++v) {
        seen += histogram[v];
        if (seen > target) break;
      }
      out.rgb[i] = static_cast<std::uint8_t>(v);
    }
  });
  return out;
}

}  // namespace dmdbg
