#include "dmdbg/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "dmdbg/error.hpp"
#include "dmdbg/image_io.hpp"

namespace dmdbg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Portable uniform draws: std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
  }

 private:
  std::mt19937_64 engine_;
};

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "static") return SynthKind::static_scene;
  if (name == "moving-square") return SynthKind::moving_square;
  if (name == "two-mode") return SynthKind::two_mode;
  throw Error(ErrorCode::usage, "unknown synth kind '" + std::string(name) +
                                    "' (expected static, moving-square or two-mode)");
}

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::static_scene: return "static";
    case SynthKind::moving_square: return "moving-square";
    case SynthKind::two_mode: return "two-mode";
  }
  return "unknown";
}

Frame synth_background(int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  Frame out(height, width);
  std::vector<double> plane(out.pixels());
  for (int ch = 0; ch < 3; ++ch) {
    const double gx = rng.uniform(-1.0, 1.0);
    const double gy = rng.uniform(-1.0, 1.0);
    const double fx = rng.uniform(0.5, 3.0);
    const double fy = rng.uniform(0.5, 3.0);
    const double phase = rng.uniform(0.0, kTwoPi);
    const double bx = rng.uniform(0.2, 0.8);
    const double by = rng.uniform(0.2, 0.8);
    const double bs = rng.uniform(0.1, 0.3);
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const double x = width > 1 ? static_cast<double>(c) / (width - 1) : 0.0;
        const double y = height > 1 ? static_cast<double>(r) / (height - 1) : 0.0;
        const double blob = std::exp(-((x - bx) * (x - bx) + (y - by) * (y - by)) / (2.0 * bs * bs));
        plane[static_cast<std::size_t>(r) * width + c] =
            gx * x + gy * y + 0.5 * std::sin(kTwoPi * (fx * x + fy * y) + phase) + blob;
      }
    }
    const auto [lo, hi] = std::minmax_element(plane.begin(), plane.end());
    const double range = *hi - *lo;
    for (std::size_t i = 0; i < plane.size(); ++i) {
      out.rgb[i * 3 + static_cast<std::size_t>(ch)] =
          range > 0.0 ? to_byte(255.0 * (plane[i] - *lo) / range) : 128;
    }
  }
  return out;
}

SynthSequence synthesize(const SynthOptions& options) {
  if (options.frames < 2) throw Error(ErrorCode::usage, "synth needs at least 2 frames");
  if (options.width <= 0 || options.height <= 0) {
    throw Error(ErrorCode::usage, "synth dimensions must be positive");
  }
  const int m = options.height;
  const int n = options.width;
  const int frames = options.frames;

  SynthSequence out;
  out.options = options;
  const Frame background = synth_background(n, m, options.seed);
  out.ground_truth = background;
  Rng rng(options.seed ^ 0x9e3779b97f4a7c15ULL);

  switch (options.kind) {
    case SynthKind::static_scene: {
      out.frames.assign(static_cast<std::size_t>(frames), background);
      break;
    }
    case SynthKind::moving_square: {
      const int side = std::max(1, std::min(m, n) / 4);
      const std::array<std::uint8_t, 3> color{to_byte(rng.uniform(0, 255)), to_byte(rng.uniform(0, 255)),
                                              to_byte(rng.uniform(0, 255))};
      const double phase = rng.uniform(0.0, std::numbers::pi);
      std::vector<int> occlusion(background.pixels(), 0);
      for (int t = 0; t < frames; ++t) {
        // Left-to-right sweep with a vertical bounce.
        const double s = static_cast<double>(t) / (frames - 1);
        const int x0 = static_cast<int>(std::lround((n - side) * s));
        const int y0 = static_cast<int>(std::lround((m - side) * std::abs(std::sin(std::numbers::pi * s + phase))));
        Frame f = background;
        for (int r = y0; r < y0 + side; ++r) {
          for (int c = x0; c < x0 + side; ++c) {
            for (int ch = 0; ch < 3; ++ch) f.at(r, c, ch) = color[static_cast<std::size_t>(ch)];
            ++occlusion[static_cast<std::size_t>(r) * n + c];
          }
        }
        out.frames.push_back(std::move(f));
      }
      out.log.square_side = side;
      out.log.max_occlusion = *std::max_element(occlusion.begin(), occlusion.end());
      out.log.occluded_fraction =
          static_cast<double>(std::count_if(occlusion.begin(), occlusion.end(), [](int k) { return k > 0; })) /
          static_cast<double>(occlusion.size());
      if (2 * out.log.max_occlusion >= frames) {
        throw Error(ErrorCode::usage, "moving-square: image too small to keep every pixel visible in most frames");
      }
      break;
    }
    case SynthKind::two_mode: {
      if (options.flicker_period < 2) throw Error(ErrorCode::usage, "flicker period must be at least 2 frames");
      const Rect region{n / 3, m / 3, std::max(1, n / 3), std::max(1, m / 3)};
      constexpr double kAmplitude = 40.0;
      for (int t = 0; t < frames; ++t) {
        Frame f = background;
        for (int r = region.y; r < region.y + region.height; ++r) {
          for (int c = region.x; c < region.x + region.width; ++c) {
            const double wave = std::sin(kTwoPi * t / options.flicker_period +
                                         kTwoPi * (c - region.x) / region.width);
            for (int ch = 0; ch < 3; ++ch) {
              const double base = background.at(r, c, ch);
              // Amplitude limited so the signal never clips.
              const double amp = std::min({kAmplitude, base, 255.0 - base});
              f.at(r, c, ch) = to_byte(base + amp * wave);
            }
          }
        }
        out.frames.push_back(std::move(f));
      }
      out.log.flicker_region = region;
      out.log.flicker_period = options.flicker_period;
      out.log.flicker_abs_mu = kTwoPi / options.flicker_period;
      break;
    }
  }
  return out;
}

void write_synth(const SynthSequence& sequence, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out / "input", ec);
  fs::create_directories(out / "GT", ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + out.string() + ": " + ec.message());

  for (std::size_t t = 0; t < sequence.frames.size(); ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu.png", t);
    write_png(out / "input" / name, sequence.frames[t]);
  }
  write_png(out / "GT" / "gt.png", sequence.ground_truth);

  const SynthLog& log = sequence.log;
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(sequence.options.kind));
  j["frames"] = sequence.options.frames;
  j["width"] = sequence.options.width;
  j["height"] = sequence.options.height;
  j["seed"] = sequence.options.seed;
  if (sequence.options.kind == SynthKind::moving_square) {
    j["square_side"] = log.square_side;
    j["max_occlusion"] = log.max_occlusion;
    j["occluded_fraction"] = log.occluded_fraction;
  }
  if (sequence.options.kind == SynthKind::two_mode) {
    j["flicker_period"] = log.flicker_period;
    j["flicker_abs_mu"] = log.flicker_abs_mu;
    j["flicker_region"] = {{"x", log.flicker_region.x},
                           {"y", log.flicker_region.y},
                           {"width", log.flicker_region.width},
                           {"height", log.flicker_region.height}};
  }
  std::ofstream file(out / "synth.json");
  if (!file) throw Error(ErrorCode::io, "cannot write " + (out / "synth.json").string());
  file << j.dump(2) << '\n';
}

}  // namespace dmdbg
