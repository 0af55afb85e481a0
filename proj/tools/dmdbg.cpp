// dmdbg: color scene-background extraction with dynamic mode decomposition.
//
//   dmdbg extract  --input <frames dir> --output <dir>
//   dmdbg evaluate --gt <file> --input <background file> [--output report.json]
//   dmdbg bench    --dataset <root> --output <dir>
//   dmdbg synth    --kind moving-square --output <dir>
//
// Errors go to stderr; the last line is always "error_code=<code>".

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmdbg/bench.hpp"
#include "dmdbg/error.hpp"
#include "dmdbg/image_io.hpp"
#include "dmdbg/metrics.hpp"
#include "dmdbg/pipeline.hpp"
#include "dmdbg/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string input;
  std::string output;
  std::string gt;
  std::string dataset;
  std::string pattern;
  std::vector<std::string> sequences;
  double rank_tol = dmdbg::kDefaultRankTol;
  double delta_t = dmdbg::kDefaultDeltaT;
  std::string color_transfer = "both";
  std::string normalization = "per-channel";
  std::string mode_realization = "magnitude";
  std::string format = "json";
  std::string kind = "moving-square";
  std::uint64_t seed = 0;
  int frames = 40;
  int width = 64;
  int height = 48;
  int flicker_period = 8;
};

int fail(dmdbg::ErrorCode code, const std::string& message) {
  std::cerr << "dmdbg: " << message << '\n';
  std::cerr << "error_code=" << dmdbg::to_string(code) << '\n';
  return dmdbg::exit_code_for(code);
}

int run_extract(const Options& o) {
  const dmdbg::ColorTransferMode ct = dmdbg::parse_color_transfer(o.color_transfer);
  dmdbg::ExtractConfig config;
  config.rank_tol = o.rank_tol;
  config.delta_t = o.delta_t;
  config.color_transfer = ct != dmdbg::ColorTransferMode::off;
  config.normalization = dmdbg::parse_normalization(o.normalization);
  config.mode_realization = dmdbg::parse_mode_realization(o.mode_realization);
  config.validate();

  const dmdbg::FrameSequence seq = dmdbg::load_sequence(o.input, o.pattern);
  const dmdbg::ExtractResult result = dmdbg::extract_background(seq, config);

  const fs::path out(o.output);
  if (ct != dmdbg::ColorTransferMode::on) dmdbg::write_png(out / "DMD.png", dmdbg::quantize(result.dmd.image));
  if (result.dmd_ct) dmdbg::write_png(out / "DMD_CT.png", dmdbg::quantize(result.dmd_ct->image));

  const dmdbg::DmdSummary& s = result.summary;
  nlohmann::ordered_json j{{"frames", s.frames},
                           {"width", seq.cols},
                           {"height", seq.rows},
                           {"rank", s.rank},
                           {"mode_index", s.mode_index},
                           {"abs_mu", s.abs_mu},
                           {"sigma", {s.sigma.real(), s.sigma.imag()}},
                           {"mu", {s.mu.real(), s.mu.imag()}},
                           {"color_transfer", result.dmd_ct.has_value()}};
  std::ofstream(out / "extract.json") << j.dump(2) << '\n';

  std::printf("frames %lld  rank %lld\n", static_cast<long long>(s.frames), static_cast<long long>(s.rank));
  std::printf("selected mode %lld  |mu| = %.6e\n", static_cast<long long>(s.mode_index), s.abs_mu);
  return 0;
}

int run_evaluate(const Options& o) {
  const dmdbg::Frame gt = dmdbg::read_image(o.gt);
  const dmdbg::Frame bg = dmdbg::read_image(o.input);
  const dmdbg::CqmReport report = dmdbg::cqm(gt, bg);

  std::string body;
  if (o.format == "csv") {
    std::ostringstream os;
    dmdbg::write_csv(os, report);
    body = os.str();
  } else {
    body = dmdbg::to_json(report) + "\n";
  }
  std::cout << body;
  if (!o.output.empty()) {
    std::ofstream f(o.output);
    if (!f) throw dmdbg::Error(dmdbg::ErrorCode::io, "cannot write " + o.output);
    f << body;
  }
  return 0;
}

int run_bench(const Options& o) {
  dmdbg::BenchConfig config;
  config.dataset_root = o.dataset;
  config.sequences = o.sequences;
  config.rank_tol = o.rank_tol;
  config.delta_t = o.delta_t;
  config.color_transfer = dmdbg::parse_color_transfer(o.color_transfer);
  config.normalization = dmdbg::parse_normalization(o.normalization);
  config.mode_realization = dmdbg::parse_mode_realization(o.mode_realization);
  config.output_dir = o.output;

  const dmdbg::BenchReport report = dmdbg::run_bench(config);
  if (o.format == "csv") {
    dmdbg::write_csv(std::cout, report);
  } else {
    std::cout << dmdbg::to_json(report) << '\n';
  }
  return 0;
}

int run_synth(const Options& o) {
  dmdbg::SynthOptions options;
  options.kind = dmdbg::parse_synth_kind(o.kind);
  options.frames = o.frames;
  options.width = o.width;
  options.height = o.height;
  options.seed = o.seed;
  options.flicker_period = o.flicker_period;
  const dmdbg::SynthSequence seq = dmdbg::synthesize(options);
  dmdbg::write_synth(seq, o.output);
  std::printf("wrote %zu frames to %s\n", seq.frames.size(), o.output.c_str());
  if (options.kind == dmdbg::SynthKind::moving_square) {
    std::printf("max occlusion %d of %d frames\n", seq.log.max_occlusion, options.frames);
  }
  return 0;
}

void add_dmd_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--rank-tol", o.rank_tol, "Relative singular-value truncation threshold")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--delta-t", o.delta_t, "Time step between frames")->check(CLI::PositiveNumber);
  cmd->add_option("--color-transfer", o.color_transfer, "Color transfer output")
      ->check(CLI::IsMember({"on", "off", "both"}));
  cmd->add_option("--normalization", o.normalization, "Mode normalisation")
      ->check(CLI::IsMember({"per-channel", "joint"}));
  cmd->add_option("--mode-realization", o.mode_realization, "Complex mode to real image")
      ->check(CLI::IsMember({"magnitude", "real"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Color scene-background extraction with dynamic mode decomposition"};
  app.require_subcommand(1);
  Options o;

  auto* extract = app.add_subcommand("extract", "Extract DMD / DMD_CT backgrounds from a frame directory");
  extract->add_option("--input", o.input, "Directory of frames")->required();
  extract->add_option("--output", o.output, "Output directory")->required();
  extract->add_option("--pattern", o.pattern, "Filename filter, e.g. 'in*.png'");
  add_dmd_flags(extract, o);

  auto* evaluate = app.add_subcommand("evaluate", "CQM of a background against a ground truth");
  evaluate->add_option("--gt", o.gt, "Ground-truth image")->required();
  evaluate->add_option("--input", o.input, "Background image")->required();
  evaluate->add_option("--output", o.output, "Write the report to this file");
  evaluate->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));

  auto* bench = app.add_subcommand("bench", "Score DMD, DMD_CT and Median on a dataset directory");
  bench->add_option("--dataset", o.dataset, "Dataset root (<Sequence>/input, <Sequence>/GT)")->required();
  bench->add_option("--output", o.output, "Directory for backgrounds and reports");
  bench->add_option("--sequence", o.sequences, "Restrict to these sequence names");
  bench->add_option("--format", o.format, "Report printed to stdout")->check(CLI::IsMember({"csv", "json"}));
  add_dmd_flags(bench, o);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence with ground truth");
  synth->add_option("--kind", o.kind)->check(CLI::IsMember({"static", "moving-square", "two-mode"}));
  synth->add_option("--frames", o.frames)->check(CLI::Range(2, 100000));
  synth->add_option("--width", o.width)->check(CLI::PositiveNumber);
  synth->add_option("--height", o.height)->check(CLI::PositiveNumber);
  synth->add_option("--seed", o.seed);
  synth->add_option("--flicker-period", o.flicker_period)->check(CLI::Range(2, 100000));
  synth->add_option("--output", o.output, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fail(dmdbg::ErrorCode::usage, "invalid command line");
  }

  try {
    if (*extract) return run_extract(o);
    if (*evaluate) return run_evaluate(o);
    if (*bench) return run_bench(o);
    if (*synth) return run_synth(o);
  } catch (const dmdbg::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    std::cerr << "dmdbg: " << e.what() << '\n' << "error_code=internal\n";
    return dmdbg::exit_code::numerical;
  }
  return 0;
}
