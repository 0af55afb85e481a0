#pragma once

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dmdbg/metrics.hpp"
#include "dmdbg/pipeline.hpp"

namespace dmdbg {

enum class ColorTransferMode { on, off, both };
enum class Method { dmd, dmd_ct, median };

ColorTransferMode parse_color_transfer(std::string_view s);
Normalization parse_normalization(std::string_view s);
ModeRealization parse_mode_realization(std::string_view s);
std::string_view to_string(Method method);

/// Dataset layout: <root>/<Sequence>/input/*.{png,jpg,...} and
/// <root>/<Sequence>/GT/<one image>.
struct BenchConfig {
  std::filesystem::path dataset_root;
  std::vector<std::string> sequences;  // empty: every sequence directory
  double rank_tol = kDefaultRankTol;
  double delta_t = kDefaultDeltaT;
  ColorTransferMode color_transfer = ColorTransferMode::both;
  Normalization normalization = Normalization::per_channel;
  ModeRealization mode_realization = ModeRealization::magnitude;
  std::filesystem::path output_dir;

  void validate() const;
};

struct BenchRow {
  std::string sequence;
  Method method = Method::dmd;
  CqmReport report;
  double seconds = 0.0;
  Index n_frames = 0;
  int width = 0;
  int height = 0;
};

struct AverageRow {
  Method method = Method::dmd;
  double cqm = 0.0;
  double psnr_y = 0.0;
  double psnr_u = 0.0;
  double psnr_v = 0.0;
  bool capped = false;
  double seconds = 0.0;
  int sequences = 0;
};

struct SequenceDiagnostics {
  std::string sequence;
  Index n_frames = 0;
  int width = 0;
  int height = 0;
  DmdSummary dmd;
};

struct BenchReport {
  std::vector<BenchRow> rows;        // ordered by sequence, then method
  std::vector<AverageRow> averages;  // one per method present
  std::vector<SequenceDiagnostics> diagnostics;
  std::vector<std::string> warnings;
};

/// Runs every selected sequence, writes <output_dir>/<Sequence>/{DMD,DMD_CT,
/// Median}.png when an output directory is set, and returns the rows.
BenchReport run_bench(const BenchConfig& config);

/// Scores one background against a ground truth the same way run_bench does.
BenchRow score_background(std::string sequence, Method method, const Frame& ground_truth,
                          const Frame& background, double seconds, Index n_frames);

// Report formats. CSV header:
// sequence,method,cqm,psnr_y,psnr_u,psnr_v,capped,seconds,n_frames,width,height
// Average rows use the sequence name "AVG" and leave the size columns empty.
void write_csv(std::ostream& os, const BenchReport& report);
std::string to_json(const BenchReport& report);
void write_diagnostics_csv(std::ostream& os, const BenchReport& report);
/// report.csv, report.json and diagnostics.csv under dir.
void write_report_files(const std::filesystem::path& dir, const BenchReport& report);

/// {"psnrY", "psnrU", "psnrV", "cqm", "capped"}
std::string to_json(const CqmReport& report);
void write_csv(std::ostream& os, const CqmReport& report);

}  // namespace dmdbg
