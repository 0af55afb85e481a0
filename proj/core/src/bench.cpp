#include "dmdbg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "dmdbg/error.hpp"
#include "dmdbg/image_io.hpp"

namespace fs = std::filesystem;

namespace dmdbg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct SequenceDirs {
  std::string name;
  fs::path input;
  fs::path ground_truth;
};

std::vector<SequenceDirs> discover(const BenchConfig& config, std::vector<std::string>& warnings) {
  std::error_code ec;
  if (!fs::is_directory(config.dataset_root, ec)) {
    throw Error(ErrorCode::io, "dataset root is not a directory: " + config.dataset_root.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(config.dataset_root, ec)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end(), [](const fs::path& a, const fs::path& b) {
    return natural_less(a.filename().string(), b.filename().string());
  });

  std::vector<SequenceDirs> out;
  for (const auto& dir : dirs) {
    const std::string name = dir.filename().string();
    if (!config.sequences.empty() &&
        std::find(config.sequences.begin(), config.sequences.end(), name) == config.sequences.end()) {
      continue;
    }
    if (!fs::is_directory(dir / "input", ec)) {
      warnings.push_back("skipping " + name + ": no input/ directory");
      continue;
    }
    std::vector<fs::path> gt;
    if (fs::is_directory(dir / "GT", ec)) gt = list_images(dir / "GT");
    if (gt.empty()) {
      warnings.push_back("skipping " + name + ": no ground truth in GT/");
      continue;
    }
    out.push_back({name, dir / "input", gt.front()});
  }
  for (const auto& wanted : config.sequences) {
    if (std::none_of(dirs.begin(), dirs.end(), [&](const fs::path& d) { return d.filename() == wanted; })) {
      warnings.push_back("requested sequence not found: " + wanted);
    }
  }
  return out;
}

void write_background(const BenchConfig& config, const std::string& sequence, Method method,
                      const Frame& image) {
  if (config.output_dir.empty()) return;
  write_png(config.output_dir / sequence / (std::string(to_string(method)) + ".png"), image);
}

}  // namespace

ColorTransferMode parse_color_transfer(std::string_view s) {
  if (s == "on") return ColorTransferMode::on;
  if (s == "off") return ColorTransferMode::off;
  if (s == "both") return ColorTransferMode::both;
  throw Error(ErrorCode::usage, "color transfer must be on, off or both");
}

Normalization parse_normalization(std::string_view s) {
  if (s == "per-channel") return Normalization::per_channel;
  if (s == "joint") return Normalization::joint;
  throw Error(ErrorCode::usage, "normalization must be per-channel or joint");
}

ModeRealization parse_mode_realization(std::string_view s) {
  if (s == "magnitude") return ModeRealization::magnitude;
  if (s == "real") return ModeRealization::real_part;
  throw Error(ErrorCode::usage, "mode realization must be magnitude or real");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::dmd: return "DMD";
    case Method::dmd_ct: return "DMD_CT";
    case Method::median: return "Median";
  }
  return "unknown";
}

void BenchConfig::validate() const {
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw Error(ErrorCode::usage, "rank tolerance must lie in (0, 1)");
  if (!(delta_t > 0.0)) throw Error(ErrorCode::usage, "time step must be positive");
  if (dataset_root.empty()) throw Error(ErrorCode::usage, "dataset root is required");
}

BenchRow score_background(std::string sequence, Method method, const Frame& ground_truth,
                          const Frame& background, double seconds, Index n_frames) {
  BenchRow row;
  row.sequence = std::move(sequence);
  row.method = method;
  row.report = cqm(ground_truth, background);
  row.seconds = seconds;
  row.n_frames = n_frames;
  row.width = background.cols;
  row.height = background.rows;
  return row;
}

BenchReport run_bench(const BenchConfig& config) {
  config.validate();
  BenchReport report;
  const std::vector<SequenceDirs> sequences = discover(config, report.warnings);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  if (sequences.empty()) {
    throw Error(ErrorCode::io, "no usable sequences under " + config.dataset_root.string());
  }

  const bool want_dmd = config.color_transfer != ColorTransferMode::on;
  const bool want_ct = config.color_transfer != ColorTransferMode::off;

  for (const auto& seq_dirs : sequences) {
    std::vector<std::string> load_warnings;
    const FrameSequence seq = load_sequence(seq_dirs.input);
    const Frame gt = read_image(seq_dirs.ground_truth, &load_warnings);
    for (const auto& w : load_warnings) std::cerr << "warning: " << w << '\n';
    const Index n = static_cast<Index>(seq.size());

    ExtractConfig extract;
    extract.rank_tol = config.rank_tol;
    extract.delta_t = config.delta_t;
    extract.normalization = config.normalization;
    extract.mode_realization = config.mode_realization;
    extract.color_transfer = false;

    auto start = Clock::now();
    const ExtractResult result = extract_background(seq, extract);
    const double dmd_seconds = seconds_since(start);

    report.diagnostics.push_back({seq_dirs.name, n, seq.cols, seq.rows, result.summary});
    std::cerr << seq_dirs.name << ": N=" << n << " rank=" << result.summary.rank
              << " mode=" << result.summary.mode_index << " |mu|=" << result.summary.abs_mu << '\n';

    if (want_dmd) {
      const Frame image = quantize(result.dmd.image);
      write_background(config, seq_dirs.name, Method::dmd, image);
      report.rows.push_back(score_background(seq_dirs.name, Method::dmd, gt, image, dmd_seconds, n));
    }
    if (want_ct) {
      // Reuses the DMD background: the decomposition is not repeated.
      start = Clock::now();
      const BackgroundModel ct = reinhard_transfer(statistical_mode_image(seq), result.dmd);
      const double ct_seconds = dmd_seconds + seconds_since(start);
      const Frame image = quantize(ct.image);
      write_background(config, seq_dirs.name, Method::dmd_ct, image);
      report.rows.push_back(score_background(seq_dirs.name, Method::dmd_ct, gt, image, ct_seconds, n));
    }
    start = Clock::now();
    const Frame median = median_baseline(seq);
    const double median_seconds = seconds_since(start);
    write_background(config, seq_dirs.name, Method::median, median);
    report.rows.push_back(score_background(seq_dirs.name, Method::median, gt, median, median_seconds, n));
  }

  std::stable_sort(report.rows.begin(), report.rows.end(), [](const BenchRow& a, const BenchRow& b) {
    if (a.sequence != b.sequence) return natural_less(a.sequence, b.sequence);
    return a.method < b.method;
  });

  std::map<Method, AverageRow> averages;
  for (const auto& row : report.rows) {
    AverageRow& avg = averages[row.method];
    avg.method = row.method;
    avg.cqm += row.report.cqm;
    avg.psnr_y += row.report.psnr_y;
    avg.psnr_u += row.report.psnr_u;
    avg.psnr_v += row.report.psnr_v;
    avg.seconds += row.seconds;
    avg.capped = avg.capped || row.report.capped;
    ++avg.sequences;
  }
  for (auto& [method, avg] : averages) {
    const double k = avg.sequences;
    avg.cqm /= k;
    avg.psnr_y /= k;
    avg.psnr_u /= k;
    avg.psnr_v /= k;
    avg.seconds /= k;
    report.averages.push_back(avg);
  }

  if (!config.output_dir.empty()) write_report_files(config.output_dir, report);
  return report;
}

void write_csv(std::ostream& os, const BenchReport& report) {
  os << "sequence,method,cqm,psnr_y,psnr_u,psnr_v,capped,seconds,n_frames,width,height\n";
  for (const auto& row : report.rows) {
    os << csv_field(row.sequence) << ',' << to_string(row.method) << ',' << fixed(row.report.cqm) << ','
       << fixed(row.report.psnr_y) << ',' << fixed(row.report.psnr_u) << ','
       << fixed(row.report.psnr_v) << ',' << (row.report.capped ? "true" : "false") << ','
       << fixed(row.seconds) << ',' << row.n_frames << ',' << row.width << ',' << row.height << '\n';
  }
  for (const auto& avg : report.averages) {
    os << "AVG," << to_string(avg.method) << ',' << fixed(avg.cqm) << ',' << fixed(avg.psnr_y) << ','
       << fixed(avg.psnr_u) << ',' << fixed(avg.psnr_v) << ',' << (avg.capped ? "true" : "false")
       << ',' << fixed(avg.seconds) << ",,,\n";
  }
}

std::string to_json(const BenchReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"sequence", row.sequence},
                    {"method", std::string(to_string(row.method))},
                    {"cqm", row.report.cqm},
                    {"psnr_y", row.report.psnr_y},
                    {"psnr_u", row.report.psnr_u},
                    {"psnr_v", row.report.psnr_v},
                    {"capped", row.report.capped},
                    {"seconds", row.seconds},
                    {"n_frames", row.n_frames},
                    {"width", row.width},
                    {"height", row.height}});
  }
  for (const auto& avg : report.averages) {
    rows.push_back({{"sequence", "AVG"},
                    {"method", std::string(to_string(avg.method))},
                    {"cqm", avg.cqm},
                    {"psnr_y", avg.psnr_y},
                    {"psnr_u", avg.psnr_u},
                    {"psnr_v", avg.psnr_v},
                    {"capped", avg.capped},
                    {"seconds", avg.seconds},
                    {"n_frames", nullptr},
                    {"width", nullptr},
                    {"height", nullptr}});
  }
  return rows.dump(2);
}

void write_diagnostics_csv(std::ostream& os, const BenchReport& report) {
  os << "sequence,n_frames,width,height,rank,mode_index,abs_mu,sigma_re,sigma_im\n";
  for (const auto& d : report.diagnostics) {
    char mu[32];
    std::snprintf(mu, sizeof(mu), "%.6e", d.dmd.abs_mu);
    os << csv_field(d.sequence) << ',' << d.n_frames << ',' << d.width << ',' << d.height << ','
       << d.dmd.rank << ',' << d.dmd.mode_index << ',' << mu << ',' << fixed(d.dmd.sigma.real())
       << ',' << fixed(d.dmd.sigma.imag()) << '\n';
  }
}

void write_report_files(const fs::path& dir, const BenchReport& report) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw Error(ErrorCode::io, "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("report.csv");
    write_csv(f, report);
  }
  {
    auto f = open("report.json");
    f << to_json(report) << '\n';
  }
  {
    auto f = open("diagnostics.csv");
    write_diagnostics_csv(f, report);
  }
}

std::string to_json(const CqmReport& report) {
  nlohmann::ordered_json j{{"psnrY", report.psnr_y},
                           {"psnrU", report.psnr_u},
                           {"psnrV", report.psnr_v},
                           {"cqm", report.cqm},
                           {"capped", report.capped}};
  return j.dump(2);
}

void write_csv(std::ostream& os, const CqmReport& report) {
  os << "psnr_y,psnr_u,psnr_v,cqm,capped\n"
     << fixed(report.psnr_y) << ',' << fixed(report.psnr_u) << ',' << fixed(report.psnr_v) << ','
     << fixed(report.cqm) << ',' << (report.capped ? "true" : "false") << '\n';
}

}  // namespace dmdbg
