#include "dmdbg/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "dmdbg/error.hpp"

namespace fs = std::filesystem;

namespace dmdbg {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

char fold(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), fold);
  return s;
}

bool has_image_extension(const fs::path& p) {
  const std::string ext = lower(p.extension().string());
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

}  // namespace

bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      // Compare without leading zeros: longer run is larger, else lexicographic.
      std::size_t is = i;
      std::size_t js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      const std::string_view da = a.substr(is, ie - is);
      const std::string_view db = b.substr(js, je - js);
      if (da.size() != db.size()) return da.size() < db.size();
      if (da != db) return da < db;
      // Equal values: fewer leading zeros first.
      if (ie - i != je - j) return ie - i < je - j;
      i = ie;
      j = je;
      continue;
    }
    const char ca = fold(a[i]);
    const char cb = fold(b[j]);
    if (ca != cb) return ca < cb;
    ++i;
    ++j;
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  return a < b;
}

bool glob_match(std::string_view pattern, std::string_view name) {
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t star = std::string_view::npos;
  std::size_t resume = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      resume = n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++resume;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<fs::path> list_images(const fs::path& directory, std::string_view pattern) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw Error(ErrorCode::io, "not a directory: " + directory.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory, ec)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const bool wanted = pattern.empty() ? has_image_extension(entry.path()) : glob_match(pattern, name);
    if (wanted) files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::io, "cannot list " + directory.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(), [](const fs::path& x, const fs::path& y) {
    return natural_less(x.filename().string(), y.filename().string());
  });
  return files;
}

Frame read_image(const fs::path& file, std::vector<std::string>* warnings) {
  cv::Mat img = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw Error(ErrorCode::io, "cannot decode image: " + file.string());

  if (img.depth() == CV_16U) {
    img.convertTo(img, CV_8U, 1.0 / 257.0);
  } else if (img.depth() != CV_8U) {
    throw Error(ErrorCode::io, "unsupported sample type in " + file.string());
  }

  const int channels = img.channels();
  if (channels != 1 && channels != 3 && channels != 4) {
    throw Error(ErrorCode::io, "unsupported channel count " + std::to_string(channels) + " in " +
                                   file.string());
  }
  if (channels == 1 && warnings != nullptr) {
    warnings->push_back("grayscale image replicated to RGB: " + file.string());
  }

  Frame frame(img.rows, img.cols);
  for (int r = 0; r < img.rows; ++r) {
    const std::uint8_t* row = img.ptr<std::uint8_t>(r);
    for (int c = 0; c < img.cols; ++c) {
      const std::uint8_t* px = row + static_cast<std::size_t>(c) * channels;
      if (channels == 1) {
        frame.at(r, c, 0) = frame.at(r, c, 1) = frame.at(r, c, 2) = px[0];
      } else {
        // OpenCV stores BGR(A).
        frame.at(r, c, 0) = px[2];
        frame.at(r, c, 1) = px[1];
        frame.at(r, c, 2) = px[0];
      }
    }
  }
  return frame;
}

FrameSequence load_sequence(const fs::path& directory, std::string_view pattern) {
  const std::vector<fs::path> files = list_images(directory, pattern);
  if (files.empty()) throw Error(ErrorCode::io, "no image files in " + directory.string());

  FrameSequence seq;
  seq.frames.reserve(files.size());
  for (const auto& f : files) {
    seq.frames.push_back(read_image(f, &seq.warnings));
    seq.source_names.push_back(f.filename().string());
  }
  seq.rows = seq.frames.front().rows;
  seq.cols = seq.frames.front().cols;

  std::string offenders;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const Frame& f = seq.frames[i];
    if (f.rows != seq.rows || f.cols != seq.cols) {
      offenders += " " + seq.source_names[i] + " (" + std::to_string(f.rows) + "x" +
                   std::to_string(f.cols) + ")";
    }
  }
  if (!offenders.empty()) {
    throw Error(ErrorCode::dimension_mismatch,
                "frames differ from " + std::to_string(seq.rows) + "x" + std::to_string(seq.cols) +
                    ":" + offenders);
  }
  for (const auto& w : seq.warnings) std::cerr << "warning: " << w << '\n';
  return seq;
}

void write_png(const fs::path& file, const Frame& frame) {
  cv::Mat img(frame.rows, frame.cols, CV_8UC3);
  for (int r = 0; r < frame.rows; ++r) {
    std::uint8_t* row = img.ptr<std::uint8_t>(r);
    for (int c = 0; c < frame.cols; ++c) {
      row[c * 3] = frame.at(r, c, 2);
      row[c * 3 + 1] = frame.at(r, c, 1);
      row[c * 3 + 2] = frame.at(r, c, 0);
    }
  }
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  bool ok = false;
  try {
    ok = cv::imwrite(file.string(), img);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::io, "cannot write " + file.string() + ": " + e.what());
  }
  if (!ok) throw Error(ErrorCode::io, "cannot write " + file.string());
}

}  // namespace dmdbg
