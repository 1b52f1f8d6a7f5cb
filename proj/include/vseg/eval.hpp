#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/image.hpp"

namespace vseg {

/// Per-sequence XOR error: per-frame differing-pixel counts and their mean over frames.
struct SequenceReport {
  std::string name;
  std::vector<long long> frame_errors;
  double mean_error = 0.0;  // sum(frame_errors) / frames
  int frames = 0;
  std::vector<std::pair<std::string, double>> stage_seconds;  // optional runtime breakdown
};

/// Counts pixels where exactly one of the masks is nonzero, frame by frame.
inline SequenceReport xor_error(const MaskSequence& result, const MaskSequence& truth, std::string name = {}) {
  if (result.size() != truth.size()) {
    throw dimension_error("result has " + std::to_string(result.size()) + " frames, ground truth has " +
                          std::to_string(truth.size()) + "; first unmatched frame is " +
                          std::to_string(std::min(result.size(), truth.size())));
  }
  SequenceReport r;
  r.name = std::move(name);
  r.frames = static_cast<int>(result.size());
  long long total = 0;
  for (std::size_t f = 0; f < result.size(); ++f) {
    const ImageU8& a = result.frames[f];
    const ImageU8& b = truth.frames[f];
    if (a.width() != b.width() || a.height() != b.height() || a.channels() != 1 || b.channels() != 1) {
      throw dimension_error("frame " + std::to_string(f) + ": result is " + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + ", ground truth is " + std::to_string(b.width()) + "x" +
                            std::to_string(b.height()));
    }
    long long n = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) n += (a.data()[i] != 0) != (b.data()[i] != 0);
    r.frame_errors.push_back(n);
    total += n;
  }
  r.mean_error = r.frames == 0 ? 0.0 : static_cast<double>(total) / r.frames;
  return r;
}

struct Confusion {
  long long tp = 0, fp = 0, fn = 0, tn = 0;

  double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp); }
  double recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn); }
  /// Harmonic mean of precision and recall; 1 when both masks are empty.
  double f_measure() const {
    if (tp == 0) return (fp == 0 && fn == 0) ? 1.0 : 0.0;
    return 2.0 * precision() * recall() / (precision() + recall());
  }
};

/// Foreground confusion counts summed over every frame.
inline Confusion confusion(const MaskSequence& result, const MaskSequence& truth) {
  if (result.size() != truth.size()) throw dimension_error("mask sequences differ in length");
  Confusion c;
  for (std::size_t f = 0; f < result.size(); ++f) {
    const auto a = result.frames[f].data();
    const auto b = truth.frames[f].data();
    if (a.size() != b.size()) throw dimension_error("frame " + std::to_string(f) + " differs in size");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const bool p = a[i] != 0, t = b[i] != 0;
      c.tp += p && t;
      c.fp += p && !t;
      c.fn += !p && t;
      c.tn += !p && !t;
    }
  }
  return c;
}

inline double f_measure(const MaskSequence& result, const MaskSequence& truth) {
  return confusion(result, truth).f_measure();
}

namespace eval_detail {

// Stage names in first-seen order across reports.
inline std::vector<std::string> stage_columns(const std::vector<SequenceReport>& reports) {
  std::vector<std::string> cols;
  for (const auto& r : reports) {
    for (const auto& [stage, _] : r.stage_seconds) {
      if (std::find(cols.begin(), cols.end(), stage) == cols.end()) cols.push_back(stage);
    }
  }
  return cols;
}

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string stage_value(const SequenceReport& r, const std::string& stage, int digits) {
  for (const auto& [s, v] : r.stage_seconds) {
    if (s == stage) return fixed(v, digits);
  }
  return "";
}

}  // namespace eval_detail

/// Comma-separated table: sequence,frames,error[,<stage>_s...].
inline std::string report_csv(const std::vector<SequenceReport>& reports) {
  const auto stages = eval_detail::stage_columns(reports);
  std::string out = "sequence,frames,error";
  for (const auto& s : stages) out += "," + s + "_s";
  out += "\n";
  for (const auto& r : reports) {
    out += r.name + "," + std::to_string(r.frames) + "," + eval_detail::fixed(r.mean_error, 3);
    for (const auto& s : stages) out += "," + eval_detail::stage_value(r, s, 3);
    out += "\n";
  }
  return out;
}

/// Aligned plain-text version of report_csv.
inline std::string report_table(const std::vector<SequenceReport>& reports) {
  if (reports.empty()) throw config_error("no sequences to report");
  const auto stages = eval_detail::stage_columns(reports);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"sequence", "frames", "error"};
  for (const auto& s : stages) header.push_back(s + " (s)");
  rows.push_back(header);
  for (const auto& r : reports) {
    std::vector<std::string> row{r.name, std::to_string(r.frames), eval_detail::fixed(r.mean_error, 1)};
    for (const auto& s : stages) row.push_back(eval_detail::stage_value(r, s, 2));
    rows.push_back(row);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      const std::string& cell = rows[i][c];
      const std::string pad(width[c] - cell.size(), ' ');
      out += c == 0 ? cell + pad : "  " + pad + cell;
    }
    out += "\n";
    if (i == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c == 0 ? 0 : 2);
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

}  // namespace vseg
