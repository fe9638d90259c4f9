#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lbt/geometry.hpp"
#include "lbt/perception.hpp"
#include "lbt/simulator.hpp"
#include "lbt/tracker.hpp"

namespace lbt {

/// Malformed input file; message carries path and line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One line of the comma-separated interchange format:
/// frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z
/// Frames are 1-based in files; id is -1 for raw detections; x, y, z are -1
/// when unused.
struct MotRecord {
  int frame = 0;
  int id = -1;
  double bb_left = 0.0;
  double bb_top = 0.0;
  double bb_width = 0.0;
  double bb_height = 0.0;
  double conf = 1.0;
  double x = -1.0;
  double y = -1.0;
  double z = -1.0;

  GlobalBox center_box() const {
    return GlobalBox{bb_left + bb_width / 2.0, bb_top + bb_height / 2.0, bb_width, bb_height};
  }

  static MotRecord from_center(int frame_1based, int id, const GlobalBox& box, double conf) {
    MotRecord r;
    r.frame = frame_1based;
    r.id = id;
    r.bb_left = box.x - box.w / 2.0;
    r.bb_top = box.y - box.h / 2.0;
    r.bb_width = box.w;
    r.bb_height = box.h;
    r.conf = conf;
    return r;
  }
};

/// Records grouped by 1-based file frame.
using MotTable = std::map<int, std::vector<MotRecord>>;

namespace detail {

inline double parse_double(std::string_view field, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(where + ": malformed numeric field '" + std::string(field) + "'");
  }
  return v;
}

inline int parse_int(std::string_view field, const std::string& where) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(where + ": malformed integer field '" + std::string(field) + "'");
  }
  return v;
}

inline bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace detail

inline MotTable parse_mot_stream(std::istream& in, const std::string& name) {
  MotTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    line_no += 1;
    if (detail::blank(line)) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    std::string_view rest(line);
    if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);

    std::array<std::string_view, 10> fields;
    size_t n_fields = 0;
    while (true) {
      const size_t comma = rest.find(',');
      const std::string_view field = rest.substr(0, comma);
      if (n_fields >= fields.size()) throw ParseError(where + ": expected 10 fields");
      fields[n_fields++] = field;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (n_fields != fields.size()) throw ParseError(where + ": expected 10 fields");

    MotRecord r;
    r.frame = detail::parse_int(fields[0], where);
    r.id = detail::parse_int(fields[1], where);
    r.bb_left = detail::parse_double(fields[2], where);
    r.bb_top = detail::parse_double(fields[3], where);
    r.bb_width = detail::parse_double(fields[4], where);
    r.bb_height = detail::parse_double(fields[5], where);
    r.conf = detail::parse_double(fields[6], where);
    r.x = detail::parse_double(fields[7], where);
    r.y = detail::parse_double(fields[8], where);
    r.z = detail::parse_double(fields[9], where);
    if (r.frame < 1) throw ParseError(where + ": frame must be >= 1");
    if (r.bb_width <= 0.0 || r.bb_height <= 0.0) {
      throw ParseError(where + ": non-positive box dimensions");
    }
    table[r.frame].push_back(r);
  }
  return table;
}

inline MotTable parse_mot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  return parse_mot_stream(in, path);
}

/// Canonical text form: ascending (frame, id), geometry fixed to 2 decimals,
/// so equal tables always produce byte-identical files.
inline void write_mot_stream(const MotTable& table, std::ostream& out) {
  char buf[192];
  for (const auto& [frame, records] : table) {
    std::vector<MotRecord> sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const MotRecord& a, const MotRecord& b) { return a.id < b.id; });
    for (const auto& r : sorted) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.2f,%.2f,%.2f,%.2f,%.2f,%d,%d,%d\n", frame, r.id,
                    r.bb_left, r.bb_top, r.bb_width, r.bb_height, r.conf, static_cast<int>(r.x),
                    static_cast<int>(r.y), static_cast<int>(r.z));
      out << buf;
    }
  }
}

inline void write_mot_file(const MotTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_mot_stream(table, out);
  if (!out) throw std::runtime_error(path + ": write failed");
}

// ---- converters (file frames are 1-based, pipeline frames 0-based) ---------

inline MotTable table_from_ground_truth(const GroundTruth& gt) {
  MotTable table;
  for (int f = 0; f < gt.n_frames; ++f) {
    for (const auto& [id, box] : gt.frames[static_cast<size_t>(f)]) {
      table[f + 1].push_back(MotRecord::from_center(f + 1, id, box, 1.0));
    }
  }
  return table;
}

inline MotTable table_from_histories(const std::vector<TrackHistory>& histories) {
  MotTable table;
  for (const auto& h : histories) {
    for (const auto& [f, box] : h.boxes) {
      table[f + 1].push_back(MotRecord::from_center(f + 1, h.id, box, 1.0));
    }
  }
  return table;
}

inline GroundTruth ground_truth_from_table(const MotTable& table, FrameDims dims = {}) {
  GroundTruth gt;
  gt.dims = dims;
  gt.n_frames = table.empty() ? 0 : table.rbegin()->first;
  gt.frames.resize(static_cast<size_t>(gt.n_frames));
  for (const auto& [frame, records] : table) {
    for (const auto& r : records) {
      const int f = frame - 1;
      gt.frames[static_cast<size_t>(f)].emplace_back(r.id, r.center_box());
      auto [it, inserted] = gt.objects.try_emplace(r.id, ObjectSpan{f, f});
      if (!inserted) {
        it->second.first_frame = std::min(it->second.first_frame, f);
        it->second.last_frame = std::max(it->second.last_frame, f);
      }
    }
  }
  return gt;
}

inline std::vector<TrackHistory> histories_from_table(const MotTable& table) {
  std::map<int, TrackHistory> by_id;
  for (const auto& [frame, records] : table) {
    for (const auto& r : records) {
      auto& h = by_id[r.id];
      h.id = r.id;
      h.boxes[frame - 1] = r.center_box();
    }
  }
  std::vector<TrackHistory> out;
  out.reserve(by_id.size());
  for (auto& [id, h] : by_id) out.push_back(std::move(h));
  return out;
}

inline DetectionStore detections_from_table(const MotTable& table) {
  DetectionStore store;
  for (const auto& [frame, records] : table) {
    for (const auto& r : records) {
      store[frame - 1].push_back(Detection{r.center_box(), r.conf, -1});
    }
  }
  return store;
}

}  // namespace lbt
