// Copyright 2026 The uatrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uatrack/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "uatrack/math_core.hpp"

namespace uatrack
{
namespace
{

const std::array<const char *, 8> kClassNames{
  "Car", "Van", "Truck", "Pedestrian", "Person_sitting", "Cyclist", "Tram", "Misc"};

const char * kDetectionHeader = "frame,class,x,y,z,w,l,h,theta,score";
const char * kVarianceHeader = ",var_x,var_y,var_z,var_w,var_l,var_h,var_theta";
const char * kTrackHeader = "frame,id,class,x,y,z,w,l,h,theta,score";

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::string> split(const std::string & line, char sep)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) {
    out.push_back(field);
  }
  if (!line.empty() && line.back() == sep) {
    out.emplace_back();
  }
  return out;
}

std::vector<std::string> split_ws(const std::string & line)
{
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    out.push_back(tok);
  }
  return out;
}

void strip_cr(std::string & line)
{
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
}

double to_double(const std::string & s, std::size_t line)
{
  double v = 0.0;
  const char * begin = s.data();
  const char * end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw FormatError("invalid number '" + s + "'", line);
  }
  return v;
}

int to_int(const std::string & s, std::size_t line)
{
  int v = 0;
  const char * end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw FormatError("invalid integer '" + s + "'", line);
  }
  return v;
}

int to_class(const std::string & s, std::size_t line)
{
  const auto id = class_id_from_name(s);
  if (!id) {
    throw FormatError("unknown class '" + s + "'", line);
  }
  return *id;
}

// Reads the version line and the header; returns the header text.
std::string read_preamble(std::istream & in, std::size_t & line_no)
{
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("empty file, expected '" + std::string(kFormatVersion) + "'", 1);
  }
  strip_cr(line);
  line_no = 1;
  if (line != kFormatVersion) {
    throw FormatError("unsupported format version line '" + line + "'", 1);
  }
  if (!std::getline(in, line)) {
    throw FormatError("missing header row", 2);
  }
  strip_cr(line);
  line_no = 2;
  return line;
}

std::ifstream open_in(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open '" + path.string() + "'", 0);
  }
  return in;
}

std::ofstream open_out(const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw FormatError("cannot write '" + path.string() + "'", 0);
  }
  return out;
}

}  // namespace

FormatError::FormatError(const std::string & what, std::size_t line)
: std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{
}

std::optional<int> class_id_from_name(const std::string & name)
{
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (name == kClassNames[i]) {
      return static_cast<int>(i);
    }
  }
  return std::nullopt;
}

std::string class_name(int class_id)
{
  if (class_id < 0 || class_id >= static_cast<int>(kClassNames.size())) {
    throw std::out_of_range("class id " + std::to_string(class_id) + " has no name");
  }
  return kClassNames[class_id];
}

void write_detections(std::ostream & out, const std::vector<DetectionRecord> & records)
{
  const bool with_var = !records.empty() && std::all_of(records.begin(), records.end(), [](const auto & r) {
    return r.variance.has_value();
  });
  out << kFormatVersion << '\n' << kDetectionHeader << (with_var ? kVarianceHeader : "") << '\n';
  for (const DetectionRecord & r : records) {
    const Box3D & b = r.box;
    out << r.frame << ',' << class_name(b.class_id) << ',' << fmt(b.x) << ',' << fmt(b.y) << ','
        << fmt(b.z) << ',' << fmt(b.w) << ',' << fmt(b.l) << ',' << fmt(b.h) << ',' << fmt(b.theta)
        << ',' << fmt(b.score);
    if (with_var) {
      for (double v : r.variance->values()) {
        out << ',' << fmt(v);
      }
    }
    out << '\n';
  }
}

std::vector<DetectionRecord> read_detections(std::istream & in)
{
  std::size_t line_no = 0;
  const std::string header = read_preamble(in, line_no);
  bool with_var = false;
  if (header == std::string(kDetectionHeader) + kVarianceHeader) {
    with_var = true;
  } else if (header != kDetectionHeader) {
    throw FormatError("unexpected detection header '" + header + "'", line_no);
  }
  const std::size_t n_fields = with_var ? 17 : 10;

  std::vector<DetectionRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) {
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != n_fields) {
      throw FormatError(
        "expected " + std::to_string(n_fields) + " fields, found " + std::to_string(f.size()) +
          (with_var ? "" : " (variance columns must be present in the header and every row, or in none)"),
        line_no);
    }
    DetectionRecord r;
    r.frame = to_int(f[0], line_no);
    r.box.class_id = to_class(f[1], line_no);
    r.box.x = to_double(f[2], line_no);
    r.box.y = to_double(f[3], line_no);
    r.box.z = to_double(f[4], line_no);
    r.box.w = to_double(f[5], line_no);
    r.box.l = to_double(f[6], line_no);
    r.box.h = to_double(f[7], line_no);
    r.box.theta = to_double(f[8], line_no);
    r.box.score = to_double(f[9], line_no);
    if (with_var) {
      BoxVariance v;
      v.x = to_double(f[10], line_no);
      v.y = to_double(f[11], line_no);
      v.z = to_double(f[12], line_no);
      v.w = to_double(f[13], line_no);
      v.l = to_double(f[14], line_no);
      v.h = to_double(f[15], line_no);
      v.theta = to_double(f[16], line_no);
      r.variance = v;
    }
    records.push_back(r);
  }
  return records;
}

void write_detections(const std::filesystem::path & path, const std::vector<DetectionRecord> & records)
{
  auto out = open_out(path);
  write_detections(out, records);
}

std::vector<DetectionRecord> read_detections(const std::filesystem::path & path)
{
  auto in = open_in(path);
  return read_detections(in);
}

void write_tracks(std::ostream & out, const std::vector<TrackRecord> & records)
{
  out << kFormatVersion << '\n' << kTrackHeader << '\n';
  for (const TrackRecord & r : records) {
    const Box3D & b = r.box;
    out << r.frame << ',' << r.id << ',' << class_name(b.class_id) << ',' << fmt(b.x) << ','
        << fmt(b.y) << ',' << fmt(b.z) << ',' << fmt(b.w) << ',' << fmt(b.l) << ',' << fmt(b.h)
        << ',' << fmt(b.theta) << ',' << fmt(b.score) << '\n';
  }
}

std::vector<TrackRecord> read_tracks(std::istream & in)
{
  std::size_t line_no = 0;
  const std::string header = read_preamble(in, line_no);
  if (header != kTrackHeader) {
    throw FormatError("unexpected track header '" + header + "'", line_no);
  }
  std::vector<TrackRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) {
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 11) {
      throw FormatError("expected 11 fields, found " + std::to_string(f.size()), line_no);
    }
    TrackRecord r;
    r.frame = to_int(f[0], line_no);
    r.id = to_int(f[1], line_no);
    r.box.class_id = to_class(f[2], line_no);
    r.box.x = to_double(f[3], line_no);
    r.box.y = to_double(f[4], line_no);
    r.box.z = to_double(f[5], line_no);
    r.box.w = to_double(f[6], line_no);
    r.box.l = to_double(f[7], line_no);
    r.box.h = to_double(f[8], line_no);
    r.box.theta = to_double(f[9], line_no);
    r.box.score = to_double(f[10], line_no);
    records.push_back(r);
  }
  return records;
}

void write_tracks(const std::filesystem::path & path, const std::vector<TrackRecord> & records)
{
  auto out = open_out(path);
  write_tracks(out, records);
}

std::vector<TrackRecord> read_tracks(const std::filesystem::path & path)
{
  auto in = open_in(path);
  return read_tracks(in);
}

std::vector<FrameDetections> detections_by_frame(
  const std::vector<DetectionRecord> & records, std::size_t n_frames)
{
  for (const auto & r : records) {
    if (r.frame < 0) {
      throw FormatError("negative frame index", 0);
    }
    n_frames = std::max(n_frames, static_cast<std::size_t>(r.frame) + 1);
  }
  std::vector<FrameDetections> frames(n_frames);
  for (const auto & r : records) {
    frames[r.frame].push_back({r.box, r.variance});
  }
  return frames;
}

BoxFrames boxes_by_frame(const std::vector<DetectionRecord> & records, std::size_t n_frames)
{
  BoxFrames frames;
  for (const auto & f : detections_by_frame(records, n_frames)) {
    auto & out = frames.emplace_back();
    for (const auto & d : f) {
      out.push_back(d.box);
    }
  }
  return frames;
}

TrackFrames tracks_by_frame(const std::vector<TrackRecord> & records, std::size_t n_frames)
{
  for (const auto & r : records) {
    if (r.frame < 0) {
      throw FormatError("negative frame index", 0);
    }
    n_frames = std::max(n_frames, static_cast<std::size_t>(r.frame) + 1);
  }
  TrackFrames frames(n_frames);
  for (const auto & r : records) {
    frames[r.frame].push_back({r.id, r.box});
  }
  return frames;
}

std::map<int, std::vector<TrackedBox>> parse_kitti_labels(std::istream & in, int default_frame)
{
  std::map<int, std::vector<TrackedBox>> frames;
  std::string line;
  std::size_t line_no = 0;
  int object_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = split_ws(line);
    if (f.empty()) {
      continue;
    }
    std::size_t base = 0;
    int frame = default_frame;
    int id = 0;
    if (f.size() == 17 || f.size() == 18) {
      frame = to_int(f[0], line_no);
      id = to_int(f[1], line_no);
      base = 2;
    } else if (f.size() == 15 || f.size() == 16) {
      id = object_index++;
    } else {
      throw FormatError(
        "KITTI label needs 15-18 fields, found " + std::to_string(f.size()), line_no);
    }
    const std::string & type = f[base];
    if (type == "DontCare") {
      continue;
    }
    const double h = to_double(f[base + 8], line_no);
    const double w = to_double(f[base + 9], line_no);
    const double l = to_double(f[base + 10], line_no);
    const double xc = to_double(f[base + 11], line_no);
    const double yc = to_double(f[base + 12], line_no);
    const double zc = to_double(f[base + 13], line_no);
    const double ry = to_double(f[base + 14], line_no);

    TrackedBox tb;
    tb.id = id;
    tb.box.class_id = to_class(type, line_no);
    tb.box.x = zc;
    tb.box.y = -xc;
    tb.box.z = -yc + 0.5 * h;
    tb.box.w = w;
    tb.box.l = l;
    tb.box.h = h;
    tb.box.theta = wrap_angle(-ry - 0.5 * kPi);
    tb.box.score = f.size() == base + 16 ? to_double(f[base + 15], line_no) : 1.0;
    frames[frame].push_back(tb);
  }
  return frames;
}

std::map<int, std::vector<TrackedBox>> parse_kitti_labels(const std::filesystem::path & path)
{
  auto in = open_in(path);
  int frame = 0;
  const std::string stem = path.stem().string();
  if (!stem.empty() && std::all_of(stem.begin(), stem.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    frame = std::stoi(stem);
  }
  return parse_kitti_labels(in, frame);
}

}  // namespace uatrack
