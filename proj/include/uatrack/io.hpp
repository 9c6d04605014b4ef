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

#ifndef UATRACK__IO_HPP_
#define UATRACK__IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uatrack/box_codec.hpp"
#include "uatrack/metrics.hpp"
#include "uatrack/tracker.hpp"

namespace uatrack
{

// First line of every file this library writes.
inline constexpr const char * kFormatVersion = "# uatrack-v1";

/// Malformed input. line() is 1-based, 0 when the error is not tied to a line.
class FormatError : public std::runtime_error
{
public:
  FormatError(const std::string & what, std::size_t line);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// KITTI class names map to ids in this order: Car, Van, Truck, Pedestrian,
/// Person_sitting, Cyclist, Tram, Misc.
std::optional<int> class_id_from_name(const std::string & name);
std::string class_name(int class_id);

struct DetectionRecord
{
  int frame{0};
  Box3D box;
  std::optional<BoxVariance> variance;
};

/// CSV with header frame,class,x,y,z,w,l,h,theta,score[,var_x,...,var_theta].
/// Variance columns are written only when every record has them. Values use 9 significant digits.
void write_detections(std::ostream & out, const std::vector<DetectionRecord> & records);
std::vector<DetectionRecord> read_detections(std::istream & in);
void write_detections(const std::filesystem::path & path, const std::vector<DetectionRecord> & records);
std::vector<DetectionRecord> read_detections(const std::filesystem::path & path);

struct TrackRecord
{
  int frame{0};
  int id{0};
  Box3D box;
};

/// CSV with header frame,id,class,x,y,z,w,l,h,theta,score. Used for ground truth and tracker output.
void write_tracks(std::ostream & out, const std::vector<TrackRecord> & records);
std::vector<TrackRecord> read_tracks(std::istream & in);
void write_tracks(const std::filesystem::path & path, const std::vector<TrackRecord> & records);
std::vector<TrackRecord> read_tracks(const std::filesystem::path & path);

/// Groups records into n_frames frames (at least max frame + 1).
std::vector<FrameDetections> detections_by_frame(
  const std::vector<DetectionRecord> & records, std::size_t n_frames = 0);
TrackFrames tracks_by_frame(const std::vector<TrackRecord> & records, std::size_t n_frames = 0);
BoxFrames boxes_by_frame(const std::vector<DetectionRecord> & records, std::size_t n_frames = 0);

/// Parses KITTI object labels (15 or 16 fields per line: type, truncated, occluded, alpha,
/// 2D box, h w l, x y z, rotation_y [, score]) or KITTI tracking labels (frame and track id
/// prepended, 17 or 18 fields). DontCare lines are skipped.
///
/// Camera-frame boxes are mapped to the z-up frame used here:
///   x = z_cam, y = -x_cam, z = -y_cam + h/2 (KITTI y is the bottom face), yaw = -ry - pi/2.
/// Object-label files take their frame number from the numeric file stem (0 otherwise) and
/// number their objects by line.
std::map<int, std::vector<TrackedBox>> parse_kitti_labels(const std::filesystem::path & path);
std::map<int, std::vector<TrackedBox>> parse_kitti_labels(std::istream & in, int default_frame = 0);

}  // namespace uatrack

#endif  // UATRACK__IO_HPP_
