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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uatrack/io.hpp"
#include "uatrack/math_core.hpp"
#include "uatrack/random.hpp"

namespace
{

using uatrack::DetectionRecord;
using uatrack::FormatError;

std::vector<DetectionRecord> random_records(int n, bool with_variance, std::uint64_t seed)
{
  uatrack::Rng rng(seed);
  std::vector<DetectionRecord> out;
  for (int i = 0; i < n; ++i) {
    DetectionRecord r;
    r.frame = i / 10;
    r.box.class_id = static_cast<int>(rng.uniform() * 8);
    r.box.x = rng.uniform(-80, 80);
    r.box.y = rng.uniform(-80, 80);
    r.box.z = rng.uniform(-3, 3);
    r.box.w = rng.uniform(0.1, 5);
    r.box.l = rng.uniform(0.1, 12);
    r.box.h = rng.uniform(0.1, 4);
    r.box.theta = rng.uniform(-uatrack::kPi, uatrack::kPi);
    r.box.score = rng.uniform();
    if (with_variance) {
      r.variance = uatrack::BoxVariance{rng.uniform(1e-4, 2), rng.uniform(1e-4, 2), rng.uniform(1e-4, 2),
        rng.uniform(1e-4, 2), rng.uniform(1e-4, 2), rng.uniform(1e-4, 2), rng.uniform(1e-6, 1)};
    }
    out.push_back(r);
  }
  return out;
}

void expect_close(double a, double b)
{
  EXPECT_LE(std::abs(a - b), 1e-8 * std::max(1.0, std::abs(b)));
}

TEST(DetectionCsv, RoundTripWithVariance)
{
  const auto records = random_records(1000, true, 1);
  std::stringstream ss;
  uatrack::write_detections(ss, records);
  const auto back = uatrack::read_detections(ss);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(back[i].frame, records[i].frame);
    EXPECT_EQ(back[i].box.class_id, records[i].box.class_id);
    expect_close(back[i].box.x, records[i].box.x);
    expect_close(back[i].box.theta, records[i].box.theta);
    expect_close(back[i].box.score, records[i].box.score);
    ASSERT_TRUE(back[i].variance.has_value());
    const auto a = back[i].variance->values();
    const auto b = records[i].variance->values();
    for (std::size_t k = 0; k < 7; ++k) EXPECT_LE(std::abs(a[k] - b[k]), 1e-8 * b[k]);
  }
}

TEST(DetectionCsv, RewriteIsByteIdentical)
{
  std::stringstream first;
  uatrack::write_detections(first, random_records(200, true, 2));
  std::stringstream copy(first.str());
  std::stringstream second;
  uatrack::write_detections(second, uatrack::read_detections(copy));
  EXPECT_EQ(first.str(), second.str());
}

TEST(DetectionCsv, WithoutVarianceColumns)
{
  std::stringstream ss;
  uatrack::write_detections(ss, random_records(20, false, 3));
  EXPECT_NE(ss.str().find("frame,class,x,y,z,w,l,h,theta,score\n"), std::string::npos);
  EXPECT_EQ(ss.str().find("var_x"), std::string::npos);
  for (const auto & r : uatrack::read_detections(ss)) EXPECT_FALSE(r.variance.has_value());
}

TEST(DetectionCsv, MixedVariancePresenceRejected)
{
  std::stringstream ss;
  ss << uatrack::kFormatVersion << "\n"
     << "frame,class,x,y,z,w,l,h,theta,score,var_x,var_y,var_z,var_w,var_l,var_h,var_theta\n"
     << "0,Car,1,2,3,1.6,3.9,1.5,0,0.9,1,1,1,1,1,1,1\n"
     << "0,Car,1,2,3,1.6,3.9,1.5,0,0.9\n";
  try {
    uatrack::read_detections(ss);
    FAIL() << "expected a format error";
  } catch (const FormatError & e) {
    EXPECT_EQ(e.line(), 4u);
  }
  std::stringstream no_header_var;
  no_header_var << uatrack::kFormatVersion << "\nframe,class,x,y,z,w,l,h,theta,score\n"
                << "0,Car,1,2,3,1.6,3.9,1.5,0,0.9,1,1,1,1,1,1,1\n";
  EXPECT_THROW(uatrack::read_detections(no_header_var), FormatError);
}

TEST(DetectionCsv, HeaderAndVersionChecked)
{
  std::stringstream bad_header;
  bad_header << uatrack::kFormatVersion << "\nframe,class,x,y\n";
  EXPECT_THROW(uatrack::read_detections(bad_header), FormatError);
  std::stringstream no_version;
  no_version << "frame,class,x,y,z,w,l,h,theta,score\n";
  EXPECT_THROW(uatrack::read_detections(no_version), FormatError);
  std::stringstream bad_number;
  bad_number << uatrack::kFormatVersion << "\nframe,class,x,y,z,w,l,h,theta,score\n0,Car,1,2,x,1,1,1,0,1\n";
  EXPECT_THROW(uatrack::read_detections(bad_number), FormatError);
  std::stringstream bad_class;
  bad_class << uatrack::kFormatVersion << "\nframe,class,x,y,z,w,l,h,theta,score\n0,Boat,1,2,0,1,1,1,0,1\n";
  EXPECT_THROW(uatrack::read_detections(bad_class), FormatError);
}

TEST(TrackCsv, RoundTripAndGrouping)
{
  std::vector<uatrack::TrackRecord> records;
  for (int f = 0; f < 4; ++f) {
    for (int id = 1; id <= 3; ++id) {
      uatrack::TrackRecord r;
      r.frame = f * 2;
      r.id = id;
      r.box.x = f + 0.1 * id;
      records.push_back(r);
    }
  }
  std::stringstream ss;
  uatrack::write_tracks(ss, records);
  const auto back = uatrack::read_tracks(ss);
  ASSERT_EQ(back.size(), records.size());
  const auto frames = uatrack::tracks_by_frame(back);
  ASSERT_EQ(frames.size(), 7u);
  EXPECT_TRUE(frames[1].empty());
  ASSERT_EQ(frames[6].size(), 3u);
  EXPECT_EQ(frames[6][2].id, 3);
  EXPECT_EQ(uatrack::tracks_by_frame(back, 10).size(), 10u);
}

TEST(ClassNames, RoundTrip)
{
  for (int i = 0; i < 8; ++i) EXPECT_EQ(uatrack::class_id_from_name(uatrack::class_name(i)), i);
  EXPECT_FALSE(uatrack::class_id_from_name("DontCare").has_value());
  EXPECT_THROW(uatrack::class_name(8), std::out_of_range);
}

TEST(KittiLabels, EmptyFileGivesEmptyMap)
{
  std::stringstream ss;
  EXPECT_TRUE(uatrack::parse_kitti_labels(ss).empty());
}

TEST(KittiLabels, SingleCarLine)
{
  std::stringstream ss;
  ss << "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n";
  const auto frames = uatrack::parse_kitti_labels(ss, 7);
  ASSERT_EQ(frames.size(), 1u);
  const auto & boxes = frames.at(7);
  ASSERT_EQ(boxes.size(), 1u);
  const auto & b = boxes[0].box;
  EXPECT_EQ(b.class_id, 0);
  EXPECT_DOUBLE_EQ(b.h, 1.65);
  EXPECT_DOUBLE_EQ(b.w, 1.67);
  EXPECT_DOUBLE_EQ(b.l, 3.64);
  EXPECT_DOUBLE_EQ(b.x, 46.70);
  EXPECT_DOUBLE_EQ(b.y, 0.65);
  EXPECT_DOUBLE_EQ(b.z, -1.71 + 0.5 * 1.65);
  EXPECT_NEAR(b.theta, uatrack::wrap_angle(1.59 - 0.5 * uatrack::kPi), 1e-12);
  EXPECT_EQ(b.score, 1.0);
}

TEST(KittiLabels, HeadingConvention)
{
  // ry = 0 points along camera x (right), which is -y in the z-up frame; ry = -pi/2 points forward
  std::stringstream ss;
  ss << "Car 0 0 0 0 0 0 0 1.5 1.6 3.9 0 1 10 0\n"
     << "Car 0 0 0 0 0 0 0 1.5 1.6 3.9 0 1 10 -1.5707963267948966\n";
  const auto boxes = uatrack::parse_kitti_labels(ss).at(0);
  EXPECT_NEAR(boxes[0].box.theta, -0.5 * uatrack::kPi, 1e-12);
  EXPECT_NEAR(boxes[1].box.theta, 0.0, 1e-12);
}

TEST(KittiLabels, TrackingFormatDontCareAndScores)
{
  std::stringstream ss;
  ss << "0 2 Pedestrian 0 0 -0.2 712.4 143.0 810.7 307.9 1.89 0.48 1.20 1.84 1.47 8.41 0.01\n"
     << "0 -1 DontCare -1 -1 -10 503.8 169.7 590.7 190.1 -1 -1 -1 -1000 -1000 -1000 -10\n"
     << "1 2 Pedestrian 0 0 -0.2 712.4 143.0 810.7 307.9 1.89 0.48 1.20 1.84 1.47 8.41 0.01 0.75\n";
  const auto frames = uatrack::parse_kitti_labels(ss);
  ASSERT_EQ(frames.size(), 2u);
  ASSERT_EQ(frames.at(0).size(), 1u);
  EXPECT_EQ(frames.at(0)[0].id, 2);
  EXPECT_EQ(frames.at(0)[0].box.class_id, 3);
  EXPECT_DOUBLE_EQ(frames.at(1)[0].box.score, 0.75);
}

TEST(KittiLabels, WrongFieldCountNamesLine)
{
  std::stringstream ss;
  ss << "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n"
     << "Car 0.00 0 -1.58 587.01\n";
  try {
    uatrack::parse_kitti_labels(ss);
    FAIL() << "expected a format error";
  } catch (const FormatError & e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(KittiLabels, FrameFromFileStem)
{
  const auto dir = std::filesystem::temp_directory_path() / "uatrack_kitti_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "000042.txt";
  {
    std::ofstream out(path);
    out << "Van 0 0 0 0 0 0 0 2.0 1.9 5.0 1 1 20 0.3\n";
  }
  const auto frames = uatrack::parse_kitti_labels(path);
  ASSERT_EQ(frames.count(42), 1u);
  EXPECT_EQ(frames.at(42)[0].box.class_id, 1);
  std::filesystem::remove_all(dir);
}

}  // namespace
