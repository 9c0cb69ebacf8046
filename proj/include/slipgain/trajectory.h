// Copyright 2026 The slipgain Authors
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

#ifndef SLIPGAIN_TRAJECTORY_H_
#define SLIPGAIN_TRAJECTORY_H_

#include <cstddef>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace slipgain {

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
};

struct ReferencePoint {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;        // tangent heading, (-pi, pi]
  double arclength = 0.0;  // cumulative distance from the first sample
  double v_ref = 0.0;
};

// A densely sampled reference path. Immutable once built.
class ReferenceTrajectory {
 public:
  ReferenceTrajectory(std::vector<ReferencePoint> points, double spacing);

  const std::vector<ReferencePoint>& points() const { return points_; }
  const ReferencePoint& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  double spacing() const { return spacing_; }
  const ReferencePoint& front() const { return points_.front(); }
  const ReferencePoint& back() const { return points_.back(); }
  double length() const { return points_.back().arclength; }

 private:
  std::vector<ReferencePoint> points_;
  double spacing_;
};

struct Projection {
  std::size_t index = 0;
  double e = 0.0;              // signed lateral error, positive left of path
  double heading_error = 0.0;  // wrap(yaw_ref - yaw)
};

// Natural cubic spline y(t) over strictly increasing knots.
class CubicSpline1D {
 public:
  CubicSpline1D(std::vector<double> knots, std::vector<double> values);

  double Value(double t) const;
  double Derivative(double t) const;

 private:
  std::size_t Segment(double t) const;

  std::vector<double> knots_;
  std::vector<double> a_, b_, c_, d_;
};

inline constexpr double kDefaultSpacing = 0.05;
inline constexpr double kDefaultReferenceSpeed = 0.5;

// Natural cubic spline through `waypoints`, parameterized by cumulative chord
// length and resampled at arc steps of at most `ds`. Every waypoint is a
// sample. Throws std::invalid_argument on degenerate input.
ReferenceTrajectory GenerateSpline(std::span<const Waypoint> waypoints,
                                   double ds = kDefaultSpacing,
                                   double v_ref = kDefaultReferenceSpeed);

// Five waypoints: start in [1,2]x[3.5,4.5], each next point 1-2 m away with a
// heading change in [-pi/2, pi/2] relative to the previous segment.
std::vector<Waypoint> SampleRandomWaypoints(std::mt19937_64& rng);

// Exhaustive nearest-sample projection.
Projection Project(const ReferenceTrajectory& trajectory, double x, double y,
                   double yaw);

// CSV with header `s,x,y,yaw,v_ref`, 9 significant digits.
void WriteTrajectoryCsv(const ReferenceTrajectory& trajectory,
                        std::ostream& out);
ReferenceTrajectory ReadTrajectoryCsv(std::istream& in);

}  // namespace slipgain

#endif  // SLIPGAIN_TRAJECTORY_H_
