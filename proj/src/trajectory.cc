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

#include "slipgain/trajectory.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "slipgain/angles.h"

namespace slipgain {

namespace {

// Sub-intervals per spline segment used to tabulate arc length.
constexpr int kArcTableResolution = 64;

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kGaussNodes = {
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
    0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
    0.4786286704993665, 0.2369268850561891};

double Speed(const CubicSpline1D& sx, const CubicSpline1D& sy, double t) {
  return std::hypot(sx.Derivative(t), sy.Derivative(t));
}

double ArcLength(const CubicSpline1D& sx, const CubicSpline1D& sy, double t0,
                 double t1) {
  const double half = 0.5 * (t1 - t0);
  const double mid = 0.5 * (t1 + t0);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
    sum += kGaussWeights[i] * Speed(sx, sy, mid + half * kGaussNodes[i]);
  }
  return sum * half;
}

ReferencePoint MakePoint(const CubicSpline1D& sx, const CubicSpline1D& sy,
                         double t, double v_ref) {
  ReferencePoint p;
  p.x = sx.Value(t);
  p.y = sy.Value(t);
  p.yaw = WrapToPi(std::atan2(sy.Derivative(t), sx.Derivative(t)));
  p.v_ref = v_ref;
  return p;
}

}  // namespace

ReferenceTrajectory::ReferenceTrajectory(std::vector<ReferencePoint> points,
                                         double spacing)
    : points_(std::move(points)), spacing_(spacing) {
  if (points_.size() < 2) {
    throw std::invalid_argument("trajectory needs at least 2 points");
  }
  if (!(spacing_ > 0.0)) {
    throw std::invalid_argument("trajectory spacing must be positive");
  }
}

CubicSpline1D::CubicSpline1D(std::vector<double> knots,
                             std::vector<double> values)
    : knots_(std::move(knots)) {
  const std::size_t n = knots_.size();
  if (n < 2 || values.size() != n) {
    throw std::invalid_argument("spline needs >= 2 knots with matching values");
  }
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = knots_[i + 1] - knots_[i];
    if (!(h[i] > 0.0)) {
      throw std::invalid_argument("spline knots must be strictly increasing");
    }
  }

  // Second derivatives with natural end conditions, via the Thomas algorithm
  // on the interior rows.
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = r + 1;
      diag[r] = 2.0 * (h[i - 1] + h[i]);
      upper[r] = h[i];
      rhs[r] = 6.0 * ((values[i + 1] - values[i]) / h[i] -
                      (values[i] - values[i - 1]) / h[i - 1]);
    }
    for (std::size_t r = 1; r < k; ++r) {
      const double w = h[r] / diag[r - 1];  // lower[r] = h[r]
      diag[r] -= w * upper[r - 1];
      rhs[r] -= w * rhs[r - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t r = k - 1; r-- > 0;) {
      m[r + 1] = (rhs[r] - upper[r] * m[r + 2]) / diag[r];
    }
  }

  a_.resize(n - 1);
  b_.resize(n - 1);
  c_.resize(n - 1);
  d_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    a_[i] = values[i];
    b_[i] = (values[i + 1] - values[i]) / h[i] -
            h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    c_[i] = 0.5 * m[i];
    d_[i] = (m[i + 1] - m[i]) / (6.0 * h[i]);
  }
}

std::size_t CubicSpline1D::Segment(double t) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t idx = it == knots_.begin()
                        ? 0
                        : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(idx, a_.size() - 1);
}

double CubicSpline1D::Value(double t) const {
  const std::size_t i = Segment(t);
  const double dt = t - knots_[i];
  return a_[i] + dt * (b_[i] + dt * (c_[i] + dt * d_[i]));
}

double CubicSpline1D::Derivative(double t) const {
  const std::size_t i = Segment(t);
  const double dt = t - knots_[i];
  return b_[i] + dt * (2.0 * c_[i] + 3.0 * dt * d_[i]);
}

ReferenceTrajectory GenerateSpline(std::span<const Waypoint> waypoints,
                                   double ds, double v_ref) {
  if (waypoints.size() < 2) {
    throw std::invalid_argument("spline needs at least 2 waypoints");
  }
  if (!(ds > 0.0) || !std::isfinite(ds)) {
    throw std::invalid_argument("spline spacing ds must be positive");
  }
  if (!(v_ref > 0.0) || !std::isfinite(v_ref)) {
    throw std::invalid_argument("reference speed must be positive");
  }
  std::vector<double> chord(waypoints.size(), 0.0);
  std::vector<double> xs(waypoints.size()), ys(waypoints.size());
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (!std::isfinite(waypoints[i].x) || !std::isfinite(waypoints[i].y)) {
      throw std::invalid_argument("waypoint coordinates must be finite");
    }
    xs[i] = waypoints[i].x;
    ys[i] = waypoints[i].y;
    if (i > 0) {
      const double step = std::hypot(xs[i] - xs[i - 1], ys[i] - ys[i - 1]);
      if (!(step > 0.0)) {
        throw std::invalid_argument("consecutive waypoints coincide");
      }
      chord[i] = chord[i - 1] + step;
    }
  }
  const CubicSpline1D sx(chord, xs);
  const CubicSpline1D sy(chord, ys);

  std::vector<ReferencePoint> points;
  points.push_back(MakePoint(sx, sy, chord.front(), v_ref));
  points.back().x = xs.front();
  points.back().y = ys.front();

  std::array<double, kArcTableResolution + 1> table_t{};
  std::array<double, kArcTableResolution + 1> table_s{};
  for (std::size_t seg = 0; seg + 1 < chord.size(); ++seg) {
    const double t0 = chord[seg];
    const double t1 = chord[seg + 1];
    table_t[0] = t0;
    table_s[0] = 0.0;
    for (int j = 1; j <= kArcTableResolution; ++j) {
      table_t[j] = t0 + (t1 - t0) * j / kArcTableResolution;
      table_s[j] = table_s[j - 1] + ArcLength(sx, sy, table_t[j - 1], table_t[j]);
    }
    const double seg_length = table_s.back();
    const int count =
        std::max(1, static_cast<int>(std::ceil(seg_length / ds - 1e-9)));
    int cursor = 0;
    for (int j = 1; j < count; ++j) {
      const double target = seg_length * j / count;
      while (table_s[cursor + 1] < target) ++cursor;
      const double frac = (target - table_s[cursor]) /
                          (table_s[cursor + 1] - table_s[cursor]);
      const double t =
          table_t[cursor] + frac * (table_t[cursor + 1] - table_t[cursor]);
      points.push_back(MakePoint(sx, sy, t, v_ref));
    }
    // The knot itself, pinned to the exact input coordinates.
    points.push_back(MakePoint(sx, sy, t1, v_ref));
    points.back().x = xs[seg + 1];
    points.back().y = ys[seg + 1];
  }

  for (std::size_t i = 1; i < points.size(); ++i) {
    points[i].arclength =
        points[i - 1].arclength + std::hypot(points[i].x - points[i - 1].x,
                                             points[i].y - points[i - 1].y);
  }
  return ReferenceTrajectory(std::move(points), ds);
}

std::vector<Waypoint> SampleRandomWaypoints(std::mt19937_64& rng) {
  constexpr int kCount = 5;
  std::uniform_real_distribution<double> start_x(1.0, 2.0);
  std::uniform_real_distribution<double> start_y(3.5, 4.5);
  std::uniform_real_distribution<double> spacing(1.0, 2.0);
  std::uniform_real_distribution<double> turn(-0.5 * std::numbers::pi,
                                              0.5 * std::numbers::pi);
  std::vector<Waypoint> out;
  out.reserve(kCount);
  const double x0 = start_x(rng);
  const double y0 = start_y(rng);
  out.push_back({x0, y0});
  double heading = 0.0;
  for (int i = 1; i < kCount; ++i) {
    const double dist = spacing(rng);
    heading += turn(rng);
    out.push_back({out.back().x + dist * std::cos(heading),
                   out.back().y + dist * std::sin(heading)});
  }
  return out;
}

Projection Project(const ReferenceTrajectory& trajectory, double x, double y,
                   double yaw) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const double dx = x - trajectory[i].x;
    const double dy = y - trajectory[i].y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  const ReferencePoint& ref = trajectory[best];
  const double dx = x - ref.x;
  const double dy = y - ref.y;
  Projection p;
  p.index = best;
  p.e = -std::sin(ref.yaw) * dx + std::cos(ref.yaw) * dy;
  p.heading_error = WrapToPi(ref.yaw - yaw);
  return p;
}

void WriteTrajectoryCsv(const ReferenceTrajectory& trajectory,
                        std::ostream& out) {
  out << "s,x,y,yaw,v_ref\n";
  out << std::setprecision(9);
  for (const ReferencePoint& p : trajectory.points()) {
    out << p.arclength << ',' << p.x << ',' << p.y << ',' << p.yaw << ','
        << p.v_ref << '\n';
  }
}

ReferenceTrajectory ReadTrajectoryCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("s,x,y,yaw,v_ref", 0) != 0) {
    throw std::invalid_argument("trajectory csv: missing header");
  }
  std::vector<ReferencePoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::array<double, 5> f{};
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::string cell;
      if (!std::getline(row, cell, ',')) {
        throw std::invalid_argument("trajectory csv: short row: " + line);
      }
      f[i] = std::stod(cell);
    }
    points.push_back({f[1], f[2], f[3], f[0], f[4]});
  }
  double spacing = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    spacing = std::max(spacing, points[i].arclength - points[i - 1].arclength);
  }
  return ReferenceTrajectory(std::move(points), spacing);
}

}  // namespace slipgain
