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

#ifndef SLIPGAIN_WORLD_H_
#define SLIPGAIN_WORLD_H_

#include <cstddef>
#include <iosfwd>
#include <random>
#include <vector>

#include "slipgain/trajectory.h"

namespace slipgain {

struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

struct WorldConfig {
  double low_fraction = 0.3;
  double mu_high = 0.9;
  double mu_low = 0.01;
  double cell_size = 1.0;
  double margin = 1.0;
};

// Axis-aligned grid of friction patches. Cell (i, j) covers
// [min_x + i*cell, min_x + (i+1)*cell) x [min_y + j*cell, min_y + (j+1)*cell).
class FrictionMap {
 public:
  FrictionMap(Bounds bounds, double cell_size, int cells_x, int cells_y,
              std::vector<double> mu, double mu_high, double mu_low);

  // Friction at a point; outside the grid the high value is returned.
  double MuAt(double x, double y) const;
  double CellMu(int i, int j) const { return mu_[Index(i, j)]; }

  int cells_x() const { return cells_x_; }
  int cells_y() const { return cells_y_; }
  std::size_t cell_count() const { return mu_.size(); }
  std::size_t low_cell_count() const;
  double cell_size() const { return cell_size_; }
  const Bounds& bounds() const { return bounds_; }
  double mu_high() const { return mu_high_; }
  double mu_low() const { return mu_low_; }

 private:
  std::size_t Index(int i, int j) const {
    return static_cast<std::size_t>(j) * cells_x_ + i;
  }

  Bounds bounds_;
  double cell_size_;
  int cells_x_;
  int cells_y_;
  std::vector<double> mu_;
  double mu_high_;
  double mu_low_;
};

// Exactly round(low_fraction * cells) cells drawn uniformly without
// replacement are set to mu_low. Throws std::invalid_argument when the bounds
// are smaller than a cell or low_fraction is outside [0, 1).
FrictionMap GenerateWorld(std::mt19937_64& rng, const Bounds& bounds,
                          const WorldConfig& config = {});

// Bounding box of the trajectory samples expanded by `margin` on every side.
Bounds TrajectoryBounds(const ReferenceTrajectory& trajectory, double margin);

// CSV with header `cell_i,cell_j,mu`.
void WriteFrictionCsv(const FrictionMap& map, std::ostream& out);

}  // namespace slipgain

#endif  // SLIPGAIN_WORLD_H_
