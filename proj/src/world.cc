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

#include "slipgain/world.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace slipgain {

FrictionMap::FrictionMap(Bounds bounds, double cell_size, int cells_x,
                         int cells_y, std::vector<double> mu, double mu_high,
                         double mu_low)
    : bounds_(bounds),
      cell_size_(cell_size),
      cells_x_(cells_x),
      cells_y_(cells_y),
      mu_(std::move(mu)),
      mu_high_(mu_high),
      mu_low_(mu_low) {
  if (cells_x_ < 1 || cells_y_ < 1 ||
      mu_.size() != static_cast<std::size_t>(cells_x_) * cells_y_) {
    throw std::invalid_argument("friction map: grid shape mismatch");
  }
}

double FrictionMap::MuAt(double x, double y) const {
  const double fi = std::floor((x - bounds_.min_x) / cell_size_);
  const double fj = std::floor((y - bounds_.min_y) / cell_size_);
  if (!(fi >= 0.0 && fi < cells_x_ && fj >= 0.0 && fj < cells_y_)) {
    return mu_high_;
  }
  return mu_[Index(static_cast<int>(fi), static_cast<int>(fj))];
}

std::size_t FrictionMap::low_cell_count() const {
  return static_cast<std::size_t>(
      std::count(mu_.begin(), mu_.end(), mu_low_));
}

FrictionMap GenerateWorld(std::mt19937_64& rng, const Bounds& bounds,
                          const WorldConfig& config) {
  if (!(config.cell_size > 0.0)) {
    throw std::invalid_argument("world: cell size must be positive");
  }
  if (!(config.low_fraction >= 0.0 && config.low_fraction < 1.0)) {
    throw std::invalid_argument("world: low_fraction must be in [0, 1)");
  }
  if (!(config.mu_high > 0.0 && config.mu_low > 0.0)) {
    throw std::invalid_argument("world: friction coefficients must be positive");
  }
  const double width = bounds.max_x - bounds.min_x;
  const double height = bounds.max_y - bounds.min_y;
  if (!(width >= config.cell_size && height >= config.cell_size)) {
    throw std::invalid_argument("world: bounds smaller than one cell");
  }
  const int cells_x = static_cast<int>(std::ceil(width / config.cell_size - 1e-9));
  const int cells_y = static_cast<int>(std::ceil(height / config.cell_size - 1e-9));
  const std::size_t total = static_cast<std::size_t>(cells_x) * cells_y;
  const auto low_count = static_cast<std::size_t>(
      std::llround(config.low_fraction * static_cast<double>(total)));

  // Partial Fisher-Yates: the first low_count entries become the low cells.
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < low_count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, total - 1);
    std::swap(order[k], order[pick(rng)]);
  }
  std::vector<double> mu(total, config.mu_high);
  for (std::size_t k = 0; k < low_count; ++k) mu[order[k]] = config.mu_low;

  Bounds grid = bounds;
  grid.max_x = bounds.min_x + cells_x * config.cell_size;
  grid.max_y = bounds.min_y + cells_y * config.cell_size;
  return FrictionMap(grid, config.cell_size, cells_x, cells_y, std::move(mu),
                     config.mu_high, config.mu_low);
}

Bounds TrajectoryBounds(const ReferenceTrajectory& trajectory, double margin) {
  Bounds b{trajectory.front().x, trajectory.front().y, trajectory.front().x,
           trajectory.front().y};
  for (const ReferencePoint& p : trajectory.points()) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  b.min_x -= margin;
  b.min_y -= margin;
  b.max_x += margin;
  b.max_y += margin;
  return b;
}

void WriteFrictionCsv(const FrictionMap& map, std::ostream& out) {
  out << "cell_i,cell_j,mu\n";
  for (int j = 0; j < map.cells_y(); ++j) {
    for (int i = 0; i < map.cells_x(); ++i) {
      out << i << ',' << j << ',' << map.CellMu(i, j) << '\n';
    }
  }
}

}  // namespace slipgain
