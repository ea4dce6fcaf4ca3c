#pragma once

#include <stdexcept>

#include "homog/types.hpp"

namespace homog {

// Uniform grid on the unit torus, nodes x_i = i/n covering [0,1) once.
struct TorusGrid {
  int n_points;
  explicit TorusGrid(int n) : n_points(n) {
    if (n < 8) throw std::invalid_argument("TorusGrid: need n_points >= 8");
  }
  double spacing() const { return 1.0 / n_points; }
  double node(int i) const { return i * spacing(); }
};

// Uniform grid of interior nodes of (a,b); exterior values are identically
// zero. Node i sits at a + (i+1)h, i = 0..n_interior-1, h = (b-a)/(n+1).
// The quadrature cell of node i is [x_i - h/2, x_i + h/2], except that the
// first and last cells are extended to the boundary so that the cells plus
// the exterior tile all of R: every jump is then either an off-diagonal
// entry or part of the killing rate.
struct DomainGrid {
  Interval interval;
  int n_interior;
  DomainGrid(Interval iv, int n) : interval(iv), n_interior(n) {
    if (!(iv.a < iv.b)) throw std::invalid_argument("DomainGrid: need a < b");
    if (n < 8) throw std::invalid_argument("DomainGrid: need n_interior >= 8");
  }
  double spacing() const { return interval.length() / (n_interior + 1); }
  double node(int i) const { return interval.a + (i + 1) * spacing(); }
  double cell_lo(int i) const {
    return i == 0 ? interval.a : node(i) - 0.5 * spacing();
  }
  double cell_hi(int i) const {
    return i == n_interior - 1 ? interval.b : node(i) + 0.5 * spacing();
  }
};

} // namespace homog
