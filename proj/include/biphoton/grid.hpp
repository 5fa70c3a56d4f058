#pragma once

#include <cstddef>

#include "biphoton/errors.hpp"

namespace biphoton {

/// Uniform 1-D or 2-D transverse sampling grid.  Sample i on an axis sits at
/// center + (i - n/2) * spacing, so physical extent per axis is n * spacing.
struct TransverseGrid {
  int dim = 1;          // 1 or 2
  int nx = 2;           // samples along x
  int ny = 1;           // samples along y (1 when dim == 1)
  double spacing = 1.0; // meters, shared by both axes
  double cx = 0.0;      // center offset, meters
  double cy = 0.0;

  static TransverseGrid line(int n, double spacing, double center = 0.0) {
    TransverseGrid g;
    g.dim = 1;
    g.nx = n;
    g.ny = 1;
    g.spacing = spacing;
    g.cx = center;
    g.validate();
    return g;
  }

  static TransverseGrid plane(int nx, int ny, double spacing, double cx = 0.0,
                              double cy = 0.0) {
    TransverseGrid g;
    g.dim = 2;
    g.nx = nx;
    g.ny = ny;
    g.spacing = spacing;
    g.cx = cx;
    g.cy = cy;
    g.validate();
    return g;
  }

  void validate() const {
    if (dim != 1 && dim != 2) throw DimensionMismatch("grid dimensionality must be 1 or 2");
    if (spacing <= 0.0) throw Error("grid spacing must be positive");
    if (nx < 2) throw Error("grid needs at least 2 samples per axis");
    if (dim == 2 && ny < 2) throw Error("grid needs at least 2 samples per axis");
    if (dim == 1 && ny != 1) throw Error("1-D grid must have ny == 1");
  }

  std::size_t count() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  double x(int i) const { return cx + (i - nx / 2) * spacing; }
  double y(int j) const { return cy + (j - ny / 2) * spacing; }

  double extent_x() const { return nx * spacing; }
  double extent_y() const { return dim == 2 ? ny * spacing : 0.0; }
  double max_extent() const { return extent_x() > extent_y() ? extent_x() : extent_y(); }

  /// Cell length in 1-D, cell area in 2-D.
  double cell_measure() const { return dim == 1 ? spacing : spacing * spacing; }

  /// Index of the sample nearest to the given physical coordinate.
  int nearest_x(double xq) const {
    int i = nx / 2 + static_cast<int>((xq - cx) / spacing + ((xq >= cx) ? 0.5 : -0.5));
    if (i < 0) i = 0;
    if (i >= nx) i = nx - 1;
    return i;
  }
  int nearest_y(double yq) const {
    int j = ny / 2 + static_cast<int>((yq - cy) / spacing + ((yq >= cy) ? 0.5 : -0.5));
    if (j < 0) j = 0;
    if (j >= ny) j = ny - 1;
    return j;
  }

  bool operator==(const TransverseGrid&) const = default;

  bool same_shape(const TransverseGrid& o) const {
    return dim == o.dim && nx == o.nx && ny == o.ny && spacing == o.spacing &&
           cx == o.cx && cy == o.cy;
  }

  /// True when the coordinate lies within half a cell of the sampled extent.
  bool covers(double xq, double yq = 0.0) const {
    const double hx = 0.5 * extent_x();
    if (xq < cx - hx || xq > cx + hx) return false;
    if (dim == 2) {
      const double hy = 0.5 * extent_y();
      if (yq < cy - hy || yq > cy + hy) return false;
    }
    return true;
  }
};

} // namespace biphoton
