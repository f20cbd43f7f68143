#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <vector>

#include "omnivo/sphere_camera.h"

namespace omnivo {

// Distortion-aware k x k sampling grid for a convolution kernel anchored at a
// direction on the sphere. A regular grid with spacing tan(step) is laid on
// the tangent plane at the anchor and each sample is projected back onto the
// sphere and into the equirectangular image.
struct SamplingGrid {
  SphericalAngles anchor;
  int kernel_size = 1;
  double angular_step = 0.0;
  // Row-major k x k absolute pixel positions, u in [0, W). Rows run downward
  // in the image, columns eastward.
  std::vector<PixelCoord> samples;

  const PixelCoord& at(int row, int col) const {
    return samples[static_cast<size_t>(row) * kernel_size + col];
  }
  const PixelCoord& center() const { return at(kernel_size / 2, kernel_size / 2); }
};

// One equatorial pixel.
inline double default_grid_step(const SphericalCamera& cam) {
  return 2.0 * kPi / cam.width();
}

// Throws InvalidArgument for an even or non-positive k or a non-positive
// step, and PoleProximity when |phi| >= pi/2 - k * step.
SamplingGrid kernel_grid(const SphericalAngles& anchor, int k, double step,
                         const SphericalCamera& cam);

// Horizontal extent of the grid in pixels, measured across the seam relative
// to the center sample.
double horizontal_span(const SamplingGrid& grid, const SphericalCamera& cam);

// Bilinear interpolation taps for one sample: linear pixel indices
// (v * W + u) of the four neighbors and their weights. Columns wrap; rows are
// clamped to the image.
struct BilinearTap {
  std::array<int, 4> index{};
  std::array<double, 4> weight{};
};

std::vector<BilinearTap> bilinear_taps(const SamplingGrid& grid,
                                       const SphericalCamera& cam);

// Grids at longitude 0 for every image row. Because the construction is
// equivariant in longitude, the grid at any other longitude is the row grid
// shifted horizontally by fx * theta.
class RowGridTable {
 public:
  RowGridTable(const SphericalCamera& cam, int k, double step);

  int rows() const { return static_cast<int>(grids_.size()); }
  int kernel_size() const { return kernel_size_; }
  double step() const { return step_; }
  // Empty for rows inside the pole exclusion zone.
  const std::optional<SamplingGrid>& row(int v) const { return grids_.at(v); }
  bool has_row(int v) const { return grids_.at(v).has_value(); }
  // Nearest row that has a grid; the fallback for rows near the poles.
  int nearest_valid_row(int v) const;
  // Grid for row v translated to longitude theta.
  SamplingGrid shifted(int v, double theta) const;

 private:
  SphericalCamera cam_;
  int kernel_size_;
  double step_;
  std::vector<std::optional<SamplingGrid>> grids_;
};

RowGridTable row_grids(const SphericalCamera& cam, int k, double step);

// Text export: one line per valid row, `row k step u v u v ...`, 9
// significant digits.
void write_grid_table(std::ostream& out, const RowGridTable& table);

}  // namespace omnivo
