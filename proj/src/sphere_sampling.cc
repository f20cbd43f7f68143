#include "omnivo/sphere_sampling.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace omnivo {
namespace {

void check_kernel(int k, double step) {
  if (k < 1 || k % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "kernel size must be odd and >= 1");
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::kInvalidArgument, "angular step must be positive");
  }
}

bool near_pole(double phi, int k, double step) {
  return std::abs(phi) >= kPi / 2.0 - k * step;
}

}  // namespace

SamplingGrid kernel_grid(const SphericalAngles& anchor, int k, double step,
                         const SphericalCamera& cam) {
  check_kernel(k, step);
  if (near_pole(anchor.phi, k, step)) {
    throw Error(ErrorCode::kPoleProximity, "kernel anchor too close to a pole");
  }

  const double st = std::sin(anchor.theta), ct = std::cos(anchor.theta);
  const double sp = std::sin(anchor.phi), cp = std::cos(anchor.phi);
  const Eigen::Vector3d forward = bearing(anchor);
  // Tangent basis: east follows increasing longitude (increasing u), down
  // follows decreasing latitude (increasing v).
  const Eigen::Vector3d east(ct, 0.0, -st);
  const Eigen::Vector3d down(sp * st, cp, sp * ct);
  const double spacing = std::tan(step);
  const int half = k / 2;

  SamplingGrid grid;
  grid.anchor = anchor;
  grid.kernel_size = k;
  grid.angular_step = step;
  grid.samples.reserve(static_cast<size_t>(k) * k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      PixelCoord p;
      if (r == half && c == half) {
        p = angles_to_pixel(anchor, cam);
      } else {
        const Eigen::Vector3d ray =
            (forward + (c - half) * spacing * east + (r - half) * spacing * down)
                .normalized();
        const SphericalAngles a{std::atan2(ray.x(), ray.z()),
                                std::asin(std::clamp(-ray.y(), -1.0, 1.0))};
        p = angles_to_pixel(a, cam);
      }
      p.u = wrap_u(p.u, cam);
      grid.samples.push_back(p);
    }
  }
  return grid;
}

double horizontal_span(const SamplingGrid& grid, const SphericalCamera& cam) {
  const double u0 = grid.center().u;
  double lo = 0.0, hi = 0.0;
  for (const PixelCoord& p : grid.samples) {
    const double du = wrap_u_difference(p.u - u0, cam);
    lo = std::min(lo, du);
    hi = std::max(hi, du);
  }
  return hi - lo;
}

std::vector<BilinearTap> bilinear_taps(const SamplingGrid& grid,
                                       const SphericalCamera& cam) {
  const int w = cam.width();
  const int h = cam.height();
  std::vector<BilinearTap> taps;
  taps.reserve(grid.samples.size());
  for (const PixelCoord& p : grid.samples) {
    const double v = std::clamp(p.v, 0.0, static_cast<double>(h - 1));
    const double u0 = std::floor(p.u);
    const double v0 = std::floor(v);
    const double fu = p.u - u0;
    const double fv = v - v0;
    const int c0 = ((static_cast<int>(u0) % w) + w) % w;
    const int c1 = (c0 + 1) % w;
    const int r0 = static_cast<int>(v0);
    const int r1 = std::min(r0 + 1, h - 1);
    BilinearTap t;
    t.index = {r0 * w + c0, r0 * w + c1, r1 * w + c0, r1 * w + c1};
    t.weight = {(1.0 - fu) * (1.0 - fv), fu * (1.0 - fv), (1.0 - fu) * fv, fu * fv};
    taps.push_back(t);
  }
  return taps;
}

RowGridTable::RowGridTable(const SphericalCamera& cam, int k, double step)
    : cam_(cam), kernel_size_(k), step_(step) {
  check_kernel(k, step);
  grids_.resize(static_cast<size_t>(cam.height()));
  for (int v = 0; v < cam.height(); ++v) {
    const SphericalAngles a = pixel_to_angles({cam.cx(), static_cast<double>(v)}, cam);
    if (near_pole(a.phi, k, step)) continue;
    grids_[static_cast<size_t>(v)] = kernel_grid({0.0, a.phi}, k, step, cam);
  }
}

int RowGridTable::nearest_valid_row(int v) const {
  const int n = rows();
  for (int d = 0; d < n; ++d) {
    if (v - d >= 0 && v - d < n && grids_[static_cast<size_t>(v - d)]) return v - d;
    if (v + d >= 0 && v + d < n && grids_[static_cast<size_t>(v + d)]) return v + d;
  }
  throw Error(ErrorCode::kPoleProximity, "no row admits a kernel of this size");
}

SamplingGrid RowGridTable::shifted(int v, double theta) const {
  const std::optional<SamplingGrid>& base = grids_.at(static_cast<size_t>(v));
  if (!base) throw Error(ErrorCode::kPoleProximity, "row " + std::to_string(v) + " has no grid");
  SamplingGrid g = *base;
  g.anchor.theta = theta;
  const double du = cam_.fx() * theta;
  for (PixelCoord& p : g.samples) p.u = wrap_u(p.u + du, cam_);
  return g;
}

RowGridTable row_grids(const SphericalCamera& cam, int k, double step) {
  return RowGridTable(cam, k, step);
}

void write_grid_table(std::ostream& out, const RowGridTable& table) {
  char buf[64];
  for (int v = 0; v < table.rows(); ++v) {
    if (!table.has_row(v)) continue;
    std::snprintf(buf, sizeof buf, "%d %d %.9g", v, table.kernel_size(), table.step());
    out << buf;
    for (const PixelCoord& p : table.row(v)->samples) {
      std::snprintf(buf, sizeof buf, " %.9g %.9g", p.u, p.v);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace omnivo
