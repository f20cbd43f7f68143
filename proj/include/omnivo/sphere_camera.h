#pragma once

#include <optional>

#include <Eigen/Core>

#include "omnivo/constants.h"
#include "omnivo/error.h"

namespace omnivo {

// Camera frame convention used throughout: +z forward, +x right, -y up. The
// forward axis maps to the image center and -y to the top row (v = 0).

// Points closer than this to the optical center cannot be projected.
inline constexpr double kNormEpsilon = 1e-12;
// Minimum distance from the vertical axis, relative to the point norm. Inside
// it the longitude is undefined and the projection Jacobian blows up.
inline constexpr double kPoleEpsilon = 1e-8;

using Point3H = Eigen::Vector4d;
using Matrix2x4 = Eigen::Matrix<double, 2, 4>;

inline Point3H homogeneous(const Eigen::Vector3d& xyz) {
  return Point3H(xyz.x(), xyz.y(), xyz.z(), 1.0);
}

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;

  Eigen::Vector2d vector() const { return {u, v}; }
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

struct SphericalAngles {
  double theta = 0.0;  // longitude in [-pi, pi]
  double phi = 0.0;    // latitude in [-pi/2, pi/2]
};

struct InverseDepth {
  double value = 0.0;

  InverseDepth() = default;
  explicit InverseDepth(double v) : value(v) {}
};

// Equirectangular camera. The intrinsics depend only on the resolution:
//   fx = W / 2pi, fy = -H / pi, cx = W / 2, cy = H / 2.
// Nothing assumes W = 2H.
class SphericalCamera {
 public:
  SphericalCamera(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  double fx() const { return width_ / (2.0 * kPi); }
  double fy() const { return -height_ / kPi; }
  double cx() const { return width_ / 2.0; }
  double cy() const { return height_ / 2.0; }

  friend bool operator==(const SphericalCamera&,
                         const SphericalCamera&) = default;

 private:
  int width_;
  int height_;
};

PixelCoord angles_to_pixel(const SphericalAngles& angles,
                           const SphericalCamera& cam);

// Inverse of angles_to_pixel. Latitudes past a pole are reflected back over
// it (with a half-turn in longitude) and longitude is wrapped into [-pi, pi].
SphericalAngles pixel_to_angles(const PixelCoord& p, const SphericalCamera& cam);

// Unit bearing for the given angles.
Eigen::Vector3d bearing(const SphericalAngles& angles);

enum class PointStatus { kOk, kDegenerate, kPole };

PointStatus classify_point(const Eigen::Vector3d& xyz);

std::optional<PixelCoord> try_project(const Eigen::Vector3d& xyz,
                                      const SphericalCamera& cam);

// Throws DegeneratePoint or PoleSingular.
PixelCoord project(const Point3H& X, const SphericalCamera& cam);
PixelCoord project(const Eigen::Vector3d& xyz, const SphericalCamera& cam);

// Point at Euclidean distance 1/d along the pixel's bearing, w = 1.
// Throws NonPositiveDepth.
Point3H unproject(const PixelCoord& p, InverseDepth depth,
                  const SphericalCamera& cam);

// d(u, v)/d(x, y, z, w). The last column is zero. Throws PoleSingular.
Matrix2x4 projection_jacobian(const Point3H& X, const SphericalCamera& cam);

// d(unproject(p, d))/d(d) = -(1/d^2) * (bearing, 0).
Eigen::Vector4d unprojection_depth_jacobian(const PixelCoord& p,
                                            InverseDepth depth,
                                            const SphericalCamera& cam);

// Wraps a horizontal pixel difference into [-W/2, W/2).
double wrap_u_difference(double du, const SphericalCamera& cam);

// Wraps an absolute horizontal coordinate into [0, W).
double wrap_u(double u, const SphericalCamera& cam);

}  // namespace omnivo
