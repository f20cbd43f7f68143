#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace omnivo {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Layout of a twist and of every 6-column pose Jacobian: translation first,
// rotation second.
inline constexpr int kTwistTranslation = 0;
inline constexpr int kTwistRotation = 3;

struct TwistSE3 {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();

  TwistSE3() = default;
  TwistSE3(const Eigen::Vector3d& v_in, const Eigen::Vector3d& omega_in)
      : v(v_in), omega(omega_in) {}

  static TwistSE3 from_vector(const Vector6d& xi) {
    return {xi.segment<3>(kTwistTranslation), xi.segment<3>(kTwistRotation)};
  }
  Vector6d vector() const {
    Vector6d xi;
    xi.segment<3>(kTwistTranslation) = v;
    xi.segment<3>(kTwistRotation) = omega;
    return xi;
  }
};

// Rigid transform x -> R x + t.
class PoseSE3 {
 public:
  PoseSE3() = default;
  PoseSE3(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static PoseSE3 identity() { return {}; }
  static PoseSE3 from_quaternion(const Eigen::Quaterniond& q,
                                 const Eigen::Vector3d& translation) {
    return {q.normalized().toRotationMatrix(), translation};
  }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation_); }
  Eigen::Matrix4d matrix() const;

  PoseSE3 inverse() const;
  PoseSE3 operator*(const PoseSE3& other) const;
  Eigen::Vector3d act(const Eigen::Vector3d& x) const {
    return rotation_ * x + translation_;
  }
  // Homogeneous action; w is carried through unchanged.
  Eigen::Vector4d act(const Eigen::Vector4d& X) const;

  // Projects the rotation back onto SO(3) to remove accumulated drift.
  void reorthonormalize();

  friend bool operator==(const PoseSE3&, const PoseSE3&) = default;

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

inline PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) { return a * b; }
inline PoseSE3 inverse(const PoseSE3& T) { return T.inverse(); }
inline Eigen::Vector4d act(const PoseSE3& T, const Eigen::Vector4d& X) {
  return T.act(X);
}

Eigen::Matrix3d hat(const Eigen::Vector3d& w);

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& omega);
// Rotation angle in [0, pi].
double rotation_angle(const Eigen::Matrix3d& R);

PoseSE3 exp_se3(const TwistSE3& xi);

// Throws NearPiRotation when the rotation angle is within 1e-6 of pi.
TwistSE3 log_se3(const PoseSE3& T);

// Adjoint for the (v, omega) ordering: exp(Adj_T xi) = T exp(xi) T^-1.
//   [ R  [t]x R ]
//   [ 0    R    ]
Matrix6d adjoint(const PoseSE3& T);

// Similarity transform x -> s R x + t.
struct Sim3 {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const {
    return scale * (rotation * x) + translation;
  }
  // Maps a camera-to-world pose into the transformed world frame.
  PoseSE3 apply(const PoseSE3& camera_to_world) const;
  Sim3 inverse() const;
};

}  // namespace omnivo
