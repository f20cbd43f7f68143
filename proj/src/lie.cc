#include "omnivo/lie.h"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "omnivo/constants.h"
#include "omnivo/error.h"

namespace omnivo {
namespace {

// Below this rotation angle exp/log switch to second-order Taylor series.
constexpr double kSmallAngle = 1e-8;
constexpr double kNearPiMargin = 1e-6;

Eigen::Vector3d vee(const Eigen::Matrix3d& M) {
  return {M(2, 1) - M(1, 2), M(0, 2) - M(2, 0), M(1, 0) - M(0, 1)};
}

}  // namespace

Eigen::Matrix4d PoseSE3::matrix() const {
  Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
  M.topLeftCorner<3, 3>() = rotation_;
  M.topRightCorner<3, 1>() = translation_;
  return M;
}

PoseSE3 PoseSE3::inverse() const {
  const Eigen::Matrix3d Rt = rotation_.transpose();
  return {Rt, -(Rt * translation_)};
}

PoseSE3 PoseSE3::operator*(const PoseSE3& other) const {
  return {rotation_ * other.rotation_,
          rotation_ * other.translation_ + translation_};
}

Eigen::Vector4d PoseSE3::act(const Eigen::Vector4d& X) const {
  Eigen::Vector4d out;
  out.head<3>() = rotation_ * X.head<3>() + translation_ * X.w();
  out.w() = X.w();
  return out;
}

void PoseSE3::reorthonormalize() {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(rotation_,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Eigen::Matrix3d U = svd.matrixU();
    U.col(2) *= -1.0;
    R = U * svd.matrixV().transpose();
  }
  rotation_ = R;
}

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d K;
  K << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return K;
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  const Eigen::Matrix3d K = hat(omega);
  if (theta < kSmallAngle) {
    return Eigen::Matrix3d::Identity() + K + 0.5 * K * K;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Eigen::Matrix3d::Identity() + a * K + b * K * K;
}

double rotation_angle(const Eigen::Matrix3d& R) {
  const double c = 0.5 * (R.trace() - 1.0);
  const double s = 0.5 * vee(R).norm();
  return std::atan2(s, c);
}

PoseSE3 exp_se3(const TwistSE3& xi) {
  const double theta = xi.omega.norm();
  const Eigen::Matrix3d K = hat(xi.omega);
  const Eigen::Matrix3d K2 = K * K;
  Eigen::Matrix3d V;
  if (theta < kSmallAngle) {
    V = Eigen::Matrix3d::Identity() + 0.5 * K + K2 / 6.0;
  } else {
    const double t2 = theta * theta;
    V = Eigen::Matrix3d::Identity() + ((1.0 - std::cos(theta)) / t2) * K +
        ((theta - std::sin(theta)) / (t2 * theta)) * K2;
  }
  return {exp_so3(xi.omega), V * xi.v};
}

TwistSE3 log_se3(const PoseSE3& T) {
  const Eigen::Matrix3d& R = T.rotation();
  const Eigen::Vector3d axis_sin = vee(R);  // 2 sin(theta) * axis
  const double theta = rotation_angle(R);
  if (theta > kPi - kNearPiMargin) {
    throw Error(ErrorCode::kNearPiRotation,
                "rotation angle too close to pi for a unique logarithm");
  }

  Eigen::Vector3d omega;
  double coef;
  if (theta < kSmallAngle) {
    omega = 0.5 * axis_sin;
    coef = 1.0 / 12.0;
  } else {
    omega = (theta / (2.0 * std::sin(theta))) * axis_sin;
    const double half = 0.5 * theta;
    coef = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
  }
  const Eigen::Matrix3d K = hat(omega);
  const Eigen::Matrix3d V_inv = Eigen::Matrix3d::Identity() - 0.5 * K + coef * K * K;
  return {V_inv * T.translation(), omega};
}

Matrix6d adjoint(const PoseSE3& T) {
  const Eigen::Matrix3d& R = T.rotation();
  Matrix6d Ad = Matrix6d::Zero();
  Ad.block<3, 3>(kTwistTranslation, kTwistTranslation) = R;
  Ad.block<3, 3>(kTwistTranslation, kTwistRotation) = hat(T.translation()) * R;
  Ad.block<3, 3>(kTwistRotation, kTwistRotation) = R;
  return Ad;
}

PoseSE3 Sim3::apply(const PoseSE3& camera_to_world) const {
  return {rotation * camera_to_world.rotation(),
          apply(camera_to_world.translation())};
}

Sim3 Sim3::inverse() const {
  Sim3 inv;
  inv.scale = 1.0 / scale;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.scale * (inv.rotation * translation));
  return inv;
}

}  // namespace omnivo
