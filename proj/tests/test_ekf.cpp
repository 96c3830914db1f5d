#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ddloc/ekf.hpp"
#include "ddloc/noise_models.hpp"
#include "fd_oracle.hpp"

using namespace ddloc;

namespace {

const RobotGeometry kGeom = RobotGeometry::reference_robot();

ProcessInput input(double wr, double wl, double dt = 0.1, double delta = 0.01) {
  return ProcessInput({wr, wl}, dt, build_q({wr, wl}, ProcessNoiseParams(delta)));
}

void expect_matrix_near(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      EXPECT_NEAR(a(r, c), b(r, c), tol) << "entry (" << r << "," << c << ")";
    }
  }
}

}  // namespace

TEST(JacobianA, StationaryIsIdentity) {
  expect_matrix_near(jacobian_a(Pose(1, 2, 0.3), {0, 0, 0, 0}), Eigen::Matrix3d::Identity(), 0);
}

TEST(JacobianA, StraightAlongX) {
  Eigen::Matrix3d expected = Eigen::Matrix3d::Identity();
  expected(1, 2) = 0.03;
  expect_matrix_near(jacobian_a(Pose(), {0.03, 0.03, 0.03, 0.0}), expected, 1e-18);
}

TEST(JacobianW, AtRestMatchesClosedForm) {
  const double dt = 0.1;
  const double k = dt * kGeom.wheel_radius();
  Eigen::Matrix<double, 3, 2> expected;
  expected << k / 2, k / 2,
              0.0, 0.0,
              k / kGeom.track_width(), -k / kGeom.track_width();
  expect_matrix_near(jacobian_w(Pose(), input(0, 0, dt), kGeom), expected, 1e-18);
}

TEST(JacobianW, VanishesAsDtShrinks) {
  const auto w = jacobian_w(Pose(0, 0, 0.4), input(6, 3, 1e-9), kGeom);
  EXPECT_LT(w.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(JacobianW, RejectsNonPositiveDt) {
  EXPECT_THROW(input(1, 1, 0.0), std::invalid_argument);
}

TEST(Jacobians, MatchFiniteDifferences) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> speed(-8.0, 8.0);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d x(pos(rng), pos(rng), ang(rng));
    const double wr = speed(rng), wl = speed(rng);
    const ProcessInput in = input(wr, wl);
    const Pose p(x(0), x(1), x(2));

    const auto a = jacobian_a(p, input_displacement(in, kGeom));
    const auto a_fd = oracle::fd_jacobian_state(x, wr, wl, in.dt, kGeom);
    EXPECT_LT(oracle::relative_error(a, a_fd), 1e-6);

    const auto w = jacobian_w(p, in, kGeom);
    const auto w_fd = oracle::fd_jacobian_input(x, wr, wl, in.dt, kGeom);
    EXPECT_LT(oracle::relative_error(w, w_fd), 1e-6);
  }
}

TEST(Predict, DeterministicSystem) {
  const StateEstimate s{Pose(0.2, 0.1, 0.5), Eigen::Matrix3d::Zero()};
  const ProcessInput in({6.0, 4.0}, 0.1, Eigen::Matrix2d::Zero());
  const StateEstimate out = predict(s, in, kGeom);
  EXPECT_EQ(out.covariance, Eigen::Matrix3d::Zero());
  EXPECT_EQ(out.mean, dead_reckon_step(s.mean, input_displacement(in, kGeom)));
}

TEST(Predict, StationaryKeepsCovariance) {
  const StateEstimate s{Pose(), Eigen::Matrix3d::Identity() * 1e-4};
  const StateEstimate out = predict(s, ProcessInput({0, 0}, 0.1, Eigen::Matrix2d::Zero()), kGeom);
  EXPECT_EQ(out.covariance, s.covariance);
}

TEST(Predict, MatchesMatrixOracle) {
  // Frozen from an independent numpy script: finite-difference A and W,
  // P- = A P A^T + W Q W^T at theta = 0, omega = (6, 6), delta = 0.01.
  const StateEstimate s{Pose(), Eigen::Matrix3d::Identity() * 1e-4};
  const StateEstimate out = predict(s, input(6, 6), kGeom);
  Eigen::Matrix3d expected;
  expected << 1.045e-4, 0.0, 0.0,
              0.0, 1.0010125e-4, 3.75e-6,
              0.0, 3.75e-6, 1.5e-4;
  expect_matrix_near(out.covariance, expected, 1e-15);
  EXPECT_NEAR(out.mean.x(), 0.03, 1e-15);
}

TEST(Predict, RejectsIndefiniteCovariance) {
  StateEstimate s{Pose(), Eigen::Matrix3d::Identity() * 1e-4};
  s.covariance(2, 2) = -1e-3;
  EXPECT_THROW(predict(s, input(1, 1), kGeom), NumericError);
}

TEST(Update, PerfectMeasurementLimit) {
  const StateEstimate prior{Pose(0.1, 0.2, 0.3), Eigen::Matrix3d::Identity() * 1e-2};
  const Measurement z(0.4, -0.1, -0.2, {1e-12, 1e-12, 1e-12});
  const StateEstimate post = update(prior, z);
  EXPECT_NEAR(post.mean.x(), 0.4, 1e-6);
  EXPECT_NEAR(post.mean.y(), -0.1, 1e-6);
  EXPECT_NEAR(post.mean.theta(), -0.2, 1e-6);
}

TEST(Update, UselessMeasurementLimit) {
  const StateEstimate prior{Pose(0.1, 0.2, 0.3), Eigen::Matrix3d::Identity() * 1e-2};
  const Measurement z(5.0, -5.0, 2.0, {1e12, 1e12, 1e12});
  const StateEstimate post = update(prior, z);
  EXPECT_NEAR(post.mean.x(), 0.1, 1e-9);
  EXPECT_NEAR(post.mean.y(), 0.2, 1e-9);
  EXPECT_NEAR(post.mean.theta(), 0.3, 1e-9);
  expect_matrix_near(post.covariance, prior.covariance, 1e-14);
}

TEST(Update, ScalarGainOfOneHalf) {
  const StateEstimate prior{Pose(), Eigen::Matrix3d::Identity() * 0.01};
  const Measurement z(0.1, -0.1, 0.05, {0.01, 0.01, 0.01});
  const StateEstimate post = update(prior, z);
  EXPECT_NEAR(post.mean.x(), 0.05, 1e-15);
  EXPECT_NEAR(post.mean.y(), -0.05, 1e-15);
  EXPECT_NEAR(post.mean.theta(), 0.025, 1e-15);
  expect_matrix_near(post.covariance, Eigen::Matrix3d::Identity() * 0.005, 1e-15);
}

TEST(Update, DegenerateInnovationRejected) {
  const StateEstimate prior{Pose(), Eigen::Matrix3d::Zero()};
  const Measurement z(0.1, 0.0, 0.0, {0.0, 0.0, 0.0});
  EXPECT_THROW(update(prior, z), NumericError);
}

TEST(Update, WrapsHeadingInnovation) {
  const StateEstimate prior{Pose(0, 0, -kPi + 0.01), Eigen::Matrix3d::Identity() * 0.01};
  const Measurement z(0, 0, kPi - 0.01, {0.01, 0.01, 0.01});
  EXPECT_NEAR(innovation(prior, z)(2), -0.02, 1e-12);
  const StateEstimate post = update(prior, z);
  // Half of the short way round, crossing the +/-pi seam.
  EXPECT_NEAR(wrap_angle(post.mean.theta() - (-kPi)), 0.0, 1e-12);
}

TEST(Measurement, Validation) {
  EXPECT_THROW(Measurement(0, 0, 0, {-1.0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(Measurement(NAN, 0, 0, {0, 0, 0}), std::invalid_argument);
  EXPECT_NEAR(Measurement(0, 0, 3 * kPi, {}).theta_meas, kPi, 1e-12);
}

TEST(Step, WithoutMeasurementEqualsPredict) {
  const StateEstimate s{Pose(1, 1, 1), Eigen::Matrix3d::Identity() * 1e-4};
  const ProcessInput in = input(5, 6);
  const StateEstimate a = step(s, in, std::nullopt, kGeom);
  const StateEstimate b = predict(s, in, kGeom);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.covariance, b.covariance);
}

TEST(Step, UselessMeasurementEqualsPredict) {
  const StateEstimate s{Pose(1, 1, 1), Eigen::Matrix3d::Identity() * 1e-4};
  const ProcessInput in = input(5, 6);
  const StateEstimate a = step(s, in, Measurement(0, 0, 0, {1e12, 1e12, 1e12}), kGeom);
  const StateEstimate b = predict(s, in, kGeom);
  EXPECT_NEAR(a.mean.x(), b.mean.x(), 1e-9);
  EXPECT_NEAR(a.mean.y(), b.mean.y(), 1e-9);
  EXPECT_NEAR(a.mean.theta(), b.mean.theta(), 1e-9);
}

TEST(Step, FullTickMatchesMatrixOracle) {
  // Frozen from a numpy script with the closed-form W: one predict + update
  // with the reference wheel radius, track, dt and delta.
  Eigen::Matrix3d p;
  p << 2e-4, 1e-5, -2e-5,
       1e-5, 3e-4, 4e-5,
       -2e-5, 4e-5, 1e-4;
  const StateEstimate s{Pose(1.0, -0.5, 0.7), p};
  const double r33 = deg_to_rad(0.1) * deg_to_rad(0.1);
  const Measurement z(1.03, -0.47, 0.72, {1e-4, 1e-4, r33});

  const StateEstimate prior = predict(s, input(6, 5), kGeom);
  EXPECT_NEAR(prior.mean.x(), 1.020959161174666, 1e-12);
  EXPECT_NEAR(prior.mean.y(), -0.4821965294716346, 1e-12);
  EXPECT_NEAR(prior.mean.theta(), 0.7083333333333333, 1e-12);
  Eigen::Matrix3d prior_p;
  prior_p << 2.02930680943415e-04, 1.0713656732850255e-05, -2.0410837684888787e-05,
             1.0713656732850257e-05, 3.033543246692623e-04, 4.4023465339154906e-05,
             -2.0410837684888787e-05, 4.4023465339154906e-05, 1.4236111111111112e-04;
  expect_matrix_near(prior.covariance, prior_p, 1e-12);

  const StateEstimate post = step(s, input(6, 5), z, kGeom);
  EXPECT_NEAR(post.mean.x(), 1.0265579540108558, 1e-10);
  EXPECT_NEAR(post.mean.y(), -0.47207239116440947, 1e-10);
  EXPECT_NEAR(post.mean.theta(), 0.7197599869349685, 1e-10);
  Eigen::Matrix3d post_p;
  post_p << 6.659249202620197e-05, 1.4469835487771943e-06, -1.5619270714521416e-07,
            1.4469835487771943e-06, 7.429799670886218e-05, 2.4322616305333787e-07,
            -1.5619270714521416e-07, 2.4322616305333787e-07, 2.9794480780605903e-06;
  expect_matrix_near(post.covariance, post_p, 1e-12);
}

TEST(CovarianceHealth, RandomCycles) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> speed(-8.0, 8.0);
  std::uniform_real_distribution<double> log_var(-8.0, -1.0);
  std::uniform_real_distribution<double> offset(-0.5, 0.5);
  StateEstimate s = StateEstimate::initial(Pose());
  for (int i = 0; i < 2000; ++i) {
    const StateEstimate prior = predict(s, input(speed(rng), speed(rng)), kGeom);
    const Measurement z(prior.mean.x() + offset(rng), prior.mean.y() + offset(rng),
                        prior.mean.theta() + offset(rng),
                        {std::pow(10.0, log_var(rng)), std::pow(10.0, log_var(rng)),
                         std::pow(10.0, log_var(rng))});
    s = update(prior, z);
    ASSERT_LE(max_asymmetry(s.covariance), 1e-12);
    ASSERT_GE(min_eigenvalue(s.covariance), -1e-12);
    ASSERT_GE(min_eigenvalue(prior.covariance - s.covariance), -1e-12);
  }
}

TEST(DegenerateLimit, FilterEqualsDeadReckoning) {
  StateEstimate s{Pose(), Eigen::Matrix3d::Zero()};
  Pose dr;
  for (int i = 0; i < 600; ++i) {
    const double wr = 6.0, wl = i % 100 < 30 ? 1.0 : 6.0;
    const ProcessInput in({wr, wl}, 0.1, Eigen::Matrix2d::Zero());
    dr = dead_reckon_step(dr, input_displacement(in, kGeom));
    s = step(s, in, Measurement(0, 0, 0, {1e12, 1e12, 1e12}), kGeom);
    ASSERT_NEAR(s.mean.x(), dr.x(), 1e-12);
    ASSERT_NEAR(s.mean.y(), dr.y(), 1e-12);
    ASSERT_NEAR(wrap_angle(s.mean.theta() - dr.theta()), 0.0, 1e-12);
  }
}
