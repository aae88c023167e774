#include "helpers.hpp"

#include <doctest.h>

using namespace rsfilt;
using namespace testing;

namespace {

JointGaussian random_joint(std::mt19937_64& rng, int n) {
  JointGaussian j;
  j.mean = uniform_vec(rng, n, -1, 1);
  j.cov = random_cov(rng, n);
  for (int i = 0; i < n; ++i) j.labels.push_back("Z" + std::to_string(i));
  return j;
}

}  // namespace

TEST_CASE("conditioning in two stages equals joint conditioning") {
  std::mt19937_64 rng(71);
  const JointGaussian j = random_joint(rng, 6);
  const VectorXd v = normal_vec(rng, 3);
  const JointGaussian both = condition(j, {1, 3, 4}, v);
  const JointGaussian staged = condition(condition(j, {1}, v.head(1)), {3, 4}, v.tail(2));
  CHECK(max_abs_diff(both.mean, staged.mean) < 1e-12);
  CHECK((both.cov - staged.cov).cwiseAbs().maxCoeff() < 1e-12);
  // Observed coordinates carry their value and no variance.
  CHECK(both.mean(3) == v(1));
  CHECK(both.cov.row(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conditioning matches the Schur complement and the law of total variance") {
  std::mt19937_64 rng(72);
  const JointGaussian j = random_joint(rng, 4);
  const VectorXd v = normal_vec(rng, 2);
  const JointGaussian c = condition(j, {2, 3}, v);
  const MatrixXd S11 = j.cov.topLeftCorner(2, 2), S12 = j.cov.topRightCorner(2, 2), S22 = j.cov.bottomRightCorner(2, 2);
  const VectorXd m = j.mean.head(2) + S12 * S22.inverse() * (v - j.mean.tail(2));
  const MatrixXd P = S11 - S12 * S22.inverse() * S12.transpose();
  CHECK(max_abs_diff(c.mean.head(2), m) < 1e-12);
  CHECK((c.cov.topLeftCorner(2, 2) - P).cwiseAbs().maxCoeff() < 1e-12);
  // Var X = E Var(X|Y) + Var E(X|Y); the second term is S12 S22^-1 S21.
  CHECK((P + S12 * S22.inverse() * S12.transpose() - S11).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("conditioning on nothing and on everything") {
  std::mt19937_64 rng(73);
  const JointGaussian j = random_joint(rng, 3);
  const JointGaussian none = condition(j, {}, VectorXd());
  CHECK(none.mean == j.mean);
  CHECK(none.cov == j.cov);
  const VectorXd v = normal_vec(rng, 3);
  const JointGaussian all = condition(j, {0, 1, 2}, v);
  CHECK(all.mean == v);
  CHECK(all.cov.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate and singular conditioning") {
  JointGaussian j;
  j.mean = Eigen::Vector3d(0.0, 1.0, 2.0);
  j.cov = Eigen::Vector3d(1.0, 0.0, 1.0).asDiagonal();
  j.labels = {"a", "b", "c"};
  const JointGaussian c = condition(j, {1, 2}, Eigen::Vector2d(1.0, 3.0));
  REQUIRE(c.dropped.size() == 1);
  CHECK(c.dropped[0] == 1);
  CHECK(c.mean(2) == 3.0);

  JointGaussian s;
  s.mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d C;
  const double e = 1e-14;
  C << 1, 1, 0, 1, 1 + e, 0, 0, 0, 1;
  s.cov = C;
  s.labels = {"a", "b", "c"};
  CHECK_THROWS_AS(condition(s, {0, 1}, Eigen::Vector2d(0.5, 0.5)), SingularConditioning);
}

TEST_CASE("tilt agrees with completing the square") {
  std::mt19937_64 rng(74);
  const JointGaussian j = random_joint(rng, 4);
  const VectorXd q = Eigen::Vector2d(0.7, -0.2), c = Eigen::Vector2d(0.3, -0.5);
  const TiltResult t = tilt(j, {0, 2}, q, c);
  MatrixXd H = MatrixXd::Zero(4, 4);
  H(0, 0) = q(0);
  H(2, 2) = q(1);
  VectorXd cc = VectorXd::Zero(4);
  cc(0) = c(0);
  cc(2) = c(1);
  const double ref = log_exp_quadratic(j.mean, j.cov, H, H * cc, -0.5 * cc.dot(H * cc));
  CHECK(t.log_normalizer == doctest::Approx(ref).epsilon(1e-12));
  // Tilted law: precision adds H, mean solves (S^-1 + H) m' = S^-1 m + H c.
  const MatrixXd Si = j.cov.inverse();
  const MatrixXd cov = (Si + H).inverse();
  const VectorXd mean = cov * (Si * j.mean + H * cc);
  CHECK((t.law.cov - cov).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(max_abs_diff(t.law.mean, mean) < 1e-10);
  CHECK_THROWS_AS(tilt(j, {0}, VectorXd::Constant(1, -1e6), VectorXd::Zero(1)), TransformDiverges);
}

TEST_CASE("augmented system reproduces the recursion quantities") {
  std::mt19937_64 rng(75);
  for (int T = 1; T <= 4; ++T) {
    const auto inst = random_feasible(rng, T, -1.0);
    const VectorXd Y = draw_Y(inst.model, T);
    const VectorXd h = random_causal_h(rng, Y);
    const auto sol = solve_volterra(inst.model, inst.risk);
    const VectorXd Z = z_h(inst.model, inst.risk, sol, Y, h);
    const ZTilde zt = z_tilde(inst.model, inst.risk, sol, Y, h);
    for (std::uint64_t seed : {1u, 2u}) {
      const AugmentedSystem sys = augmented_system(inst.model, inst.risk, h, Y, seed);
      for (int t = 1; t <= T; ++t) {
        CHECK(sys.gamma_bar(t) == doctest::Approx(sol.diag(t)).epsilon(1e-10));
        CHECK(std::abs(sys.z_h(t) - Z(t - 1)) < 1e-8);
        CHECK(std::abs(sys.z_tilde(t) - zt.Z_tilde(t - 1)) < 1e-8);
        CHECK(std::abs(sys.gamma_tilde(t) - zt.gamma_tilde(t - 1)) < 1e-10);
      }
    }
  }
  const GaussianModel m = build_ma1(0.3, VectorXd::Ones(2));
  CHECK_THROWS(augmented_system(m, RiskSpec(0.5, VectorXd::Ones(2)), VectorXd::Zero(2), VectorXd::Zero(2), 1));
}

TEST_CASE("more information never increases the conditional variance") {
  std::mt19937_64 rng(76);
  const auto inst = random_feasible(rng, 4, -1.0);
  const VectorXd Y = draw_Y(inst.model, 3);
  const AugmentedSystem sys = augmented_system(inst.model, inst.risk, VectorXd::Zero(4), Y, 9);
  const int x4 = sys.joint.index(x_label(4));
  double prev = sys.conditional(0, 0).cov(x4, x4);
  for (int k = 1; k <= 3; ++k) {
    const double a = sys.conditional(k, k - 1).cov(x4, x4);
    const double b = sys.conditional(k, k).cov(x4, x4);
    CHECK(a <= prev + 1e-14);
    CHECK(b <= a + 1e-14);
    prev = b;
  }
}

TEST_CASE("marginal reorders coordinates") {
  std::mt19937_64 rng(77);
  const JointGaussian j = random_joint(rng, 4);
  const JointGaussian m = marginal(j, {3, 1});
  CHECK(m.labels == std::vector<std::string>{"Z3", "Z1"});
  CHECK(m.mean(0) == j.mean(3));
  CHECK(m.cov(0, 1) == j.cov(3, 1));
}

TEST_CASE("conditional-mean filter equals the direct formula") {
  std::mt19937_64 rng(78);
  const GaussianModel m = random_general(rng, 4);
  const AffineFilter f = conditional_mean_filter(assemble_joint(m), 4);
  const VectorXd Y = draw_Y(m, 2);
  CHECK(max_abs_diff(f.apply(Y), direct_filtered_means(m, Y)) < 1e-12);
}

TEST_CASE("backward Riccati closed form") {
  const BackwardRiccati br = backward_riccati(20);
  CHECK(br.max_discrepancy < 1e-12);
  CHECK(br.Gamma(19) == 0.0);
  CHECK(br.Gamma(18) == doctest::Approx(1.0));
  CHECK(br.Gamma(17) == doctest::Approx(1.5));
  // Fixed point of G = 1 + G / (1 + G).
  CHECK(br.Gamma(0) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(br.printed_discrepancy > 0.1);
}

TEST_CASE("random-walk example at T = 2") {
  const LegVsRsReport r = leg_vs_rs_example(2);
  // Reweighted covariance (K^-1 + I)^-1 with K = [[1,1],[1,2]] is [[2,1],[1,3]]/5;
  // first filter coefficient 0.4 / (1 + 0.4).
  CHECK(r.oracle_hbar1 == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  REQUIRE(r.brute_force_hbar1.has_value());
  CHECK(std::abs(*r.brute_force_hbar1 - 2.0 / 7.0) < 1e-5);
  // Posterior of X_1 given Y_1 is N(Y_1/2, 1/2); penalty X_1^2 gives N(Y_1/3, 1/3).
  CHECK(r.oracle_hhat1 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.pi1_over_1_plus_gamma1 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.stated_hhat1 == 0.25);
  CHECK(r.stated_hbar1 == doctest::Approx(2.0 / 3.0));
  CHECK(r.differ);
  CHECK(r.tilted_a(1) == doctest::Approx(0.5));
}

TEST_CASE("random-walk example for longer horizons") {
  for (int T : {3, 5, 10}) {
    const LegVsRsReport r = leg_vs_rs_example(T);
    CHECK(r.differ);
    CHECK(r.oracle_hhat1 == doctest::Approx(1.0 / 3.0));
    if (r.brute_force_hbar1) CHECK(std::abs(*r.brute_force_hbar1 - r.oracle_hbar1) < 1e-5);
    // Reweighted law is again AR(1): Khat(t, s) = a_t Khat(t - 1, s) for s < t.
    const GaussianModel walk = build_ar1(VectorXd::Ones(T), VectorXd::Ones(T), 0.0, VectorXd::Ones(T));
    const MatrixXd K = walk.cov();
    const MatrixXd Khat = (K.inverse() + MatrixXd::Identity(T, T)).inverse();
    for (int t = 1; t < T; ++t)
      for (int s = 0; s < t; ++s) CHECK(Khat(t, s) == doctest::Approx(r.tilted_a(t) * Khat(t - 1, s)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(leg_vs_rs_example(1), DomainError);
}
