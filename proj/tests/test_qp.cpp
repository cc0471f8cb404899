#include "psc/qp.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace psc;

namespace {

BoxQP two_point(double cap) {
  BoxQP p;
  p.g = Eigen::MatrixXd::Identity(2, 2);
  p.y = Eigen::Vector2d(1, -1);
  p.upper = Eigen::Vector2d::Constant(cap);
  return p;
}

BoxQP random_problem(oracle::Gen& gen, Eigen::Index n) {
  BoxQP p;
  p.g = gen.psd(n);
  p.y.resize(n);
  p.upper.resize(n);
  p.y[0] = 1;
  p.y[1] = -1;
  for (Eigen::Index i = 2; i < n; ++i) {
    p.y[i] = gen.integer(0, 1) == 1 ? 1 : -1;
  }
  // Shuffle so the two forced labels are not always first.
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen.engine());
  Eigen::VectorXd y = p.y;
  for (Eigen::Index i = 0; i < n; ++i) {
    p.y[i] = y[perm[static_cast<std::size_t>(i)]];
    p.upper[i] = gen.uniform(0.05, 3.0);
  }
  return p;
}

void check_feasible(const BoxQP& p, const DualSolution& s) {
  for (Eigen::Index i = 0; i < s.alpha.size(); ++i) {
    CHECK(s.alpha[i] >= 0.0);
    CHECK(s.alpha[i] <= p.upper[i]);
  }
  CHECK(std::abs(p.y.dot(s.alpha)) <= 1e-10 * p.upper.sum());
}

} // namespace

TEST_SUITE("qp") {

TEST_CASE("two-point problem, cap below the free optimum") {
  const BoxQP p = two_point(0.5);
  const DualSolution s = solve_smo(p);
  CHECK(s.converged);
  CHECK(s.alpha[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.alpha[1] == doctest::Approx(0.5).epsilon(1e-12));
  const DualSolution b = brute_force_small(p, 101);
  CHECK(b.alpha[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("two-point problem, free optimum inside the box") {
  const BoxQP p = two_point(3.0);
  const DualSolution s = solve_smo(p);
  CHECK(s.alpha[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.alpha[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kkt_violation(p, s.alpha) <= 1e-12);
  CHECK(kkt_violation(p, Eigen::Vector2d::Zero()) == doctest::Approx(2.0));
}

TEST_CASE("caps collapse the box") {
  const double eps = 1e-9;
  const DualSolution s = solve_smo(two_point(eps));
  CHECK(s.alpha[0] == doctest::Approx(eps).epsilon(1e-9));
  CHECK(s.alpha[1] == doctest::Approx(eps).epsilon(1e-9));
  CHECK_THROWS(solve_smo(two_point(0.0)));
  CHECK_THROWS(solve_smo(two_point(-1.0)));
}

TEST_CASE("malformed problems are rejected") {
  BoxQP p = two_point(1.0);
  p.g(0, 1) = 0.3;
  CHECK_THROWS(solve_smo(p));
  p = two_point(1.0);
  p.y[1] = 0.5;
  CHECK_THROWS(solve_smo(p));
  p = two_point(1.0);
  p.upper.resize(3);
  p.upper.setOnes();
  CHECK_THROWS(solve_smo(p));
  oracle::Gen gen(1);
  CHECK_THROWS(brute_force_small(random_problem(gen, 5), 11));
}

TEST_CASE("violation is invariant under a consistent permutation") {
  oracle::Gen gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = gen.integer(2, 8);
    const BoxQP p = random_problem(gen, n);
    Eigen::VectorXd a(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a[i] = gen.uniform(0.0, p.upper[i]);
    }
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen.engine());
    Eigen::PermutationMatrix<Eigen::Dynamic> pm(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      pm.indices()[i] = perm[static_cast<std::size_t>(i)];
    }
    BoxQP q;
    q.g = pm * p.g * pm.transpose();
    q.y = pm * p.y;
    q.upper = pm * p.upper;
    CHECK(kkt_violation(q, pm * a) == doctest::Approx(kkt_violation(p, a)).epsilon(1e-13));
  }
}

TEST_CASE("three variables with a known interior optimum on the grid") {
  // Diagonal part fixes G a* = 1 - 0.2 y at a* = (0.1, 0.12, 0.22); the
  // rank-one term is orthogonal to a* so it leaves that equation intact.
  const Eigen::Vector3d star(0.1, 0.12, 0.22);
  const Eigen::Vector3d v(1.2, -1.0, 0.0);
  BoxQP p;
  p.y = Eigen::Vector3d(1, 1, -1);
  const Eigen::Vector3d target = Eigen::Vector3d::Ones() - 0.2 * p.y;
  p.g = Eigen::Matrix3d(target.cwiseQuotient(star).asDiagonal()) + v * v.transpose();
  p.upper = Eigen::Vector3d::Constant(0.4);

  const DualSolution s = solve_smo(p, {1e-10, 1'000'000, false});
  const DualSolution b = brute_force_small(p, 201);
  CHECK((s.alpha - star).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((b.alpha - s.alpha).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK(std::abs(b.objective - s.objective) <= 1e-6);
}

TEST_CASE("brute force: zero Gram and nested grids") {
  BoxQP p;
  p.g = Eigen::Matrix3d::Zero();
  p.y = Eigen::Vector3d(1, -1, -1);
  p.upper = Eigen::Vector3d(2.0, 0.5, 0.75);
  // Maximize the sum: a1 = a2 + a3 capped by 2 with a2 + a3 <= 1.25.
  const DualSolution b = brute_force_small(p, 41);
  CHECK(b.objective == doctest::Approx(2.5));

  oracle::Gen gen(23);
  for (int trial = 0; trial < 10; ++trial) {
    const BoxQP q = random_problem(gen, 3);
    double last = -1.0;
    for (int points : {3, 5, 9, 17, 33, 65}) {
      const double value = brute_force_small(q, points).objective;
      CHECK(value >= last - 1e-14);
      last = value;
    }
  }
  CHECK_THROWS(brute_force_small(p, 1));
  CHECK_THROWS(brute_force_small(p, 402));
}

TEST_CASE("property: SMO is feasible, monotone, and beats every grid") {
  oracle::Gen gen(4242);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index n = gen.integer(2, 3);
    const BoxQP p = random_problem(gen, n);
    const DualSolution s = solve_smo(p, {1e-9, 1'000'000, true});
    CHECK(s.converged);
    check_feasible(p, s);
    CHECK(s.kkt_residual <= 1e-9);
    CHECK(s.objective == doctest::Approx(oracle::dual_value(p.g, s.alpha)).epsilon(1e-12));
    for (std::size_t k = 1; k < s.objective_trace.size(); ++k) {
      CHECK(s.objective_trace[k] >= s.objective_trace[k - 1] - 1e-12);
    }
    const int points = n == 2 ? 401 : 121;
    const DualSolution b = brute_force_small(p, points);
    CHECK(b.objective <= s.objective + 1e-9);
    CHECK(s.objective - b.objective <=
          oracle::grid_gap_bound(p.g, p.y, p.upper, s.alpha, points));
  }
}

TEST_CASE("property: larger random problems stay feasible and converge") {
  oracle::Gen gen(808);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = gen.integer(4, 40);
    const BoxQP p = random_problem(gen, n);
    const DualSolution s = solve_smo(p, {1e-6, 10'000'000, true});
    CHECK(s.converged);
    check_feasible(p, s);
    CHECK(kkt_violation(p, s.alpha) <= 1e-6);
    CHECK(s.kkt_residual == doctest::Approx(kkt_violation(p, s.alpha)).epsilon(1e-9));
    for (std::size_t k = 1; k < s.objective_trace.size(); ++k) {
      CHECK(s.objective_trace[k] >= s.objective_trace[k - 1] - 1e-12);
    }
  }
}

TEST_CASE("iteration cap reports non-convergence") {
  oracle::Gen gen(9);
  const BoxQP p = random_problem(gen, 30);
  const DualSolution s = solve_smo(p, {1e-12, 2, false});
  CHECK_FALSE(s.converged);
  CHECK(s.iterations == 2);
  check_feasible(p, s);
}

}
