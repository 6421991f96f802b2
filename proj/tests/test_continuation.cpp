#include <doctest.h>

#include <cmath>

#include "kshell/continuation.hpp"

using namespace kshell;

namespace {

// Softening spring F(q) = q - q^3 with the analytic limit point at
// q = 1/sqrt(3), lambda = 2/(3 sqrt(3)).
class CubicSpring : public ContinuationSystem {
 public:
  int size() const override { return 1; }
  VecX reference_load() override {
    VecX q(1);
    q(0) = 1.0;
    return q;
  }
  SpMat tangent() override {
    SpMat K(1, 1);
    K.insert(0, 0) = 1.0 - 3.0 * q_ * q_;
    return K;
  }
  VecX internal_forces() override {
    VecX f(1);
    f(0) = q_ - q_ * q_ * q_;
    return f;
  }
  void apply_increment(const VecX& dq) override { q_ += dq(0); }
  void save_checkpoint() override { saved_ = q_; }
  void restore_checkpoint() override { q_ = saved_; }

  double q() const { return q_; }

 private:
  double q_ = 0.0;
  double saved_ = 0.0;
};

class LinearSpring : public ContinuationSystem {
 public:
  explicit LinearSpring(double k) : k_(k) {}
  int size() const override { return 1; }
  VecX reference_load() override {
    VecX q(1);
    q(0) = 1.0;
    return q;
  }
  SpMat tangent() override {
    SpMat K(1, 1);
    K.insert(0, 0) = k_;
    return K;
  }
  VecX internal_forces() override {
    VecX f(1);
    f(0) = k_ * q_;
    return f;
  }
  void apply_increment(const VecX& dq) override { q_ += dq(0); }
  void save_checkpoint() override { saved_ = q_; }
  void restore_checkpoint() override { q_ = saved_; }
  double q() const { return q_; }

 private:
  double k_;
  double q_ = 0.0;
  double saved_ = 0.0;
};

}  // namespace

TEST_CASE("predictor constraint on the unit linear spring") {
  LinearSpring spring(1.0);
  ContinuationSettings settings;
  settings.initial_arc_length = 0.1;
  settings.max_increments = 1;
  settings.stop_at_target = false;
  const ContinuationResult r = trace_path(spring, settings);
  REQUIRE(r.records.size() == 1);
  // q_T = 1, scale = 1: dlambda0 = dl / sqrt(2)
  CHECK(r.records[0].lambda == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-10));
  CHECK(spring.q() == doctest::Approx(r.records[0].lambda).epsilon(1e-10));
}

TEST_CASE("cubic spring: path through the limit point matches the analytic curve") {
  CubicSpring spring;
  ContinuationSettings settings;
  settings.initial_lpf_step = 0.05;
  settings.desired_iterations = 4;
  settings.max_increments = 80;
  settings.lambda_target = 10.0;  // unreachable: trace the fold instead
  settings.force_tolerance = 1e-10;
  settings.displacement_tolerance = 1e-10;

  std::vector<std::pair<double, double>> path;  // (q, lambda)
  const ContinuationResult r = trace_path(spring, settings, [&](const IncrementRecord& rec,
                                                                ContinuationSystem& sys) {
    auto& s = dynamic_cast<CubicSpring&>(sys);
    path.emplace_back(s.q(), rec.lambda);
  });
  REQUIRE(path.size() > 10);
  double max_lambda = -1e9;
  bool lambda_dropped = false;
  double q_prev = 0.0;
  for (const auto& [q, lam] : path) {
    CHECK(std::abs(lam - (q - q * q * q)) <= 1e-8);
    if (lam < max_lambda) lambda_dropped = true;
    max_lambda = std::max(max_lambda, lam);
    CHECK(q > q_prev - 1e-12);  // continuation keeps moving forward
    q_prev = q;
  }
  CHECK(lambda_dropped);                   // snap-through traced
  CHECK(q_prev > 1.0 / std::sqrt(3.0));    // passed the limit point
  CHECK(max_lambda == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(0.01));
}

TEST_CASE("all arc-length variants trace the cubic spring") {
  for (auto variant : {ArcLengthVariant::linearized, ArcLengthVariant::cylindrical,
                       ArcLengthVariant::modified_riks}) {
    CubicSpring spring;
    ContinuationSettings settings;
    settings.variant = variant;
    settings.initial_lpf_step = 0.04;
    settings.max_increments = 60;
    settings.lambda_target = 10.0;
    std::vector<std::pair<double, double>> path;
    trace_path(spring, settings, [&](const IncrementRecord& rec, ContinuationSystem& sys) {
      path.emplace_back(dynamic_cast<CubicSpring&>(sys).q(), rec.lambda);
    });
    REQUIRE(!path.empty());
    for (const auto& [q, lam] : path) CHECK(std::abs(lam - (q - q * q * q)) <= 1e-6);
    CHECK(path.back().first > 1.0 / std::sqrt(3.0));
  }
}

TEST_CASE("arc length adaptation") {
  CHECK(adapt_arc_length(0.2, 5, 5, 1e-6, 10.0) == doctest::Approx(0.2));
  CHECK(adapt_arc_length(0.2, 10, 5, 1e-6, 10.0) == doctest::Approx(0.2 / std::sqrt(2.0)));
  CHECK(adapt_arc_length(0.2, 1, 5, 1e-6, 0.3) == doctest::Approx(0.3));  // clamped
  CHECK(adapt_arc_length(1e-7, 20, 5, 1e-6, 10.0) == doctest::Approx(1e-6));
}

TEST_CASE("newton raphson on the springs") {
  SUBCASE("linear problem converges immediately") {
    LinearSpring spring(2.0);
    const NewtonResult r = newton_raphson(spring, 0.0, 1.0, {});
    CHECK(r.converged);
    CHECK(r.iterations <= 3);
    CHECK(spring.q() == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("pre-limit target on the cubic spring matches the analytic root") {
    CubicSpring spring;
    const NewtonResult r = newton_raphson(spring, 0.0, 0.2, {});
    CHECK(r.converged);
    CHECK(spring.q() - spring.q() * std::pow(spring.q(), 2) == doctest::Approx(0.2).epsilon(1e-8));
    CHECK(r.inertia == 0);
  }
  SUBCASE("post-limit target diverges") {
    CubicSpring spring;
    const NewtonResult r = newton_raphson(spring, 0.0, 0.5, {});
    CHECK(!r.converged);
  }
}

TEST_CASE("trace stops exactly at the target load factor") {
  LinearSpring spring(1.0);
  ContinuationSettings settings;
  settings.initial_lpf_step = 0.3;
  settings.lambda_target = 1.0;
  settings.max_increments = 50;
  const ContinuationResult r = trace_path(spring, settings);
  CHECK(r.reached_target);
  CHECK(r.records.back().lambda == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(spring.q() == doctest::Approx(1.0).epsilon(1e-8));
}
