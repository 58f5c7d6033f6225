#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "arnn/signals.hpp"

using namespace arnn;
using std::numbers::pi;

namespace {

SignalClass custom_class(SignalFn f, double d_theta, double d_xi) {
  SignalClass c;
  c.name = "custom";
  c.f = std::move(f);
  c.theta_range = {0.0, 2.0};
  c.equivalence = [](double th) { return IntervalSet::point(th); };
  c.lipschitz_theta = d_theta;
  c.lipschitz_xi = d_xi;
  return c;
}

InputSignal ramp_input() {
  InputSignal in;
  in.name = "ramp";
  in.xi = [](double t) { return t; };
  in.xi_sup = 10.0;
  in.dxi_sup = 1.0;
  return in;
}

}  // namespace

TEST_SUITE("signals") {
  TEST_CASE("deadzone norm examples") {
    CHECK(deadzone_norm(5.0, 2.0) == 3.0);
    CHECK(deadzone_norm(1.0, 2.0) == 0.0);
    CHECK(deadzone_norm(-3.5, 1.0) == 2.5);
    CHECK(deadzone_norm(2.0, 2.0) == 0.0);
    CHECK_THROWS_AS(deadzone_norm(1.0, -0.1), std::domain_error);
  }

  TEST_CASE("deadzone norm: zero width is |x| and the map is 1-Lipschitz") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> w(0.0, 3.0);
    for (int k = 0; k < 10000; ++k) {
      const double x = u(rng), y = u(rng), d = w(rng);
      CHECK(deadzone_norm(x, 0.0) == std::abs(x));
      CHECK(std::abs(deadzone_norm(x, d) - deadzone_norm(y, d)) <= std::abs(x - y) + 1e-15);
      CHECK(deadzone_norm(x, d) >= 0.0);
    }
  }

  TEST_CASE("set distance examples") {
    CHECK(set_distance(0.0, IntervalSet{{1.0, 2.0}}) == 1.0);
    CHECK(set_distance(1.5, IntervalSet{{1.0, 2.0}}) == 0.0);
    CHECK(set_distance(3.0, IntervalSet{Interval::point(0.0), {4.0, 5.0}}) == 1.0);
    CHECK_THROWS_AS(set_distance(1.0, IntervalSet{}), std::domain_error);
    CHECK_THROWS_AS((IntervalSet{{2.0, 1.0}}), std::invalid_argument);
  }

  TEST_CASE("set distance: zero on the point, triangle bound") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const IntervalSet s{{-1.0, -0.5}, Interval::point(0.75), {2.0, 3.0}};
    for (int k = 0; k < 10000; ++k) {
      const double x = u(rng), y = u(rng);
      CHECK(set_distance(x, IntervalSet::point(x)) == 0.0);
      CHECK(set_distance(x, s) <= std::abs(x - y) + set_distance(y, s) + 1e-15);
    }
  }

  TEST_CASE("eval_signal examples") {
    const auto lin = make_signal_class("linear", {0.5, 2.0}, {0.25, 2.25}, 1.0);
    CHECK(eval_signal(lin, sine_input(), 2.0, pi / 2) == doctest::Approx(2.0).epsilon(1e-15));

    const auto sine = make_signal_class("sine", {1.5, 3.0}, {1.25, 3.25}, 1.0);
    CHECK(eval_signal(sine, constant_input(0.0), 1.7, 3.0) == 0.0);
    CHECK(eval_signal(sine, ramp_input(), 1.0, pi / 6) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(eval_signal(lin, sine_input(), 1.0, -0.1), std::domain_error);
  }

  TEST_CASE("built-in families and their declared constants") {
    const auto q = make_signal_class("quadratic-affine", {0.5, 2.0}, {0.25, 2.25}, 1.0);
    CHECK(q.f(2.0, 1.5) == doctest::Approx(1.5 * 1.5 * 2.0 + 1.5));
    CHECK(q.lipschitz_theta == doctest::Approx(2 * 2.25 + 1.0));
    CHECK(q.lipschitz_xi == doctest::Approx(2.25 * 2.25));
    CHECK_THROWS_AS(make_signal_class("quadratic-affine", {0.1, 2.0}, {0.0, 2.25}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_signal_class("cubic", {0.5, 2.0}, {0.25, 2.25}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_signal_class("linear", {2.0, 2.0}, {0.25, 2.25}, 1.0), std::invalid_argument);
    // every declared equivalence set contains its own parameter
    for (double th : {0.5, 1.0, 2.0}) CHECK(q.equivalence(th).contains(th));
  }

  TEST_CASE("input bounds hold on samples") {
    for (const auto& in : {sine_input(2.0, 3.0), degenerate_xi(1.0)}) {
      const double h = 1e-4;
      for (int k = 0; k < 200000; ++k) {
        const double t = 1.0 + k * 5e-3;
        CHECK(std::abs(in.xi(t)) <= in.xi_sup + 1e-12);
        CHECK(std::abs(in.xi(t + h) - in.xi(t)) / h <= in.dxi_sup + 1e-3);
      }
    }
  }

  TEST_CASE("degenerate input examples") {
    const double t0 = 3.0;
    const auto in = degenerate_xi(t0);
    CHECK(in.xi(t0) == 0.0);
    CHECK(in.xi(t0 + std::exp(pi / 2) - 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(in.xi(t0 + std::exp(3 * pi / 2) - 1.0) == 0.0);
    CHECK_THROWS_AS(degenerate_xi(-1.0), std::domain_error);
  }

  TEST_CASE("persistency sample for the linear family matches a dense-grid oracle") {
    const auto lin = make_signal_class("linear", {0.5, 2.0}, {0.25, 2.25}, 1.0);
    const double dt = 1e-3;
    const auto est = estimate_persistency(lin, sine_input(), 2.0, 1.0, 2 * pi, 4 * 2 * pi, dt);
    // max over a window of |sin t| is 1; the grid can miss it by at most dt * D_f
    REQUIRE(est.rho_samples.size() == 1);
    CHECK(est.rho_samples[0].separation == 1.0);
    CHECK(std::abs(est.rho_samples[0].deviation - 1.0) <= dt * 2.0);
    CHECK(est.satisfied);
  }

  TEST_CASE("persistency of an equivalent parameter is zero") {
    const auto lin = make_signal_class("linear", {0.5, 2.0}, {0.25, 2.25}, 1.0);
    const auto est = estimate_persistency(lin, sine_input(), 1.3, 1.3, 2 * pi, 4 * pi, 1e-2);
    CHECK(est.rho_samples[0].separation == 0.0);
    CHECK(est.rho_samples[0].deviation == 0.0);
    CHECK_FALSE(est.satisfied);
  }

  TEST_CASE("persistency collapses on late windows of the degenerate input") {
    const auto lin = make_signal_class("linear", {0.5, 2.0}, {0.25, 2.25}, 1.0);
    const auto early = estimate_persistency(lin, degenerate_xi(0.0), 1.0, 2.0, 2 * pi, 2 * pi, 1e-2);
    const auto late = estimate_persistency(lin, degenerate_xi(0.0), 1.0, 2.0, 2 * pi, 600.0, 1e-2);
    // first silent stretch: sin(ln(t+1)) < 0 for t in (e^pi - 1, e^{2 pi} - 1) ~ (22, 534)
    CHECK(early.rho_samples[0].deviation > 0.1);
    CHECK(late.rho_samples[0].deviation == 0.0);
    CHECK_FALSE(late.satisfied);
    CHECK(late.worst_window_start > std::exp(pi) - 1.0);
  }

  TEST_CASE("persistency envelope is monotone in separation for the linear family") {
    const auto lin = make_signal_class("linear", {0.5, 2.0}, {0.25, 2.25}, 1.0);
    const std::vector<double> seps{0.1, 0.25, 0.5, 1.0, 1.5, 2.0};
    const auto env = sample_rho_envelope(lin, sine_input(), {0.25, 2.25}, seps, 7, 2 * pi, 4 * pi, 1e-2);
    REQUIRE(env.rho_samples.size() == seps.size());
    for (std::size_t k = 1; k < seps.size(); ++k) {
      CHECK(env.rho_samples[k].separation > env.rho_samples[k - 1].separation);
      CHECK(env.rho_samples[k].deviation >= env.rho_samples[k - 1].deviation);
    }
    CHECK(env.satisfied);
    const auto rho = RhoEnvelope::from_samples(env.rho_samples);
    CHECK(rho.slope == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(rho.certified_max == 2.0);
    CHECK(rho.inverse(rho(0.7)) == doctest::Approx(0.7));
    CHECK_THROWS_AS(sample_rho_envelope(lin, sine_input(), {0.25, 2.25}, {0.5, 0.25}, 3, 2 * pi, 4 * pi, 1e-2),
                    std::invalid_argument);
    CHECK_THROWS_AS(RhoEnvelope::from_samples({{0.0, 0.0}}), std::invalid_argument);
  }

  TEST_CASE("Lipschitz estimates") {
    SUBCASE("linear: D_theta is sup |xi| on the grid") {
      const auto lin = make_signal_class("linear", {0.5, 2.0}, {0.25, 2.25}, 1.0);
      LipschitzGrid g{{0.25, 2.25}, 201, {-1.0, 1.0}, 201};
      const auto est = estimate_lipschitz(lin, sine_input(), g);
      CHECK(std::abs(est.d_theta - 1.0) <= 1e-6);
      CHECK(est.d_xi == doctest::Approx(2.25));
      CHECK(est.d_f == doctest::Approx(2.0 * est.d_xi * 1.0));
      CHECK(est.ok);
    }
    SUBCASE("sine: D_xi bounded by max |theta|") {
      auto c = custom_class([](double xi, double th) { return std::sin(xi * th); }, 1.0, 2.0);
      LipschitzGrid g{{-2.0, 2.0}, 201, {-1.0, 1.0}, 401};
      const auto est = estimate_lipschitz(c, sine_input(), g);
      CHECK(est.d_xi <= 2.0);
      // oracle: max |theta cos(xi theta)| on the grid is attained at xi = 0
      CHECK(est.d_xi == doctest::Approx(2.0).epsilon(1e-4));
      CHECK(est.ok);
    }
    SUBCASE("constant family") {
      auto c = custom_class([](double, double) { return 3.0; }, 0.0, 0.0);
      LipschitzGrid g{{0.0, 1.0}, 11, {-1.0, 1.0}, 11};
      const auto est = estimate_lipschitz(c, sine_input(), g);
      CHECK(est.d_theta == 0.0);
      CHECK(est.d_xi == 0.0);
      CHECK(est.ok);
    }
    SUBCASE("understated constants are reported") {
      auto c = custom_class([](double xi, double th) { return th * xi; }, 0.5, 0.5);
      LipschitzGrid g{{0.0, 2.0}, 21, {-1.0, 1.0}, 21};
      const auto est = estimate_lipschitz(c, sine_input(), g);
      CHECK_FALSE(est.ok);
      CHECK(est.violations.size() >= 2);
    }
  }
}
