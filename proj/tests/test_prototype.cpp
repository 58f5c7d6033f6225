#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "arnn/errors.hpp"
#include "arnn/integrator.hpp"
#include "arnn/prototype.hpp"

using namespace arnn;
using std::numbers::pi;

namespace {

Subsystem linear_subsystem(double gamma, double delta, double epsilon = 0.0) {
  Subsystem sub;
  sub.cls = make_signal_class("linear", {0.5, 2.0}, {0.25, 2.25}, 1.0);
  sub.config.gamma = gamma;
  sub.config.a = 0.25;
  sub.config.b = 2.25;
  sub.config.delta = delta;
  sub.config.epsilon = epsilon;
  sub.phi = [](double s) { return s; };
  sub.phi_min = 1.0;
  return sub;
}

// (ln(kappa/d) kappa/(kappa-1) (2 + kappa/(1-d)))^-1 phi_min / c, written out.
double gamma_bound_oracle(double kappa, double d, double c, double phi_min) {
  const double l = std::log(kappa / d);
  const double m = kappa / (kappa - 1.0);
  const double n = 2.0 + kappa / (1.0 - d);
  return phi_min / c / (l * m * n);
}

double hstar_oracle(double span, double d_theta, double ab, double phi_min, double g, double kappa,
                    double d, double c) {
  const double num = span + d_theta * ab / phi_min;
  const double den = phi_min / g / std::log(kappa / d) * (kappa - 1.0) / kappa - c * (2.0 + kappa / (1.0 - d));
  return num / den;
}

}  // namespace

TEST_SUITE("prototype") {
  TEST_CASE("theta_hat examples") {
    CHECK(theta_hat(-1.0, 0.3, 1.7) == 0.3);
    CHECK(theta_hat(1.0, 0.3, 1.7) == doctest::Approx(1.7).epsilon(1e-15));
    CHECK(theta_hat(0.0, 0.0, 2.0) == 1.0);
  }

  TEST_CASE("prototype rhs examples") {
    SUBCASE("frozen on the circle when the dead-zone error vanishes and delta = 0") {
      const auto sub = linear_subsystem(0.05, 0.0, 0.1);
      const Eigen::Vector3d q{0.3, std::cos(1.0), std::sin(1.0)};
      const auto d = prototype_rhs(q, 0.35, 0.4, sub);
      CHECK(d[1] == 0.0);
      CHECK(d[2] == 0.0);
    }
    SUBCASE("pure rotation at rate g from (1, 0)") {
      const auto sub = linear_subsystem(0.05, 1e-3);
      const Eigen::Vector3d q{0.2, 1.0, 0.0};
      const auto d = prototype_rhs(q, 0.2, 0.0, sub);
      CHECK(d[1] == 0.0);
      CHECK(d[2] == doctest::Approx(0.05 * 1e-3).epsilon(1e-14));
    }
    SUBCASE("shat follows the filter copy with the estimated parameter") {
      const auto sub = linear_subsystem(0.05, 0.0);
      const Eigen::Vector3d q{0.2, 0.0, 1.0};  // theta_hat = (a + b) / 2 = 1.25
      const auto d = prototype_rhs(q, 0.0, 0.8, sub);
      CHECK(d[0] == doctest::Approx(-0.2 + 1.25 * 0.8));
    }
    SUBCASE("gain uses the dead-zone norm") {
      const auto sub = linear_subsystem(2.0, 0.5, 0.1);
      CHECK(rotation_gain(1.0, 0.5, sub.config) == doctest::Approx(2.0 * (0.4 + 0.5)));
      CHECK(rotation_gain(0.55, 0.5, sub.config) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("polar rates examples") {
    const auto [dr1, dn1] = polar_rates(std::cos(0.3), std::sin(0.3), 1.7);
    CHECK(std::abs(dr1) < 1e-15);
    CHECK(dn1 == 1.7);
    const auto [dr2, dn2] = polar_rates(0.5, 0.0, 2.0);
    CHECK(dr2 == doctest::Approx(2.0 * 0.5 * (1.0 - 0.25)));
    CHECK(dn2 == 2.0);
    const auto [dr3, dn3] = polar_rates(0.2, -0.9, 0.0);
    CHECK(dr3 == 0.0);
    CHECK(dn3 == 0.0);
    CHECK_THROWS_AS(polar_rates(0.0, 0.0, 1.0), std::domain_error);
  }

  TEST_CASE("Cartesian field transformed to polar agrees with polar_rates") {
    // r = 0.5 on the positive x axis, g = 1
    const Eigen::Vector2d f = circle_field(0.5, 0.0);
    CHECK(f[0] == doctest::Approx(0.375));  // radial
    CHECK(f[1] / 0.5 == doctest::Approx(1.0));  // angular
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0), gd(0.0, 3.0);
    for (int k = 0; k < 2000; ++k) {
      const double x = u(rng), y = u(rng), g = gd(rng);
      const double r = std::hypot(x, y);
      const Eigen::Vector2d c = g * circle_field(x, y);
      const auto [dr, dn] = polar_rates(x, y, g);
      CHECK(std::abs((x * c[0] + y * c[1]) / r - dr) < 1e-12);
      CHECK(std::abs((x * c[1] - y * c[0]) / (r * r) - dn) < 1e-12);
    }
  }

  TEST_CASE("compute_c examples") {
    CHECK(compute_c(2.0, 0.5, 0.0, 3.0) == doctest::Approx(6.0));
    CHECK(compute_c(0.0, 1.0, 0.0, 1.0) == 0.0);
    CHECK(compute_c(1.0, 1.0, 2.0, 3.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(compute_c(1.0, 0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(compute_c(1.0, 1.0, 1.0, 1.0), std::invalid_argument);
  }

  TEST_CASE("tune_gamma examples") {
    const auto g = tune_gamma(2.0, 0.5, 1.0, 1.0, 0.5);
    CHECK(std::abs(g.gamma_star - gamma_bound_oracle(2.0, 0.5, 1.0, 1.0)) < 1e-15);
    CHECK(std::abs(g.gamma_star - 0.0601122933703735) < 1e-12);
    CHECK(g.gamma == doctest::Approx(0.5 * g.gamma_star));
    CHECK_FALSE(g.unbounded);
    CHECK(tune_gamma(2.0, 0.5, 1.0, 2.0, 0.5).gamma_star == doctest::Approx(2.0 * g.gamma_star));
    CHECK(tune_gamma(2.0, 0.5, 2.0, 1.0, 0.5).gamma_star == doctest::Approx(0.5 * g.gamma_star));
    const auto inf = tune_gamma(2.0, 0.5, 0.0, 1.0, 0.5);
    CHECK(inf.unbounded);
    CHECK(std::isinf(inf.gamma_star));
    CHECK_THROWS_AS(tune_gamma(1.0, 0.5, 1.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(tune_gamma(2.0, 1.0, 1.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(tune_gamma(2.0, 0.5, 1.0, 1.0, 1.0), std::invalid_argument);
  }

  TEST_CASE("tune_hstar examples") {
    // numerator (s_max - s_min) + D_theta (b - a)/phi_min = 2 in both cases
    const double h03 = tune_hstar(0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.03, 2.0, 0.5, 0.5);
    CHECK(std::abs(h03 - hstar_oracle(1.0, 1.0, 1.0, 1.0, 0.03, 2.0, 0.5, 0.5)) < 1e-12);
    CHECK(h03 == doctest::Approx(0.2216690674069628).epsilon(1e-12));
    const double h06 = tune_hstar(0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.06, 2.0, 0.5, 0.5);
    CHECK(std::abs(h06 - hstar_oracle(1.0, 1.0, 1.0, 1.0, 0.06, 2.0, 0.5, 0.5)) < 1e-12);
    CHECK(h06 == doctest::Approx(0.664).epsilon(1e-3));
    // gamma -> 0 sends h* to 0
    CHECK(tune_hstar(0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1e-9, 2.0, 0.5, 0.5) < 1e-7);
    // denominator <= 0
    CHECK_THROWS_AS(tune_hstar(0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.2, 2.0, 0.5, 0.5), InfeasibleTuning);
    // exactly at the gamma bound for c = 0.5 the denominator vanishes
    const double bound = gamma_bound_oracle(2.0, 0.5, 0.5, 1.0);
    CHECK_THROWS_AS(tune_hstar(0.0, 1.0, 1.0, 0.0, 1.0, 1.0, bound * (1 + 1e-12), 2.0, 0.5, 0.5),
                    InfeasibleTuning);
  }

  TEST_CASE("choose_winding examples") {
    // integer search oracle
    auto oracle = [](double h, double nu) {
      int k = 0;
      while (!(2 * pi * k - nu >= h)) ++k;
      return k;
    };
    CHECK(choose_winding(0.664, 0.0) == 1);
    CHECK(choose_winding(0.0, 0.0) == 0);
    CHECK(choose_winding(10.0, pi) == 3);
    for (double h : {0.0, 0.5, 3.0, 6.3, 12.0, 40.0}) {
      for (double nu : {0.0, 1.0, pi, 2 * pi}) CHECK(choose_winding(h, nu) == oracle(h, nu));
    }
    CHECK_THROWS_AS(choose_winding(-1.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("compute_L examples") {
    CHECK(compute_L(pi, 0.2, 0.4) == doctest::Approx(2 * pi));
    CHECK(compute_L(0.1, 10.0, 1.0) == 10.0);
    CHECK(compute_L(1.0, 2.0, 1.0) == 2.0);
    CHECK_THROWS_AS(compute_L(1.0, 1.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("error_bound examples") {
    const RhoEnvelope rho{0.1, 100.0};
    const auto eb = error_bound(1e-4, 1.0, 0.0, 1.0, 1.0, 2 * pi, rho);
    const double oracle = 10.0 * std::pow(8e-4 * 4 * pi * pi, 0.25);
    CHECK(eb.value == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(eb.value == doctest::Approx(4.216).epsilon(1e-3));
    CHECK_FALSE(eb.extrapolated);
    CHECK(error_bound(0.0, 1.0, 0.0, 1.0, 1.0, 2 * pi, rho).value == 0.0);
    double prev = 0.0;
    for (double noise : {1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
      const double v = error_bound(noise, 1.0, 0.0, 1.0, 1.0, 2 * pi, rho).value;
      CHECK(v > prev);
      prev = v;
    }
    CHECK(error_bound(1e-4, 1.0, 0.0, 1.0, 1.0, 2 * pi, RhoEnvelope{0.1, 1.0}).extrapolated);
  }

  TEST_CASE("init_state examples") {
    PrototypeConfig cfg;
    const auto q0 = init_state(cfg, 0.4);
    CHECK(q0[0] == 0.4);
    CHECK(q0[1] == 1.0);
    CHECK(q0[2] == 0.0);
    cfg.nu_x = pi / 2;
    const auto q1 = init_state(cfg, 0.0);
    CHECK(std::abs(q1[1]) < 1e-15);
    CHECK(q1[2] == 1.0);
    for (double nu : {0.1, 1.0, 2.5, 4.0, 6.0}) {
      cfg.nu_x = nu;
      const auto q = init_state(cfg, 0.0);
      CHECK(q[1] * q[1] + q[2] * q[2] == doctest::Approx(1.0).epsilon(1e-15));
    }
  }

  TEST_CASE("config validation") {
    const auto sub = linear_subsystem(0.03, 1e-3);
    CHECK_NOTHROW(sub.config.validate(sub.cls));
    auto bad = sub.config;
    bad.a = 0.6;
    CHECK_THROWS_AS(bad.validate(sub.cls), std::invalid_argument);
    bad = sub.config;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(bad.validate(sub.cls), std::invalid_argument);
    bad = sub.config;
    bad.nu_x = 7.0;
    CHECK_THROWS_AS(bad.validate(sub.cls), std::invalid_argument);
  }

  TEST_CASE("full tuning chain") {
    TuningInputs in;
    in.d_theta = 1.0;
    in.d_f = 4.5;
    in.a = 0.25;
    in.b = 2.25;
    in.noise_bound = 1e-4;
    in.rho = RhoEnvelope{1.0, 2.0};
    const auto rep = tune_prototype(in);
    CHECK(rep.c == doctest::Approx(1.0));
    CHECK(rep.gamma_star == doctest::Approx(gamma_bound_oracle(2.0, 0.5, 1.0, 1.0)));
    CHECK(rep.gamma == doctest::Approx(0.5 * rep.gamma_star));
    CHECK(rep.h_star == doctest::Approx(hstar_oracle(2.0, 1.0, 2.0, 1.0, rep.gamma, 2.0, 0.5, 1.0)));
    CHECK(rep.k_prime == 1);
    CHECK(rep.L == doctest::Approx(4 * pi));
    CHECK(rep.epsilon == 1e-4);
    const auto cfg = rep.config();
    CHECK(cfg.gamma == rep.gamma);
    CHECK(cfg.k_prime == rep.k_prime);
    CHECK(cfg.epsilon == rep.epsilon);

    in.d_theta = 0.0;
    const auto flat = tune_prototype(in);
    CHECK(std::isinf(flat.gamma_star));
    CHECK_FALSE(flat.warnings.empty());
  }

  TEST_CASE("unit circle attracts and the phase never decreases") {
    // single subsystem with an arbitrary measured signal s(t)
    auto sub = linear_subsystem(0.8, 0.2, 0.0);
    for (double r0 : {0.2, 0.7, 1.5, 2.5}) {
      Eigen::Vector3d q{0.0, r0, 0.0};
      double t = 0.0, prev_gap = std::abs(r0 - 1.0), phase = 0.0, prev_angle = 0.0;
      const double dt = 1e-2;
      for (int k = 0; k < 20000; ++k) {
        auto rhs = [&](double tt, const Eigen::Vector3d& z) -> Eigen::Vector3d {
          return prototype_rhs(z, std::sin(tt), std::sin(tt), sub);
        };
        q = rk4_step(rhs, q, t, dt);
        t += dt;
        const double gap = std::abs(std::hypot(q[1], q[2]) - 1.0);
        // Below 1e-8 the radial gap is at the RK4 truncation floor.
        if (prev_gap > 1e-8) {
          CHECK(gap <= prev_gap + 1e-12);
        } else {
          CHECK(gap <= 1e-8);
        }
        prev_gap = gap;
        const double ang = std::atan2(q[2], q[1]);
        const double step = std::remainder(ang - prev_angle, 2 * pi);
        CHECK(step >= -1e-12);
        phase += step;
        prev_angle = ang;
      }
      CHECK(prev_gap < 1e-6);
      CHECK(phase > 0.0);
    }
  }

  TEST_CASE("perturbed and unperturbed prototypes stay close over short horizons") {
    // ||q - q*|| <= (delta gamma B sqrt 2 / L)(e^{L t} - 1), B = sup |circle field|
    const auto a = linear_subsystem(0.5, 0.0, 0.0);
    const auto b = linear_subsystem(0.5, 0.05, 0.0);
    Eigen::Vector3d qa{0.1, 1.0, 0.0}, qb = qa;
    const double dt = 1e-3;
    double t = 0.0, B = 0.0;
    double lip = 0.0;
    std::vector<std::pair<double, double>> gaps;
    for (int k = 0; k < 2000; ++k) {
      auto ra = [&](double tt, const Eigen::Vector3d& z) -> Eigen::Vector3d {
        return prototype_rhs(z, std::sin(tt), std::sin(tt), a);
      };
      auto rb = [&](double tt, const Eigen::Vector3d& z) -> Eigen::Vector3d {
        return prototype_rhs(z, std::sin(tt), std::sin(tt), b);
      };
      qa = rk4_step(ra, qa, t, dt);
      qb = rk4_step(rb, qb, t, dt);
      t += dt;
      B = std::max({B, circle_field(qa[1], qa[2]).norm(), circle_field(qb[1], qb[2]).norm()});
      gaps.emplace_back(t, (qa - qb).norm());
    }
    // crude Lipschitz constant of the unperturbed field on the visited box
    for (double shat = -1.5; shat <= 1.5; shat += 0.25) {
      for (double x = -1.1; x <= 1.1; x += 0.2) {
        for (double y = -1.1; y <= 1.1; y += 0.2) {
          const Eigen::Vector3d q{shat, x, y};
          for (double s : {-1.0, 0.0, 1.0}) {
            for (double xi : {-1.0, 1.0}) {
              Eigen::Matrix3d J;
              for (int c = 0; c < 3; ++c) {
                Eigen::Vector3d h = Eigen::Vector3d::Zero();
                h[c] = 1e-6;
                J.col(c) = (prototype_rhs(q + h, s, xi, a) - prototype_rhs(q - h, s, xi, a)) / 2e-6;
              }
              lip = std::max(lip, J.norm());
            }
          }
        }
      }
    }
    for (const auto& [tt, gap] : gaps) {
      CHECK(gap <= 0.05 * 0.5 * B * std::sqrt(2.0) / lip * std::expm1(lip * tt) + 1e-9);
    }
  }
}
