#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "usmsim/control.hpp"
#include "usmsim/plant.hpp"

using namespace usmsim;

namespace {

PlantParams nominal() {
  PlantParams p;
  p.m_bar = 1.0;
  p.b_bar = 248.4;
  p.c_bar = 202.0;
  p.g_bar = 4940.0;
  return p;
}

AfosmcParams afosmc_defaults() {
  AfosmcParams p;
  p.lambda = 1.0;
  p.alpha = 0.5;
  p.k_p = 600.0;
  p.k_s = 0.02;
  p.l_bar = 0.01;
  p.k1 = 0.1;
  p.epsilon0 = 1.0;
  p.beta0 = 0.1;
  p.window_capacity = 50;
  return p;
}

AfosmcState zero_history_state(const AfosmcParams& params, double step, std::size_t samples) {
  AfosmcState st;
  st.beta_hat = params.beta0;
  st.epsilon = params.epsilon0;
  const std::size_t cap = params.capacity(step);
  st.e_window = frac::HistoryWindow(cap, step);
  st.e_dot_window = frac::HistoryWindow(cap, step);
  st.s_window = frac::HistoryWindow(cap, step);
  st.pi_term_window = frac::HistoryWindow(cap, step);
  for (std::size_t i = 0; i < samples; ++i) {
    st.e_window.push(0.0);
    st.e_dot_window.push(0.0);
    st.s_window.push(0.0);
    st.pi_term_window.push(0.0);
  }
  return st;
}

}  // namespace

TEST_CASE("sliding surface on zero history is zero") {
  AfosmcParams p = afosmc_defaults();
  frac::HistoryWindow w(32, 1e-3);
  for (int i = 0; i < 32; ++i) w.push(0.0);
  CHECK(sliding_surface(w, p) == 0.0);
}

TEST_CASE("sliding surface of a ramp matches the analytic value") {
  // e(t) = t on [0,1] with full memory: lambda*e + D^1.5 e at t=1
  // = 1 + 1/Gamma(0.5).
  AfosmcParams p = afosmc_defaults();
  p.window_capacity = 1001;
  frac::HistoryWindow w(1001, 1e-3);
  for (int j = 0; j <= 1000; ++j) w.push(1e-3 * j);
  const double expect = 1.0 + 1.0 / oracles::gamma_quadrature(0.5);
  CHECK(expect == doctest::Approx(1.5641895835477563).epsilon(1e-9));
  const double got = sliding_surface(w, p);
  CHECK(std::fabs(got - expect) <= 0.01 * expect);
}

TEST_CASE("sliding surface rejects empty windows") {
  AfosmcParams p = afosmc_defaults();
  frac::HistoryWindow w(8, 1e-3);
  CHECK_THROWS_AS(sliding_surface(w, p), std::invalid_argument);
}

TEST_CASE("pi bound") {
  CHECK(pi_bound(2.0, 1.0) == doctest::Approx(8.0));
  CHECK(pi_bound(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(pi_bound(0.0, -3.7) == 0.0);
  CHECK(pi_bound(1.5, -2.0) == doctest::Approx(1.5 * 9.0));
  CHECK_THROWS_AS(pi_bound(-0.1, 0.0), std::invalid_argument);
}

TEST_CASE("afosmc control reduces to the nominal feedforward on zero histories") {
  const PlantParams plant = nominal();
  const AfosmcParams params = afosmc_defaults();
  AfosmcState st = zero_history_state(params, 1e-3, 10);

  CHECK(afosmc_control(st, plant, 0.0, 0.0, 0.0, params) == 0.0);
  CHECK(afosmc_control(st, plant, 1.0, 0.0, 0.0, params) ==
        doctest::Approx(202.0 / 4940.0).epsilon(1e-12));
  CHECK(afosmc_control(st, plant, 1.0, 0.0, 1.0, params) ==
        doctest::Approx(203.0 / 4940.0).epsilon(1e-12));
  // General feedforward identity with all-zero windows.
  const double q = 0.3, q_dot = -1.2, q_ddot_ref = 7.0;
  CHECK(afosmc_control(st, plant, q, q_dot, q_ddot_ref, params) ==
        doctest::Approx((248.4 * q_dot + 202.0 * q + q_ddot_ref) / 4940.0).epsilon(1e-12));
}

TEST_CASE("afosmc control requires warm windows") {
  const AfosmcParams params = afosmc_defaults();
  AfosmcState st = zero_history_state(params, 1e-3, 0);
  CHECK_THROWS_AS(afosmc_control(st, nominal(), 0.0, 0.0, 0.0, params), std::invalid_argument);
}

TEST_CASE("beta adaptation is a nonnegative Euler step") {
  AfosmcParams params = afosmc_defaults();
  AfosmcState st = zero_history_state(params, 1e-3, 1);

  st.s = 0.0;
  st.beta_hat = 0.1;
  st = update_beta(std::move(st), 5.0, 1e-3, params);
  CHECK(st.beta_hat == 0.1);  // s = 0 leaves the estimate alone

  st.s = 1.0;
  st.beta_hat = 0.1;
  st = update_beta(std::move(st), 0.0, 1e-3, params);
  CHECK(st.beta_hat == doctest::Approx(0.1001).epsilon(1e-12));

  // Euler additivity for constant (s, q).
  AfosmcState one = zero_history_state(params, 1e-3, 1);
  one.s = 0.7;
  one.beta_hat = 0.3;
  AfosmcState two = one;
  one = update_beta(std::move(one), 1.1, 2e-3, params);
  two = update_beta(std::move(two), 1.1, 1e-3, params);
  two = update_beta(std::move(two), 1.1, 1e-3, params);
  CHECK(one.beta_hat == doctest::Approx(two.beta_hat).epsilon(1e-14));

  // Never decreases under any inputs.
  AfosmcState hist = zero_history_state(params, 1e-3, 1);
  hist.beta_hat = params.beta0;
  double prev = hist.beta_hat;
  for (int k = 0; k < 200; ++k) {
    hist.s = std::sin(0.1 * k) * 2.0;
    hist = update_beta(std::move(hist), std::cos(0.3 * k), 1e-3, params);
    CHECK(hist.beta_hat >= prev);
    prev = hist.beta_hat;
  }
}

TEST_CASE("epsilon follows the exact exponential and is floored") {
  AfosmcParams params = afosmc_defaults();
  AfosmcState st = zero_history_state(params, 1e-3, 1);

  st.epsilon = 1.0;
  st = update_epsilon(std::move(st), 100.0, params);
  CHECK(st.epsilon == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));

  // l_bar * dt = 0 limit: multiplying by exp(0) changes nothing.
  AfosmcParams frozen = params;
  frozen.l_bar = 1e-300;
  AfosmcState st2 = zero_history_state(params, 1e-3, 1);
  st2.epsilon = 0.42;
  st2 = update_epsilon(std::move(st2), 1e-3, frozen);
  CHECK(st2.epsilon == 0.42);

  // The floor absorbs.
  st.epsilon = params.epsilon_floor;
  st = update_epsilon(std::move(st), 10.0, params);
  CHECK(st.epsilon == params.epsilon_floor);

  // Repeated ticks track eps0 * exp(-l_bar t) to 1e-12 relative.
  AfosmcState run = zero_history_state(params, 1e-3, 1);
  run.epsilon = params.epsilon0;
  for (int k = 1; k <= 10000; ++k) {
    run = update_epsilon(std::move(run), 1e-3, params);
    const double expect = params.epsilon0 * std::exp(-params.l_bar * 1e-3 * k);
    CHECK(std::fabs(run.epsilon - expect) <= 1e-12 * expect);
  }
}

TEST_CASE("compensator io vector") {
  CompensatorParams p;
  p.lambda1 = 10.0;
  p.lambda2 = 1.0;
  p.lambda3 = 0.1;
  const Vec3 zero = compensator_io(0.0, 0.0, 0.0, p);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
  CHECK(zero[2] == 0.0);

  const Vec3 unit = compensator_io(1.0, 1.0, 1.0, p);
  CHECK(unit[0] == doctest::Approx(10.0));
  CHECK(unit[1] == doctest::Approx(1.0));
  CHECK(unit[2] == doctest::Approx(0.1));

  const Vec3 scaled = compensator_io(3.0, 1.0, 1.0, p);
  CHECK(scaled[1] == doctest::Approx(3.0 * unit[1]));
}

TEST_CASE("activation is the componentwise sigmoid with diagonal gradient") {
  const Activation at_zero = activation({0.0, 0.0, 0.0});
  for (int i = 0; i < 3; ++i) {
    CHECK(at_zero.sigma[i] == doctest::Approx(0.5));
    CHECK(at_zero.grad_diag[i] == doctest::Approx(0.25));
  }
  const Activation sat = activation({40.0, 0.0, 0.0});
  CHECK(sat.sigma[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sat.grad_diag[0] == doctest::Approx(0.0).epsilon(1e-12));

  const Activation one = activation({1.0, 0.0, 0.0});
  CHECK(one.sigma[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
}

TEST_CASE("compensator control value") {
  CompensatorParams p;
  p.lambda3 = 0.1;
  p.r_weight = 494.0;
  const double g_c3 = p.lambda3 * 4940.0 / 1.0;
  CHECK(g_c3 == doctest::Approx(494.0));

  CompensatorState st;
  st.i_vec = {0.0, 0.0, 0.0};
  st.w_hat = {0.0, 0.0, 0.0};
  CHECK(compensator_control(st, g_c3, p) == 0.0);

  st.w_hat = {0.0, 0.0, 1.0};
  CHECK(compensator_control(st, g_c3, p) == doctest::Approx(-0.125).epsilon(1e-12));

  st.w_hat = {0.0, 0.0, 2.0};
  CHECK(compensator_control(st, g_c3, p) == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("hamiltonian estimate") {
  CompensatorParams p;
  p.r_weight = 494.0;
  const Vec3 zero = {0.0, 0.0, 0.0};
  CHECK(hamiltonian_estimate(zero, zero, 0.0, zero, p) == 0.0);

  const Vec3 e1 = {1.0, 0.0, 0.0};
  CHECK(hamiltonian_estimate(e1, zero, 0.0, zero, p) == doctest::Approx(1.0));
  CHECK(hamiltonian_estimate(zero, zero, 1.0, zero, p) == doctest::Approx(494.0));
}

TEST_CASE("weight update is the gradient-descent Euler step") {
  CompensatorParams p;
  p.kappa = 1e-5;
  CompensatorState st;
  const Vec3 grad = {1.0, 0.25, 0.1};
  const Vec3 zero = {0.0, 0.0, 0.0};

  // H = 0 or I_dot = 0 leaves the weights alone.
  st = update_weights(std::move(st), 0.0, grad, {1.0, 1.0, 1.0}, 1e-3, p);
  st = update_weights(std::move(st), 5.0, grad, zero, 1e-3, p);
  CHECK(st.w_hat[0] == 0.0);
  CHECK(st.w_hat[1] == 0.0);
  CHECK(st.w_hat[2] == 0.0);

  // kappa=1e-5, H=1, grad.I_dot = [1,0,0], dt=1e-3 -> W1 = -1e-8.
  st = update_weights(std::move(st), 1.0, {1.0, 1.0, 1.0}, {1.0, 0.0, 0.0}, 1e-3, p);
  CHECK(st.w_hat[0] == doctest::Approx(-1e-8).epsilon(1e-12));
  CHECK(st.w_hat[1] == 0.0);
}

TEST_CASE("one small critic step does not increase the squared Hamiltonian") {
  CompensatorParams p;
  p.r_weight = 494.0;
  p.kappa = 1e-5;
  CompensatorState st;
  st.i_vec = {0.4, -0.2, 0.1};
  st.w_hat = {0.3, -0.5, 0.7};
  const Vec3 i_dot = {1.0, -2.0, 0.5};
  const double mu_c = compensator_control(st, 494.0, p);
  const Activation act = activation(st.i_vec);

  const double h0 = hamiltonian_estimate(st.i_vec, i_dot, mu_c, st.w_hat, p);
  CompensatorState stepped = update_weights(st, h0, act.grad_diag, i_dot, 1e-3, p);
  // Recompute with the same regressors, only the weights changed.
  const double h1 = hamiltonian_estimate(st.i_vec, i_dot, mu_c, stepped.w_hat, p);
  CHECK(h1 * h1 <= h0 * h0 + 1e-12);
}

TEST_CASE("total control is the plain sum") {
  CHECK(total_control(0.0, 0.0) == 0.0);
  CHECK(total_control(0.04, -0.01) == doctest::Approx(0.03));
  CHECK(total_control(1.7, 0.0) == 1.7);
}

TEST_CASE("dob zero trajectory zero input gives zero estimate") {
  DobState st;
  const PlantParams plant = nominal();
  for (int k = 0; k < 100; ++k) {
    const DobResult r = dob_estimate(st, 0.0, 0.0, 0.0, plant, 1e-3, 500.0);
    st = r.state;
    CHECK(r.d_hat == 0.0);
  }
}

TEST_CASE("dob converges to a constant disturbance within five time constants") {
  // Constant disturbance d on the otherwise nominal plant: the extra force
  // enters the plant but is hidden from the observer's mu input.
  const PlantParams plant = nominal();
  const double d = 37.0;
  const double bandwidth = 500.0;
  const double dt = 1e-3;

  PlantState s;
  DobState dob;
  double d_hat = 0.0;
  const double t_end = 5.0 / bandwidth * 5.0;  // run a few convergence windows
  const long ticks = std::lround(t_end / dt);
  for (long k = 0; k < ticks; ++k) {
    const DobResult r = dob_estimate(dob, s.q, s.q_dot, 0.0, plant, dt, bandwidth);
    dob = r.state;
    d_hat = r.d_hat;
    // Apply d as an equivalent control offset the DOB does not see.
    s = step(s, d / plant.g_bar, plant, dt);
  }
  CHECK(std::fabs(d_hat - d) <= 0.01 * d);

  // And the error is already small at five time constants.
  PlantState s2;
  DobState dob2;
  double d_hat5 = 0.0;
  const long five_tau = std::lround(5.0 / bandwidth / dt);
  for (long k = 0; k <= five_tau; ++k) {
    const DobResult r = dob_estimate(dob2, s2.q, s2.q_dot, 0.0, plant, dt, bandwidth);
    dob2 = r.state;
    d_hat5 = r.d_hat;
    s2 = step(s2, d / plant.g_bar, plant, dt);
  }
  CHECK(std::fabs(d_hat5 - d) <= 0.01 * d);
}

TEST_CASE("dob with very large bandwidth recovers the instantaneous residual") {
  const PlantParams plant = nominal();
  DobState st;
  // Hold the measurements constant; with a huge bandwidth the filters land
  // on them after one step, so d_hat equals the residual exactly (q_ddot = 0).
  const double q = 0.7, q_dot = -1.1, mu = 0.05;
  const double residual = plant.b_bar * q_dot + plant.c_bar * q - plant.g_bar * mu;
  const DobResult r = dob_estimate(st, q, q_dot, mu, plant, 1e-3, 1e9);
  CHECK(r.d_hat == doctest::Approx(residual).epsilon(1e-9));
}

TEST_CASE("pid dob control law") {
  BaselineParams p;
  p.pid = {37.0, 0.1, 160.0};  // single-term checks, scaling-free
  CHECK(pid_dob_control(0.0, 0.0, 0.0, 0.0, p) == 0.0);
  CHECK(pid_dob_control(1.0, 0.0, 0.0, 0.0, p) == doctest::Approx(-37.0));
  CHECK(pid_dob_control(0.0, 0.0, 0.0, 1.0, p) == doctest::Approx(-1.0));
  CHECK(pid_dob_control(0.0, 2.0, 0.0, 0.0, p) == doctest::Approx(-0.2));
  CHECK(pid_dob_control(0.0, 0.0, 0.5, 0.0, p) == doctest::Approx(-80.0));
}

TEST_CASE("smc dob control law") {
  BaselineParams p;
  const PlantParams plant = nominal();
  CHECK(smc_dob_control(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, plant, p) == 0.0);
  CHECK(smc_dob_control(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, plant, p) ==
        doctest::Approx(202.0 / 4940.0).epsilon(1e-12));

  // Saturation region: s_y / sigma_y = 2 clips to 1.
  BaselineParams q = p;
  q.smc = {1.0, 1.0, 1.0, 0.1};
  const double e_dot = 0.2;  // s_y = 0.2, ratio 2
  const double inside =
      plant.m_bar / plant.g_bar *
      (-q.smc.lambda_y * e_dot - q.smc.k_y1 * 0.2 - q.smc.k_y2 * 1.0);
  CHECK(smc_dob_control(0.0, e_dot, 0.0, 0.0, 0.0, 0.0, plant, q) ==
        doctest::Approx(inside).epsilon(1e-12));
}

TEST_CASE("sat and sgn agree outside the boundary layer") {
  // Isolate the k_y2 sat term: tiny lambda_y and k_y1, zero feedforward.
  BaselineParams p;
  p.smc.lambda_y = 1e-12;
  p.smc.k_y1 = 1e-12;
  p.smc.k_y2 = 300.0;
  p.smc.sigma_y = 0.1;
  const PlantParams plant = nominal();
  for (const double s_y : {0.1, 0.2, 10.0, -0.1, -5.0}) {
    const double mu = smc_dob_control(0.0, s_y, 0.0, 0.0, 0.0, 0.0, plant, p);
    const double sgn_val = (s_y > 0) ? 1.0 : -1.0;
    const double expect = plant.m_bar / plant.g_bar * (-p.smc.k_y2 * sgn_val);
    CHECK(mu == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("case one controller ticks deterministically and mu = mu_s + mu_c") {
  const PlantParams plant = nominal();
  AfosmcParams ap = afosmc_defaults();
  CompensatorParams cp;
  CaseOneController a(ap, cp, plant, 1e-3);
  CaseOneController b(ap, cp, plant, 1e-3);
  for (int k = 0; k < 500; ++k) {
    const double e = 1e-3 * std::sin(0.05 * k);
    const double e_dot = std::cos(0.05 * k) * 0.05;
    const CaseOneOutput oa = a.tick(e, e_dot, e + 0.1, e_dot, 0.2, 1e-3);
    const CaseOneOutput ob = b.tick(e, e_dot, e + 0.1, e_dot, 0.2, 1e-3);
    CHECK(oa.mu == ob.mu);
    CHECK(oa.mu == oa.mu_s + oa.mu_c);
    CHECK(oa.beta_hat >= ap.beta0);
  }
}
