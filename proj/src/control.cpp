#include "usmsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace usmsim {

namespace {

double sgn(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

double sat(double x) { return std::clamp(x, -1.0, 1.0); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void AfosmcParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("afosmc: lambda must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("afosmc: alpha must lie in (0,1)");
  if (!(k_p > 0.0)) throw std::invalid_argument("afosmc: k_p must be positive");
  if (!(k_s > 0.0)) throw std::invalid_argument("afosmc: k_s must be positive");
  if (!(l_bar > 0.0)) throw std::invalid_argument("afosmc: l_bar must be positive");
  if (!(k1 > 0.0)) throw std::invalid_argument("afosmc: k1 must be positive");
  if (!(epsilon0 > 0.0)) throw std::invalid_argument("afosmc: epsilon0 must be positive");
  if (!(beta0 > 0.0)) throw std::invalid_argument("afosmc: beta0 must be positive");
  if (!(memory_l > 0.0) && window_capacity == 0) {
    throw std::invalid_argument("afosmc: memory length must be positive");
  }
  if (epsilon_floor < 0.0) throw std::invalid_argument("afosmc: epsilon_floor must be >= 0");
}

std::size_t AfosmcParams::capacity(double step) const {
  if (window_capacity > 0) {
    return window_capacity;
  }
  return frac::capacity_for_length(memory_l, step);
}

double sliding_surface(const frac::HistoryWindow& e_window, const AfosmcParams& params) {
  if (e_window.empty()) {
    throw std::invalid_argument("sliding_surface: empty error window");
  }
  const auto table = frac::gl_coeffs(1.0 + params.alpha, e_window.size() - 1, e_window.step());
  return sliding_surface(e_window, params, table);
}

double sliding_surface(const frac::HistoryWindow& e_window, const AfosmcParams& params,
                       const frac::CoeffTable& surface_table) {
  if (e_window.empty()) {
    throw std::invalid_argument("sliding_surface: empty error window");
  }
  return params.lambda * e_window.latest() + frac::gl_eval(e_window, surface_table);
}

double pi_bound(double beta_hat, double q) {
  if (beta_hat < 0.0) {
    throw std::invalid_argument("pi_bound: beta_hat must be >= 0");
  }
  const double base = std::fabs(q) + 1.0;
  return beta_hat * base * base;
}

double afosmc_control(const AfosmcState& state, const PlantParams& plant_nominal,
                      double q, double q_dot, double q_ddot_ref, const AfosmcParams& params) {
  const std::size_t longest =
      std::max({state.e_dot_window.size(), state.s_window.size(), state.pi_term_window.size()});
  if (longest == 0) {
    throw std::invalid_argument("afosmc_control: windows are empty");
  }
  const auto table =
      frac::gl_coeffs(-params.alpha, longest - 1, state.e_dot_window.step());
  return afosmc_control(state, plant_nominal, q, q_dot, q_ddot_ref, params, table);
}

double afosmc_control(const AfosmcState& state, const PlantParams& plant_nominal,
                      double q, double q_dot, double q_ddot_ref, const AfosmcParams& params,
                      const frac::CoeffTable& integral_table) {
  if (state.e_dot_window.empty() || state.s_window.empty() || state.pi_term_window.empty()) {
    throw std::invalid_argument("afosmc_control: windows must hold at least one sample");
  }
  const double m = plant_nominal.m_bar;
  const double int_e_dot = frac::frac_integral(state.e_dot_window, integral_table);
  const double int_s = frac::frac_integral(state.s_window, integral_table);
  const double int_pi = frac::frac_integral(state.pi_term_window, integral_table);

  const double mu_s =
      (plant_nominal.b_bar * q_dot + plant_nominal.c_bar * q + m * q_ddot_ref -
       params.lambda * m * int_e_dot - params.k_p * m * int_s -
       params.k_s * m * sgn(state.s) - m * int_pi) /
      plant_nominal.g_bar;
  if (!std::isfinite(mu_s)) {
    throw SimulationFault("afosmc control value is non-finite", 0, "mu_s");
  }
  return mu_s;
}

AfosmcState update_beta(AfosmcState state, double q, double dt, const AfosmcParams& params) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("update_beta: dt must be positive");
  }
  const double base = std::fabs(q) + 1.0;
  state.beta_hat += dt * params.k1 * std::fabs(state.s) * base * base;
  return state;
}

AfosmcState update_epsilon(AfosmcState state, double dt, const AfosmcParams& params) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("update_epsilon: dt must be positive");
  }
  state.epsilon = std::max(state.epsilon * std::exp(-params.l_bar * dt), params.epsilon_floor);
  return state;
}

void CompensatorParams::validate() const {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !(lambda3 > 0.0)) {
    throw std::invalid_argument("compensator: lambda1..3 must be positive");
  }
  if (!(r_weight > 0.0)) throw std::invalid_argument("compensator: R must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("compensator: kappa must be positive");
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (q_weight[i][j] != q_weight[j][i]) {
        throw std::invalid_argument("compensator: Q must be symmetric");
      }
    }
  }
  // Sylvester criterion for positive definiteness.
  const auto& a = q_weight;
  const double d1 = a[0][0];
  const double d2 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const double d3 = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                    a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                    a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (!(d1 > 0.0 && d2 > 0.0 && d3 > 0.0)) {
    throw std::invalid_argument("compensator: Q must be positive definite");
  }
}

Vec3 compensator_io(double e, double e_dot, double integral_e, const CompensatorParams& params) {
  return {params.lambda1 * integral_e, params.lambda2 * e, params.lambda3 * e_dot};
}

Activation activation(const Vec3& i_vec) {
  Activation act;
  for (int i = 0; i < 3; ++i) {
    const double s = sigmoid(i_vec[i]);
    act.sigma[i] = s;
    act.grad_diag[i] = s * (1.0 - s);
  }
  return act;
}

double compensator_control(const CompensatorState& state, double g_c3,
                           const CompensatorParams& params) {
  const double grad3 = activation(state.i_vec).grad_diag[2];
  return -0.5 / params.r_weight * g_c3 * grad3 * state.w_hat[2];
}

double hamiltonian_estimate(const Vec3& i_vec, const Vec3& i_dot, double mu_c,
                            const Vec3& w_hat, const CompensatorParams& params) {
  double quad = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      quad += i_vec[i] * params.q_weight[i][j] * i_vec[j];
    }
  }
  const Activation act = activation(i_vec);
  double grad_term = 0.0;
  for (int i = 0; i < 3; ++i) {
    grad_term += act.grad_diag[i] * w_hat[i] * i_dot[i];
  }
  return quad + mu_c * params.r_weight * mu_c + grad_term;
}

CompensatorState update_weights(CompensatorState state, double h_hat, const Vec3& grad_diag,
                                const Vec3& i_dot, double dt, const CompensatorParams& params) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("update_weights: dt must be positive");
  }
  for (int i = 0; i < 3; ++i) {
    state.w_hat[i] -= dt * params.kappa * h_hat * grad_diag[i] * i_dot[i];
  }
  return state;
}

double total_control(double mu_s, double mu_c) { return mu_s + mu_c; }

void BaselineParams::validate() const {
  if (!(pid.k_x1 > 0.0) || !(pid.k_x2 > 0.0) || !(pid.k_x3 > 0.0)) {
    throw std::invalid_argument("baseline: PID gains must be positive");
  }
  if (!(smc.lambda_y > 0.0) || !(smc.k_y1 > 0.0) || !(smc.k_y2 > 0.0) || !(smc.sigma_y > 0.0)) {
    throw std::invalid_argument("baseline: SMC parameters must be positive");
  }
  if (!(dob_bandwidth > 0.0)) {
    throw std::invalid_argument("baseline: DOB bandwidth must be positive");
  }
}

DobResult dob_estimate(const DobState& state, double q, double q_dot, double mu,
                       const PlantParams& plant_nominal, double dt, double bandwidth) {
  if (!(dt > 0.0) || !(bandwidth > 0.0)) {
    throw std::invalid_argument("dob_estimate: dt and bandwidth must be positive");
  }
  const double a = std::exp(-bandwidth * dt);
  const double residual =
      plant_nominal.b_bar * q_dot + plant_nominal.c_bar * q - plant_nominal.g_bar * mu;
  DobResult out;
  out.state.v = a * state.v + (1.0 - a) * q_dot;
  out.state.w = a * state.w + (1.0 - a) * residual;
  out.d_hat = plant_nominal.m_bar * bandwidth * (q_dot - out.state.v) + out.state.w;
  return out;
}

double pid_dob_control(double e, double integral_e, double e_dot, double d_hat,
                       const BaselineParams& params) {
  return -params.pid.k_x1 * e - params.pid.k_x2 * integral_e - params.pid.k_x3 * e_dot - d_hat;
}

double smc_dob_control(double e, double e_dot, double q, double q_dot, double q_ddot_ref,
                       double d_hat, const PlantParams& plant_nominal,
                       const BaselineParams& params) {
  const double m = plant_nominal.m_bar;
  const double s_y = e_dot + params.smc.lambda_y * e;
  return m / plant_nominal.g_bar *
         (plant_nominal.b_bar / m * q_dot + plant_nominal.c_bar / m * q + q_ddot_ref -
          params.smc.lambda_y * e_dot - params.smc.k_y1 * s_y -
          params.smc.k_y2 * sat(s_y / params.smc.sigma_y) - d_hat / m);
}

CaseOneController::CaseOneController(const AfosmcParams& afosmc, const CompensatorParams& comp,
                                     const PlantParams& plant_nominal, double step)
    : afosmc_(afosmc), comp_(comp), plant_(plant_nominal) {
  afosmc_.validate();
  comp_.validate();
  plant_.validate();
  const std::size_t cap = afosmc_.capacity(step);
  afosmc_state_.beta_hat = afosmc_.beta0;
  afosmc_state_.epsilon = afosmc_.epsilon0;
  afosmc_state_.e_window = frac::HistoryWindow(cap, step);
  afosmc_state_.e_dot_window = frac::HistoryWindow(cap, step);
  afosmc_state_.s_window = frac::HistoryWindow(cap, step);
  afosmc_state_.pi_term_window = frac::HistoryWindow(cap, step);
  surface_table_ = frac::gl_coeffs(1.0 + afosmc_.alpha, cap - 1, step);
  integral_table_ = frac::gl_coeffs(-afosmc_.alpha, cap - 1, step);
  g_c3_ = comp_.lambda3 * plant_.g_bar / plant_.m_bar;
}

CaseOneOutput CaseOneController::tick(double e, double e_dot, double q, double q_dot,
                                      double q_ddot_ref, double dt) {
  afosmc_state_.e_window.push(e);
  afosmc_state_.s = sliding_surface(afosmc_state_.e_window, afosmc_, surface_table_);
  afosmc_state_.e_dot_window.push(e_dot);
  afosmc_state_.s_window.push(afosmc_state_.s);

  const double pi = pi_bound(afosmc_state_.beta_hat, q);
  afosmc_state_.pi_term_window.push(afosmc_state_.s * pi * pi / afosmc_state_.epsilon);

  const double mu_s =
      afosmc_control(afosmc_state_, plant_, q, q_dot, q_ddot_ref, afosmc_, integral_table_);

  comp_state_.integral_e += e * dt;
  const Vec3 i_vec = compensator_io(e, e_dot, comp_state_.integral_e, comp_);
  comp_state_.i_vec = i_vec;
  const Activation act = activation(i_vec);
  const double mu_c = compensator_control(comp_state_, g_c3_, comp_);

  Vec3 i_dot = {0.0, 0.0, 0.0};
  if (comp_state_.has_prev) {
    for (int i = 0; i < 3; ++i) {
      i_dot[i] = (i_vec[i] - comp_state_.i_prev[i]) / dt;
    }
  }
  const double h_hat = hamiltonian_estimate(i_vec, i_dot, mu_c, comp_state_.w_hat, comp_);
  comp_state_ = update_weights(std::move(comp_state_), h_hat, act.grad_diag, i_dot, dt, comp_);
  comp_state_.i_prev = i_vec;
  comp_state_.has_prev = true;

  afosmc_state_ = update_beta(std::move(afosmc_state_), q, dt, afosmc_);
  afosmc_state_ = update_epsilon(std::move(afosmc_state_), dt, afosmc_);

  CaseOneOutput out;
  out.mu_s = mu_s;
  out.mu_c = mu_c;
  out.mu = total_control(mu_s, mu_c);
  out.s = afosmc_state_.s;
  out.beta_hat = afosmc_state_.beta_hat;
  out.epsilon = afosmc_state_.epsilon;
  out.w_hat = comp_state_.w_hat;
  return out;
}

CaseTwoController::CaseTwoController(const BaselineParams& params, const PlantParams& plant_nominal)
    : params_(params), plant_(plant_nominal) {
  params_.validate();
  plant_.validate();
}

BaselineOutput CaseTwoController::tick(double e, double e_dot, double q, double q_dot, double dt) {
  const DobResult dob =
      dob_estimate(dob_, q, q_dot, mu_prev_, plant_, dt, params_.dob_bandwidth);
  dob_ = dob.state;
  integral_e_ += e * dt;
  BaselineOutput out;
  out.d_hat = dob.d_hat;
  out.mu = pid_dob_control(e, integral_e_, e_dot, dob.d_hat, params_);
  mu_prev_ = out.mu;
  return out;
}

CaseThreeController::CaseThreeController(const BaselineParams& params,
                                         const PlantParams& plant_nominal)
    : params_(params), plant_(plant_nominal) {
  params_.validate();
  plant_.validate();
}

BaselineOutput CaseThreeController::tick(double e, double e_dot, double q, double q_dot,
                                         double q_ddot_ref, double dt) {
  const DobResult dob =
      dob_estimate(dob_, q, q_dot, mu_prev_, plant_, dt, params_.dob_bandwidth);
  dob_ = dob.state;
  BaselineOutput out;
  out.d_hat = dob.d_hat;
  out.mu = smc_dob_control(e, e_dot, q, q_dot, q_ddot_ref, dob.d_hat, plant_, params_);
  mu_prev_ = out.mu;
  return out;
}

}  // namespace usmsim
