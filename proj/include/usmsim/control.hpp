#pragma once

#include <array>
#include <cstddef>

#include "usmsim/fraccalc.hpp"
#include "usmsim/plant.hpp"

namespace usmsim {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// ---------------------------------------------------------------------------
// Fractional-order sliding mode controller (case 1).
// ---------------------------------------------------------------------------

struct AfosmcParams {
  double lambda = 1.0;        // sliding surface position weight
  double alpha = 0.5;         // fractional order, 0 < alpha < 1
  double k_p = 600.0;         // fractional-integral feedback gain
  double k_s = 0.02;          // signum gain
  double l_bar = 0.01;        // epsilon decay rate
  double k1 = 0.1;            // adaptation rate for beta_hat
  double epsilon0 = 1.0;
  double beta0 = 0.1;
  double memory_l = 0.05;     // short-memory length in seconds
  double epsilon_floor = 1e-6;
  std::size_t window_capacity = 0;  // explicit sample count; 0 derives from memory_l

  void validate() const;
  std::size_t capacity(double step) const;
};

struct AfosmcState {
  double s = 0.0;
  double beta_hat = 0.0;
  double epsilon = 0.0;
  frac::HistoryWindow e_window;
  frac::HistoryWindow e_dot_window;
  frac::HistoryWindow s_window;
  frac::HistoryWindow pi_term_window;  // history of s * Pi^2 / epsilon
};

// s = lambda * e(t) + D^(1+alpha) e(t), one GL evaluation over the window.
double sliding_surface(const frac::HistoryWindow& e_window, const AfosmcParams& params);
double sliding_surface(const frac::HistoryWindow& e_window, const AfosmcParams& params,
                       const frac::CoeffTable& surface_table);

// Reduced uncertainty bound beta_hat * (|q| + 1)^2.
double pi_bound(double beta_hat, double q);

// AFOSMC control value. All D^-alpha terms are short-memory fractional
// integrals over the state windows, which must each hold at least one
// sample; sgn(0) = 0.
double afosmc_control(const AfosmcState& state, const PlantParams& plant_nominal,
                      double q, double q_dot, double q_ddot_ref, const AfosmcParams& params);
double afosmc_control(const AfosmcState& state, const PlantParams& plant_nominal,
                      double q, double q_dot, double q_ddot_ref, const AfosmcParams& params,
                      const frac::CoeffTable& integral_table);

// Forward-Euler adaptation beta_hat += dt * k1 * |s| * (|q|+1)^2; never decreases.
AfosmcState update_beta(AfosmcState state, double q, double dt, const AfosmcParams& params);

// epsilon <- max(epsilon * exp(-l_bar * dt), epsilon_floor).
AfosmcState update_epsilon(AfosmcState state, double dt, const AfosmcParams& params);

// ---------------------------------------------------------------------------
// HJB compensator (case 1).
// ---------------------------------------------------------------------------

struct CompensatorParams {
  double lambda1 = 10.0;
  double lambda2 = 1.0;
  double lambda3 = 0.1;
  Mat3 q_weight = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  double r_weight = 494.0;
  double kappa = 1e-5;
  static constexpr std::size_t n_c = 3;  // critic width

  void validate() const;
};

struct CompensatorState {
  Vec3 i_vec = {0.0, 0.0, 0.0};      // [lambda1*int(e), lambda2*e, lambda3*e_dot]
  Vec3 w_hat = {0.0, 0.0, 0.0};      // critic weights
  double integral_e = 0.0;
  Vec3 i_prev = {0.0, 0.0, 0.0};
  bool has_prev = false;
};

struct Activation {
  Vec3 sigma;      // sigmoid of each component of I
  Vec3 grad_diag;  // sigma_i * (1 - sigma_i); grad is diagonal
};

Vec3 compensator_io(double e, double e_dot, double integral_e, const CompensatorParams& params);
Activation activation(const Vec3& i_vec);

// mu_c = -1/2 * R^-1 * g_c3 * sigma3'(I3) * W3 (only the third component of
// g_c = [0, 0, lambda3 * g_bar / m_bar] is nonzero).
double compensator_control(const CompensatorState& state, double g_c3,
                           const CompensatorParams& params);

// H_hat = I^T Q I + mu_c R mu_c + (grad_sigma^T W)^T I_dot.
double hamiltonian_estimate(const Vec3& i_vec, const Vec3& i_dot, double mu_c,
                            const Vec3& w_hat, const CompensatorParams& params);

// Gradient step W <- W - dt * kappa * H_hat * (grad_sigma * I_dot).
CompensatorState update_weights(CompensatorState state, double h_hat, const Vec3& grad_diag,
                                const Vec3& i_dot, double dt, const CompensatorParams& params);

double total_control(double mu_s, double mu_c);

// ---------------------------------------------------------------------------
// Baselines (cases 2 and 3) and the disturbance observer they share.
// ---------------------------------------------------------------------------

struct PidParams {
  double k_x1 = 37.0;
  double k_x2 = 100.0;
  double k_x3 = 0.16;
};

struct SmcParams {
  double lambda_y = 50.0;
  double k_y1 = 500.0;
  double k_y2 = 300.0;
  double sigma_y = 0.1;
};

struct BaselineParams {
  PidParams pid;
  SmcParams smc;
  double dob_bandwidth = 500.0;  // rad/s

  void validate() const;
};

// First-order Q-filter realization of the nominal-model observer. d_hat
// tracks m_bar*q_ddot + b_bar*q_dot + c_bar*q - g_bar*mu through a low-pass
// of the given bandwidth without differentiating q_dot: the unrealizable
// Q(s)*s*q_dot piece is formed as bandwidth*(q_dot - Q(s)q_dot).
struct DobState {
  double v = 0.0;  // filtered velocity
  double w = 0.0;  // filtered residual b_bar*q_dot + c_bar*q - g_bar*mu
};

struct DobResult {
  DobState state;
  double d_hat = 0.0;
};

DobResult dob_estimate(const DobState& state, double q, double q_dot, double mu,
                       const PlantParams& plant_nominal, double dt, double bandwidth);

// mu = -k_x1*e - k_x2*int(e) - k_x3*e_dot - d_hat.
double pid_dob_control(double e, double integral_e, double e_dot, double d_hat,
                       const BaselineParams& params);

// Integer-order SMC with boundary layer: s_y = e_dot + lambda_y*e,
// mu = (m/g)[(b/m)q_dot + (c/m)q + q_ddot_ref - lambda_y*e_dot - k_y1*s_y
//            - k_y2*sat(s_y/sigma_y) - d_hat/m].
double smc_dob_control(double e, double e_dot, double q, double q_dot, double q_ddot_ref,
                       double d_hat, const PlantParams& plant_nominal,
                       const BaselineParams& params);

// ---------------------------------------------------------------------------
// Per-tick drivers used by the scenario loop.
// ---------------------------------------------------------------------------

struct CaseOneOutput {
  double mu = 0.0;
  double mu_s = 0.0;
  double mu_c = 0.0;
  double s = 0.0;
  double beta_hat = 0.0;
  double epsilon = 0.0;
  Vec3 w_hat = {0.0, 0.0, 0.0};
};

class CaseOneController {
 public:
  CaseOneController(const AfosmcParams& afosmc, const CompensatorParams& comp,
                    const PlantParams& plant_nominal, double step);

  CaseOneOutput tick(double e, double e_dot, double q, double q_dot, double q_ddot_ref,
                     double dt);

  const AfosmcState& afosmc_state() const { return afosmc_state_; }
  const CompensatorState& compensator_state() const { return comp_state_; }

 private:
  AfosmcParams afosmc_;
  CompensatorParams comp_;
  PlantParams plant_;
  AfosmcState afosmc_state_;
  CompensatorState comp_state_;
  frac::CoeffTable surface_table_;   // order 1 + alpha
  frac::CoeffTable integral_table_;  // order -alpha
  double g_c3_ = 0.0;
};

struct BaselineOutput {
  double mu = 0.0;
  double d_hat = 0.0;
};

class CaseTwoController {
 public:
  CaseTwoController(const BaselineParams& params, const PlantParams& plant_nominal);
  BaselineOutput tick(double e, double e_dot, double q, double q_dot, double dt);

 private:
  BaselineParams params_;
  PlantParams plant_;
  DobState dob_;
  double integral_e_ = 0.0;
  double mu_prev_ = 0.0;
};

class CaseThreeController {
 public:
  CaseThreeController(const BaselineParams& params, const PlantParams& plant_nominal);
  BaselineOutput tick(double e, double e_dot, double q, double q_dot, double q_ddot_ref,
                      double dt);

 private:
  BaselineParams params_;
  PlantParams plant_;
  DobState dob_;
  double mu_prev_ = 0.0;
};

}  // namespace usmsim
