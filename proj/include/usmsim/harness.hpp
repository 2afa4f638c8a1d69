#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "usmsim/control.hpp"
#include "usmsim/plant.hpp"

namespace usmsim {

enum class ReferenceKind { sine, triangle };

struct Reference {
  ReferenceKind kind = ReferenceKind::sine;
  double frequency = 1.0;  // Hz
  double amplitude = 1.0;  // mm
  double duration = 5.0;   // s

  void validate() const;
};

struct RefPoint {
  double q_r = 0.0;
  double q_r_dot = 0.0;
  double q_r_ddot = 0.0;
};

// Reference position/velocity/acceleration at time t in [0, duration].
// The triangle wave is piecewise linear with slope +-4*A*f; its velocity at
// a vertex is the left-limit slope and its acceleration is zero everywhere.
RefPoint reference_at(const Reference& ref, double t);

struct Scenario {
  int case_id = 1;  // 1 = AFOSMC+compensator, 2 = PID+DOB, 3 = SMC+DOB
  Reference reference;
  PlantParams plant;
  AfosmcParams afosmc;
  CompensatorParams compensator;
  BaselineParams baseline;
  double dt = 1e-3;             // controller tick = plant step
  double settle_skip = -1.0;    // seconds; negative means one reference period
  bool quantize_position = false;
  double quantum = 1e-4;        // mm, encoder resolution when enabled

  void validate() const;
  double effective_settle_skip() const;
};

// Per-tick records of a closed-loop run. Signals that a case does not
// produce stay empty (s/beta_hat/epsilon/w for cases 2-3, d_hat for case 1).
struct Trace {
  int case_id = 1;
  double dt = 1e-3;
  std::vector<double> t, q_r, q, e, mu, mu_s, mu_c;
  std::vector<double> s, beta_hat, epsilon, w1, w2, w3;
  std::vector<double> d_hat;

  std::size_t ticks() const { return t.size(); }
};

struct Metrics {
  double mae = 0.0;   // maximum absolute error, mm
  double rmse = 0.0;  // root-mean-square error, mm
};

// Runs the 1 kHz loop: read plant -> e, e_dot (backward difference) ->
// controller -> plant step. Throws SimulationFault on divergence with the
// offending tick.
Trace run_scenario(const Scenario& scenario);

// MAE/RMSE of the tracking error over t >= settle_skip. The mean square is
// accumulated with compensated summation so tick order cannot shift the
// result.
Metrics compute_metrics(const Trace& trace, double settle_skip);

// Runs each scenario (in parallel, one thread per scenario) and returns the
// metrics joined in input order. Scenarios must share the same reference.
std::vector<Metrics> compare_cases(std::span<const Scenario> scenarios);

// Sum of squared tick-to-tick control differences over t >= from_time;
// proxy for chattering energy.
double hf_energy(const Trace& trace, double from_time);

struct MemorySweepRow {
  double length_seconds = 0.0;
  std::size_t window_samples = 0;
  double max_deviation = 0.0;  // max |full - windowed| after warm-up
  double bound = 0.0;          // analytic bound with empirically measured M
  double eval_time_ns = 0.0;   // one windowed evaluation at this length
};

// Accuracy/throughput trade-off of the short-memory operator on the
// recorded tracking error of a case-1 run: for each memory length, the
// measured deviation from the full-memory operator (over t > L), the
// analytic bound using M = max|e|, and the per-tick evaluation cost.
std::vector<MemorySweepRow> sweep_memory(const Scenario& scenario,
                                         std::span<const double> lengths_seconds);

}  // namespace usmsim
