#include "usmsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace usmsim {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

void Reference::validate() const {
  if (!(frequency > 0.0)) throw std::invalid_argument("reference: frequency must be positive");
  if (!(amplitude > 0.0)) throw std::invalid_argument("reference: amplitude must be positive");
  if (!(duration > 0.0)) throw std::invalid_argument("reference: duration must be positive");
}

RefPoint reference_at(const Reference& ref, double t) {
  ref.validate();
  if (t < 0.0 || t > ref.duration) {
    throw std::invalid_argument("reference_at: t outside [0, duration]");
  }
  RefPoint p;
  if (ref.kind == ReferenceKind::sine) {
    const double w = kTwoPi * ref.frequency;
    p.q_r = ref.amplitude * std::sin(w * t);
    p.q_r_dot = ref.amplitude * w * std::cos(w * t);
    p.q_r_ddot = -ref.amplitude * w * w * std::sin(w * t);
    return p;
  }
  // Triangle matching the sine phase: 0 at t=0, peak +A at a quarter period.
  const double a = ref.amplitude;
  const double slope = 4.0 * a * ref.frequency;
  double u = std::fmod(t * ref.frequency, 1.0);
  if (u < 0.0) u += 1.0;
  if (u <= 0.25) {
    p.q_r = 4.0 * a * u;
    p.q_r_dot = slope;
  } else if (u <= 0.75) {
    p.q_r = a * (2.0 - 4.0 * u);
    p.q_r_dot = -slope;
  } else {
    p.q_r = 4.0 * a * (u - 1.0);
    p.q_r_dot = slope;
  }
  p.q_r_ddot = 0.0;
  return p;
}

void Scenario::validate() const {
  if (case_id < 1 || case_id > 3) {
    throw std::invalid_argument("scenario: case_id must be 1, 2, or 3");
  }
  reference.validate();
  plant.validate();
  if (case_id == 1) {
    afosmc.validate();
    compensator.validate();
  } else {
    baseline.validate();
  }
  if (!(dt > 0.0)) throw std::invalid_argument("scenario: dt must be positive");
  if (effective_settle_skip() >= reference.duration) {
    throw std::invalid_argument("scenario: settle_skip must be below the duration");
  }
  if (quantize_position && !(quantum > 0.0)) {
    throw std::invalid_argument("scenario: quantum must be positive");
  }
}

double Scenario::effective_settle_skip() const {
  return settle_skip >= 0.0 ? settle_skip : 1.0 / reference.frequency;
}

Trace run_scenario(const Scenario& scenario) {
  scenario.validate();

  const double dt = scenario.dt;
  const std::size_t ticks =
      static_cast<std::size_t>(std::ceil(scenario.reference.duration / dt));

  Trace trace;
  trace.case_id = scenario.case_id;
  trace.dt = dt;
  trace.t.reserve(ticks);

  CaseOneController c1(scenario.afosmc, scenario.compensator, scenario.plant, dt);
  CaseTwoController c2(scenario.baseline, scenario.plant);
  CaseThreeController c3(scenario.baseline, scenario.plant);

  PlantState state;
  double e_prev = 0.0;

  for (std::size_t k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * dt;
    const RefPoint ref = reference_at(scenario.reference, std::min(t, scenario.reference.duration));

    double q_meas = state.q;
    if (scenario.quantize_position) {
      q_meas = std::round(q_meas / scenario.quantum) * scenario.quantum;
    }
    const double e = q_meas - ref.q_r;
    const double e_dot = (k == 0) ? 0.0 : (e - e_prev) / dt;
    const double q_dot_meas = e_dot + ref.q_r_dot;
    e_prev = e;

    double mu = 0.0;
    trace.t.push_back(t);
    trace.q_r.push_back(ref.q_r);
    trace.q.push_back(q_meas);
    trace.e.push_back(e);

    try {
      if (scenario.case_id == 1) {
        const CaseOneOutput out = c1.tick(e, e_dot, q_meas, q_dot_meas, ref.q_r_ddot, dt);
        mu = out.mu;
        trace.mu_s.push_back(out.mu_s);
        trace.mu_c.push_back(out.mu_c);
        trace.s.push_back(out.s);
        trace.beta_hat.push_back(out.beta_hat);
        trace.epsilon.push_back(out.epsilon);
        trace.w1.push_back(out.w_hat[0]);
        trace.w2.push_back(out.w_hat[1]);
        trace.w3.push_back(out.w_hat[2]);
      } else if (scenario.case_id == 2) {
        const BaselineOutput out = c2.tick(e, e_dot, q_meas, q_dot_meas, dt);
        mu = out.mu;
        trace.d_hat.push_back(out.d_hat);
      } else {
        const BaselineOutput out = c3.tick(e, e_dot, q_meas, q_dot_meas, ref.q_r_ddot, dt);
        mu = out.mu;
        trace.d_hat.push_back(out.d_hat);
      }
      if (!std::isfinite(mu)) {
        throw SimulationFault("controller output is non-finite", k, "mu");
      }
      trace.mu.push_back(mu);
      state = step(state, mu, scenario.plant, dt);
    } catch (const SimulationFault& fault) {
      throw SimulationFault("divergence at tick " + std::to_string(k) + " (t=" +
                                std::to_string(t) + " s), signal " + fault.signal(),
                            k, fault.signal());
    }
  }
  return trace;
}

namespace {

// Neumaier compensated accumulation.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + c; }
};

}  // namespace

Metrics compute_metrics(const Trace& trace, double settle_skip) {
  Metrics m;
  double max_abs = 0.0;
  CompensatedSum sq;
  std::size_t n = 0;
  for (std::size_t k = 0; k < trace.ticks(); ++k) {
    if (trace.t[k] < settle_skip) {
      continue;
    }
    const double e = trace.e[k];
    max_abs = std::max(max_abs, std::fabs(e));
    sq.add(e * e);
    ++n;
  }
  if (n == 0) {
    throw std::invalid_argument("compute_metrics: no ticks at or after settle_skip");
  }
  m.mae = max_abs;
  m.rmse = std::sqrt(sq.value() / static_cast<double>(n));
  return m;
}

std::vector<Metrics> compare_cases(std::span<const Scenario> scenarios) {
  for (const Scenario& s : scenarios) {
    if (s.reference.kind != scenarios.front().reference.kind ||
        s.reference.frequency != scenarios.front().reference.frequency ||
        s.reference.amplitude != scenarios.front().reference.amplitude ||
        s.reference.duration != scenarios.front().reference.duration) {
      throw std::invalid_argument("compare_cases: scenarios must share the reference");
    }
  }
  std::vector<Metrics> out(scenarios.size());
  std::exception_ptr fault;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(scenarios.size()); ++i) {
    try {
      const Trace trace = run_scenario(scenarios[i]);
      out[i] = compute_metrics(trace, scenarios[i].effective_settle_skip());
    } catch (...) {
#pragma omp critical
      if (!fault) fault = std::current_exception();
    }
  }
  if (fault) std::rethrow_exception(fault);
  return out;
}

double hf_energy(const Trace& trace, double from_time) {
  double acc = 0.0;
  for (std::size_t k = 1; k < trace.ticks(); ++k) {
    if (trace.t[k] < from_time) {
      continue;
    }
    const double d = trace.mu[k] - trace.mu[k - 1];
    acc += d * d;
  }
  return acc;
}

std::vector<MemorySweepRow> sweep_memory(const Scenario& scenario,
                                         std::span<const double> lengths_seconds) {
  Scenario s = scenario;
  s.case_id = 1;
  const Trace trace = run_scenario(s);
  const double dt = s.dt;
  const double alpha = s.afosmc.alpha;

  double bound_m = 0.0;
  for (const double e : trace.e) {
    bound_m = std::max(bound_m, std::fabs(e));
  }

  const std::vector<double> full =
      frac::gl_series(trace.e, alpha, dt, trace.e.size());

  std::vector<MemorySweepRow> rows;
  for (const double length : lengths_seconds) {
    MemorySweepRow row;
    row.length_seconds = length;
    row.window_samples = frac::capacity_for_length(length, dt);
    const std::vector<double> windowed =
        frac::gl_series(trace.e, alpha, dt, row.window_samples);
    for (std::size_t k = 0; k < trace.ticks(); ++k) {
      if (trace.t[k] <= length) {
        continue;  // Lemma warm-up: bound applies for t > t0 + L
      }
      row.max_deviation = std::max(row.max_deviation, std::fabs(full[k] - windowed[k]));
    }
    row.bound = bound_m > 0.0 ? frac::short_memory_error_bound(bound_m, length, alpha) : 0.0;

    const auto t0 = std::chrono::steady_clock::now();
    const int reps = 5;
    for (int r = 0; r < reps; ++r) {
      volatile double sink =
          frac::gl_series_serial(trace.e, alpha, dt, row.window_samples).back();
      (void)sink;
    }
    const auto t1 = std::chrono::steady_clock::now();
    row.eval_time_ns =
        std::chrono::duration<double, std::nano>(t1 - t0).count() /
        (static_cast<double>(reps) * static_cast<double>(trace.ticks()));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace usmsim
