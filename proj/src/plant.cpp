#include "usmsim/plant.hpp"

#include <cmath>

namespace usmsim {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

double Sinusoid::at(double t) const {
  if (amplitude == 0.0) {
    return 0.0;
  }
  return amplitude * std::sin(kTwoPi * frequency * t + phase);
}

double Friction::force(double q_dot) const {
  double f = 0.0;
  if (coulomb_level != 0.0) {
    f += coulomb_level * std::tanh(q_dot / smoothing_width);
  }
  if (viscous_extra != 0.0) {
    f += viscous_extra * q_dot;
  }
  return f;
}

void PlantParams::validate() const {
  if (!(m_bar > 0.0) || !std::isfinite(m_bar)) {
    throw std::invalid_argument("plant: m_bar must be positive");
  }
  if (g_bar == 0.0 || !std::isfinite(g_bar)) {
    throw std::invalid_argument("plant: g_bar must be nonzero");
  }
  for (const double v : {b_bar, c_bar, uncertainty.dm.amplitude, uncertainty.db.amplitude,
                         uncertainty.dc.amplitude, uncertainty.dg.amplitude,
                         uncertainty.friction.coulomb_level, uncertainty.friction.viscous_extra}) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("plant: non-finite parameter");
    }
  }
  if (std::fabs(uncertainty.dm.amplitude) >= m_bar) {
    throw std::invalid_argument("plant: |dm| amplitude must stay below m_bar");
  }
  if (!(uncertainty.friction.smoothing_width > 0.0)) {
    throw std::invalid_argument("plant: friction smoothing width must be positive");
  }
}

double acceleration(const PlantState& state, double mu, const PlantParams& params) {
  const UncertaintyModel& u = params.uncertainty;
  const double m = params.m_bar + u.dm.at(state.t);
  const double b = params.b_bar + u.db.at(state.t);
  const double c = params.c_bar + u.dc.at(state.t);
  const double g = params.g_bar + u.dg.at(state.t);
  const double friction = u.friction.force(state.q_dot);
  return (g * mu - b * state.q_dot - c * state.q - friction) / m;
}

PlantState step(const PlantState& state, double mu, const PlantParams& params, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("plant step: dt must be positive");
  }

  const auto accel = [&](double q, double q_dot, double t) {
    PlantState s{q, q_dot, t};
    return acceleration(s, mu, params);
  };

  const double q0 = state.q;
  const double v0 = state.q_dot;
  const double t0 = state.t;

  const double k1q = v0;
  const double k1v = accel(q0, v0, t0);

  const double k2q = v0 + 0.5 * dt * k1v;
  const double k2v = accel(q0 + 0.5 * dt * k1q, v0 + 0.5 * dt * k1v, t0 + 0.5 * dt);

  const double k3q = v0 + 0.5 * dt * k2v;
  const double k3v = accel(q0 + 0.5 * dt * k2q, v0 + 0.5 * dt * k2v, t0 + 0.5 * dt);

  const double k4q = v0 + dt * k3v;
  const double k4v = accel(q0 + dt * k3q, v0 + dt * k3v, t0 + dt);

  PlantState next;
  next.q = q0 + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
  next.q_dot = v0 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  next.t = t0 + dt;

  if (!std::isfinite(next.q) || !std::isfinite(next.q_dot)) {
    throw SimulationFault("plant step produced a non-finite state", 0,
                          !std::isfinite(next.q) ? "q" : "q_dot");
  }
  return next;
}

}  // namespace usmsim
