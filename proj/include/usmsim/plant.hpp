#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace usmsim {

// Sinusoidal perturbation a * sin(2*pi*f*t + phase); amplitude 0 disables it.
struct Sinusoid {
  double amplitude = 0.0;
  double frequency = 0.0;   // Hz
  double phase = 0.0;       // rad

  double at(double t) const;
};

// Velocity-dependent friction force: Coulomb level with a tanh-shaped
// transition (width in mm/s keeps the ODE smooth for RK4) plus an extra
// viscous term.
struct Friction {
  double coulomb_level = 0.0;    // force units
  double viscous_extra = 0.0;    // force per mm/s
  double smoothing_width = 1e-3; // mm/s

  double force(double q_dot) const;
};

// Time-varying uncertain parts of the motor model plus friction. The
// nominal-plus-delta decomposition keeps the effective mass positive as
// long as |dm| amplitude stays below the nominal mass.
struct UncertaintyModel {
  Sinusoid dm, db, dc, dg;
  Friction friction;
};

// Nominal second-order motor model coefficients. Positions are in mm.
struct PlantParams {
  double m_bar = 1.0;      // kg
  double b_bar = 248.4;    // damping
  double c_bar = 202.0;    // stiffness
  double g_bar = 4940.0;   // control gain
  UncertaintyModel uncertainty;

  // Throws std::invalid_argument when the parameters violate the model
  // assumptions (m_bar > 0, g_bar != 0, |dm| < m_bar, finite fields).
  void validate() const;
};

struct PlantState {
  double q = 0.0;       // mm
  double q_dot = 0.0;   // mm/s
  double t = 0.0;       // s
};

// Signals a non-finite state during integration; carries what blew up.
class SimulationFault : public std::runtime_error {
 public:
  SimulationFault(std::string what, std::size_t tick, std::string signal)
      : std::runtime_error(std::move(what)), tick_(tick), signal_(std::move(signal)) {}

  std::size_t tick() const { return tick_; }
  const std::string& signal() const { return signal_; }

 private:
  std::size_t tick_ = 0;
  std::string signal_;
};

// q_ddot = m(t)^-1 * (g(t)*mu - b(t)*q_dot - c(t)*q - friction(q_dot)) with
// each coefficient evaluated as nominal + uncertain part at state.t.
double acceleration(const PlantState& state, double mu, const PlantParams& params);

// Classical RK4 over one step of length dt with mu held constant.
PlantState step(const PlantState& state, double mu, const PlantParams& params, double dt);

}  // namespace usmsim
