#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace usmsim::frac {

// Gamma function via the Lanczos approximation (g = 7, 9 coefficients).
// Relative error is below 1e-13 on [0.1, 30]; negative non-integer
// arguments go through the reflection formula. Non-positive integers
// throw std::domain_error.
double gamma(double x);

// Grunwald-Letnikov binomial weights for a given exponent. coeffs[0] = 1
// and coeffs[j] = (1 - (1 + order)/j) * coeffs[j-1]. For the integral
// branch the table is simply built with a negative exponent.
struct CoeffTable {
  double order = 0.0;            // exponent the table was built for
  double step = 1.0;             // grid spacing the table is meant for
  std::vector<double> coeffs;    // c0..cN

  std::size_t size() const { return coeffs.size(); }
};

CoeffTable gl_coeffs(double order, std::size_t n, double step = 1.0);

// Fixed-capacity chronological sample buffer (ring semantics: pushing
// beyond capacity evicts the oldest sample). Most-recent sample is
// age 0. Value type; owners mutate, readers only sample.
class HistoryWindow {
 public:
  HistoryWindow() = default;
  HistoryWindow(std::size_t capacity, double step, double origin_time = 0.0);

  void push(double value);       // rejects non-finite values
  void clear();

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return buf_.size(); }
  bool empty() const { return size_ == 0; }
  double step() const { return step_; }
  double origin_time() const { return origin_; }

  // Sample at lag j * step behind the newest one; j < size().
  double at_age(std::size_t age) const;
  double latest() const { return at_age(0); }

 private:
  std::vector<double> buf_;
  std::size_t head_ = 0;         // index of the oldest sample
  std::size_t size_ = 0;
  double step_ = 0.0;
  double origin_ = 0.0;
};

// Windowed GL evaluation: step^-order * sum_j coeffs[j] * x(t - j*step)
// over every sample the window currently holds. When the window spans
// the whole history since origin_time this is the full-memory GL sum,
// otherwise the short-memory value.
double gl_eval(const HistoryWindow& window, const CoeffTable& table);

// GL fractional derivative of the given positive order.
double gl_derivative(const HistoryWindow& window, double order);
double gl_derivative(const HistoryWindow& window, const CoeffTable& table);

// GL approximation of the RL fractional integral of the given positive
// order (evaluated with exponent -order).
double frac_integral(const HistoryWindow& window, double order);
double frac_integral(const HistoryWindow& window, const CoeffTable& table);

// Sign dispatch of the fundamental operator: derivative for order > 0,
// identity (latest sample) for order = 0, integral for order < 0.
double frac_operator(const HistoryWindow& window, double order);

// Worst-case deviation of the short-memory operator from the full-memory
// one for signals bounded by bound_m: bound_m * length_l^-order / |Gamma(1-order)|.
// Requires 0 < order < 1.
double short_memory_error_bound(double bound_m, double length_l, double order);

struct MemoryPlan {
  double bound_m = 0.0;    // signal bound M
  double accuracy = 0.0;   // requested accuracy
  double order = 0.0;      // fractional order
  double length = 0.0;     // memory length in seconds
};

// Shortest memory length whose truncation error bound meets the requested
// accuracy: length = (M / (accuracy * |Gamma(1-order)|))^(1/order).
MemoryPlan memory_length_for_accuracy(double bound_m, double accuracy, double order);

// Window capacity for a memory length of `seconds` on a grid of spacing
// `step`: floor(seconds/step) + 1 samples (lags 0..floor(L/step)).
std::size_t capacity_for_length(double seconds, double step);

// Coefficient tables are cheap to reuse and expensive enough to rebuild
// at 1 kHz; owners keep one cache keyed by (order, size). No global state.
class CoeffCache {
 public:
  const CoeffTable& get(double order, std::size_t n, double step);

 private:
  std::map<std::pair<double, std::size_t>, CoeffTable> tables_;
};

// Batch kernels: windowed GL value at every index of a recorded signal,
// out[i] = step^-order * sum_{j < min(i+1, window_cap)} c_j * x[i-j].
// Pass window_cap >= signal size for the full-memory series. The parallel
// version splits over output indices and is bit-identical to the serial
// reference (each element keeps the same inner summation order).
std::vector<double> gl_series_serial(std::span<const double> signal, double order,
                                     double step, std::size_t window_cap);
std::vector<double> gl_series(std::span<const double> signal, double order,
                              double step, std::size_t window_cap);

}  // namespace usmsim::frac
