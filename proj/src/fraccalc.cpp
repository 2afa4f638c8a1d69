#include "usmsim/fraccalc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace usmsim::frac {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lanczos g = 7, n = 9 coefficient set.
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}

}  // namespace

double gamma(double x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("gamma: non-finite argument");
  }
  if (is_nonpositive_integer(x)) {
    throw std::domain_error("gamma: pole at non-positive integer");
  }
  if (x < 0.5) {
    // Reflection: Gamma(x) = pi / (sin(pi x) * Gamma(1 - x)).
    return kPi / (std::sin(kPi * x) * gamma(1.0 - x));
  }
  const double z = x - 1.0;
  double acc = kLanczos[0];
  for (int i = 1; i < 9; ++i) {
    acc += kLanczos[i] / (z + static_cast<double>(i));
  }
  const double t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

CoeffTable gl_coeffs(double order, std::size_t n, double step) {
  if (!std::isfinite(order)) {
    throw std::invalid_argument("gl_coeffs: non-finite order");
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("gl_coeffs: step must be positive");
  }
  CoeffTable table;
  table.order = order;
  table.step = step;
  table.coeffs.resize(n + 1);
  table.coeffs[0] = 1.0;
  for (std::size_t j = 1; j <= n; ++j) {
    table.coeffs[j] = (1.0 - (1.0 + order) / static_cast<double>(j)) * table.coeffs[j - 1];
  }
  return table;
}

HistoryWindow::HistoryWindow(std::size_t capacity, double step, double origin_time)
    : buf_(capacity), step_(step), origin_(origin_time) {
  if (capacity == 0) {
    throw std::invalid_argument("HistoryWindow: capacity must be positive");
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("HistoryWindow: step must be positive");
  }
}

void HistoryWindow::push(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("HistoryWindow: non-finite sample");
  }
  if (buf_.empty()) {
    throw std::logic_error("HistoryWindow: push on default-constructed window");
  }
  if (size_ < buf_.size()) {
    buf_[(head_ + size_) % buf_.size()] = value;
    ++size_;
  } else {
    buf_[head_] = value;
    head_ = (head_ + 1) % buf_.size();
  }
}

void HistoryWindow::clear() {
  head_ = 0;
  size_ = 0;
}

double HistoryWindow::at_age(std::size_t age) const {
  if (age >= size_) {
    throw std::out_of_range("HistoryWindow: age beyond stored samples");
  }
  return buf_[(head_ + size_ - 1 - age) % buf_.size()];
}

double gl_eval(const HistoryWindow& window, const CoeffTable& table) {
  if (window.empty()) {
    throw std::invalid_argument("gl_eval: empty window");
  }
  const std::size_t len = window.size();
  if (table.size() < len) {
    throw std::invalid_argument("gl_eval: coefficient table shorter than window");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    sum += table.coeffs[j] * window.at_age(j);
  }
  return std::pow(window.step(), -table.order) * sum;
}

double gl_derivative(const HistoryWindow& window, double order) {
  if (!(order > 0.0)) {
    throw std::invalid_argument("gl_derivative: order must be positive");
  }
  if (window.empty()) {
    throw std::invalid_argument("gl_derivative: empty window");
  }
  return gl_eval(window, gl_coeffs(order, window.size() - 1, window.step()));
}

double gl_derivative(const HistoryWindow& window, const CoeffTable& table) {
  if (!(table.order > 0.0)) {
    throw std::invalid_argument("gl_derivative: table order must be positive");
  }
  return gl_eval(window, table);
}

double frac_integral(const HistoryWindow& window, double order) {
  if (!(order > 0.0)) {
    throw std::invalid_argument("frac_integral: order must be positive");
  }
  if (window.empty()) {
    throw std::invalid_argument("frac_integral: empty window");
  }
  return gl_eval(window, gl_coeffs(-order, window.size() - 1, window.step()));
}

double frac_integral(const HistoryWindow& window, const CoeffTable& table) {
  if (!(table.order < 0.0)) {
    throw std::invalid_argument("frac_integral: table order must be negative");
  }
  return gl_eval(window, table);
}

double frac_operator(const HistoryWindow& window, double order) {
  if (window.empty()) {
    throw std::invalid_argument("frac_operator: empty window");
  }
  if (order > 0.0) {
    return gl_derivative(window, order);
  }
  if (order < 0.0) {
    return frac_integral(window, -order);
  }
  return window.latest();
}

double short_memory_error_bound(double bound_m, double length_l, double order) {
  if (!(order > 0.0 && order < 1.0)) {
    throw std::domain_error("short_memory_error_bound: order must lie in (0,1)");
  }
  if (bound_m < 0.0 || !(length_l > 0.0)) {
    throw std::domain_error("short_memory_error_bound: need bound_m >= 0 and length_l > 0");
  }
  return bound_m * std::pow(length_l, -order) / std::fabs(gamma(1.0 - order));
}

MemoryPlan memory_length_for_accuracy(double bound_m, double accuracy, double order) {
  if (!(order > 0.0 && order < 1.0)) {
    throw std::domain_error("memory_length_for_accuracy: order must lie in (0,1)");
  }
  if (!(bound_m > 0.0) || !(accuracy > 0.0)) {
    throw std::domain_error("memory_length_for_accuracy: need bound_m > 0 and accuracy > 0");
  }
  MemoryPlan plan;
  plan.bound_m = bound_m;
  plan.accuracy = accuracy;
  plan.order = order;
  plan.length = std::pow(bound_m / (accuracy * std::fabs(gamma(1.0 - order))), 1.0 / order);
  return plan;
}

std::size_t capacity_for_length(double seconds, double step) {
  if (!(seconds > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("capacity_for_length: need positive length and step");
  }
  return static_cast<std::size_t>(std::floor(seconds / step)) + 1;
}

const CoeffTable& CoeffCache::get(double order, std::size_t n, double step) {
  const auto key = std::make_pair(order, n);
  auto it = tables_.find(key);
  if (it == tables_.end()) {
    it = tables_.emplace(key, gl_coeffs(order, n, step)).first;
  }
  return it->second;
}

namespace {

inline double windowed_value(const double* x, std::size_t i, const double* c,
                             std::size_t window_cap, double scale) {
  const std::size_t len = std::min(i + 1, window_cap);
  double sum = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    sum += c[j] * x[i - j];
  }
  return scale * sum;
}

}  // namespace

std::vector<double> gl_series_serial(std::span<const double> signal, double order,
                                     double step, std::size_t window_cap) {
  if (window_cap == 0) {
    throw std::invalid_argument("gl_series: window_cap must be positive");
  }
  const std::size_t n = signal.size();
  std::vector<double> out(n);
  if (n == 0) {
    return out;
  }
  const CoeffTable table = gl_coeffs(order, std::min(window_cap, n) - 1, step);
  const double scale = std::pow(step, -order);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = windowed_value(signal.data(), i, table.coeffs.data(), window_cap, scale);
  }
  return out;
}

std::vector<double> gl_series(std::span<const double> signal, double order,
                              double step, std::size_t window_cap) {
  if (window_cap == 0) {
    throw std::invalid_argument("gl_series: window_cap must be positive");
  }
  const std::size_t n = signal.size();
  std::vector<double> out(n);
  if (n == 0) {
    return out;
  }
  const CoeffTable table = gl_coeffs(order, std::min(window_cap, n) - 1, step);
  const double scale = std::pow(step, -order);
  const double* x = signal.data();
  const double* c = table.coeffs.data();
  double* o = out.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    o[i] = windowed_value(x, static_cast<std::size_t>(i), c, window_cap, scale);
  }
  return out;
}

}  // namespace usmsim::frac
