#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "usmsim/harness.hpp"

namespace usmsim {

enum class MemoryUnit { samples, seconds };

// Memory length with an explicit unit tag. 50 samples and 0.05 s differ by
// one sample on a 1 ms grid (capacity for a length L is floor(L/dt) + 1),
// so the unit is never inferred.
struct MemorySpec {
  double length = 50.0;
  MemoryUnit unit = MemoryUnit::samples;
};

struct SimSpec {
  double dt = 1e-3;
  double settle_skip = -1.0;  // seconds; negative = one reference period
  bool quantize_position = false;
  double quantum = 1e-4;
};

struct Config {
  PlantParams plant;
  Reference reference;
  AfosmcParams afosmc;
  CompensatorParams compensator;
  BaselineParams baseline;
  MemorySpec memory;
  SimSpec sim;
  std::vector<double> table_frequencies = {1.0, 5.0, 10.0};
  std::vector<double> memory_sweep_lengths = {0.05, 0.1, 0.5, 1.0};

  bool operator==(const Config&) const = default;

  void validate() const;
  Scenario make_scenario(int case_id) const;
};

// Thrown for malformed or invalid configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Strict JSON parsing: unknown keys are rejected, every value is validated
// against the owning type's invariants.
Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);
std::string serialize_config(const Config& config);

}  // namespace usmsim
