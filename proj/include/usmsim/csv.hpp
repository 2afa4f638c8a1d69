#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "usmsim/harness.hpp"

namespace usmsim {

// Trace CSV contract: fixed column order
//   t,q_r,q,e,mu,mu_s,mu_c,s,beta_hat,epsilon,W1,W2,W3,d_hat
// header row mandatory, 17 significant digits, LF newlines, absent signals
// written as empty fields. Output is byte-deterministic for a given trace.
std::string trace_to_csv(const Trace& trace);
void write_trace_csv(const Trace& trace, std::ostream& out);
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

std::string sweep_to_csv(const std::vector<MemorySweepRow>& rows);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace usmsim
