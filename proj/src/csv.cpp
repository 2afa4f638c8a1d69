#include "usmsim/csv.hpp"

#include <cstdio>
#include <fstream>

namespace usmsim {

namespace {

void append_number(std::string& out, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  out += buf;
}

void append_field(std::string& out, const std::vector<double>& column, std::size_t row) {
  if (row < column.size()) {
    append_number(out, column[row]);
  }
}

}  // namespace

std::string trace_to_csv(const Trace& trace) {
  std::string out = "t,q_r,q,e,mu,mu_s,mu_c,s,beta_hat,epsilon,W1,W2,W3,d_hat\n";
  const std::vector<double>* columns[] = {
      &trace.t,  &trace.q_r,      &trace.q,       &trace.e,  &trace.mu,
      &trace.mu_s, &trace.mu_c,   &trace.s,       &trace.beta_hat, &trace.epsilon,
      &trace.w1, &trace.w2,       &trace.w3,      &trace.d_hat};
  const std::size_t rows = trace.ticks();
  for (std::size_t r = 0; r < rows; ++r) {
    bool first = true;
    for (const auto* col : columns) {
      if (!first) out += ',';
      first = false;
      append_field(out, *col, r);
    }
    out += '\n';
  }
  return out;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  const std::string text = trace_to_csv(trace);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw IoError("failed to write trace CSV");
  }
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open output file: " + path.string());
  }
  write_trace_csv(trace, out);
}

std::string sweep_to_csv(const std::vector<MemorySweepRow>& rows) {
  std::string out = "length_seconds,window_samples,max_deviation,bound,eval_time_ns\n";
  for (const MemorySweepRow& row : rows) {
    append_number(out, row.length_seconds);
    out += ',';
    out += std::to_string(row.window_samples);
    out += ',';
    append_number(out, row.max_deviation);
    out += ',';
    append_number(out, row.bound);
    out += ',';
    append_number(out, row.eval_time_ns);
    out += '\n';
  }
  return out;
}

}  // namespace usmsim
