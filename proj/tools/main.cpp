#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "usmsim/config.hpp"
#include "usmsim/csv.hpp"
#include "usmsim/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

int cmd_run(const std::string& config_path, int case_id, const std::string& out_path) {
  const usmsim::Config cfg = usmsim::load_config(config_path);
  const usmsim::Scenario scenario = cfg.make_scenario(case_id);
  const usmsim::Trace trace = usmsim::run_scenario(scenario);
  usmsim::write_trace_csv(trace, out_path);
  const usmsim::Metrics m = usmsim::compute_metrics(trace, scenario.effective_settle_skip());
  std::printf("case %d: mae %.6g mm, rmse %.6g mm (%zu ticks, settle skip %.3g s)\n", case_id,
              m.mae, m.rmse, trace.ticks(), scenario.effective_settle_skip());
  return kExitOk;
}

int cmd_table(const std::string& config_path) {
  const usmsim::Config cfg = usmsim::load_config(config_path);

  std::printf("%-8s", "case");
  for (const double f : cfg.table_frequencies) {
    std::printf("  %12s  %12s", (std::to_string(f) + "Hz MAE").c_str(),
                (std::to_string(f) + "Hz RMSE").c_str());
  }
  std::printf("\n");

  bool diverged = false;
  for (int case_id = 1; case_id <= 3; ++case_id) {
    std::printf("case %-3d", case_id);
    for (const double f : cfg.table_frequencies) {
      usmsim::Scenario scenario = cfg.make_scenario(case_id);
      scenario.reference.frequency = f;
      try {
        const usmsim::Trace trace = usmsim::run_scenario(scenario);
        const usmsim::Metrics m =
            usmsim::compute_metrics(trace, scenario.effective_settle_skip());
        std::printf("  %12.6g  %12.6g", m.mae, m.rmse);
      } catch (const usmsim::SimulationFault& fault) {
        std::fprintf(stderr, "case %d at %g Hz diverged: %s\n", case_id, f, fault.what());
        std::printf("  %12s  %12s", "diverged", "diverged");
        diverged = true;
      }
    }
    std::printf("\n");
  }
  return diverged ? kExitDivergence : kExitOk;
}

int cmd_sweep_memory(const std::string& config_path, const std::string& out_path) {
  const usmsim::Config cfg = usmsim::load_config(config_path);
  const usmsim::Scenario scenario = cfg.make_scenario(1);
  const std::vector<usmsim::MemorySweepRow> rows =
      usmsim::sweep_memory(scenario, cfg.memory_sweep_lengths);

  const std::string csv = usmsim::sweep_to_csv(rows);
  FILE* out = std::fopen(out_path.c_str(), "wb");
  if (out == nullptr) {
    throw usmsim::IoError("cannot open output file: " + out_path);
  }
  const std::size_t written = std::fwrite(csv.data(), 1, csv.size(), out);
  std::fclose(out);
  if (written != csv.size()) {
    throw usmsim::IoError("failed to write sweep CSV: " + out_path);
  }
  for (const usmsim::MemorySweepRow& row : rows) {
    std::printf("L=%-8g window=%-6zu max_dev=%-12.6g bound=%-12.6g eval=%.0f ns\n",
                row.length_seconds, row.window_samples, row.max_deviation, row.bound,
                row.eval_time_ns);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultrasonic-motor tracking simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  int case_id = 1;

  CLI::App* run = app.add_subcommand("run", "Run one case and write the trace CSV");
  run->add_option("--config", config_path, "Config JSON path")->required();
  run->add_option("--case", case_id, "Controller case (1, 2, or 3)")
      ->required()
      ->check(CLI::Range(1, 3));
  run->add_option("--out", out_path, "Output CSV path")->required();

  CLI::App* table = app.add_subcommand("table", "MAE/RMSE table for cases 1-3");
  table->add_option("--config", config_path, "Config JSON path")->required();

  CLI::App* sweep = app.add_subcommand("sweep-memory", "Short-memory accuracy/cost sweep");
  sweep->add_option("--config", config_path, "Config JSON path")->required();
  sweep->add_option("--out", out_path, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      return cmd_run(config_path, case_id, out_path);
    }
    if (table->parsed()) {
      return cmd_table(config_path);
    }
    if (sweep->parsed()) {
      return cmd_sweep_memory(config_path, out_path);
    }
  } catch (const usmsim::ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kExitConfig;
  } catch (const usmsim::SimulationFault& err) {
    std::fprintf(stderr, "divergence: %s\n", err.what());
    return kExitDivergence;
  } catch (const usmsim::IoError& err) {
    std::fprintf(stderr, "i/o error: %s\n", err.what());
    return kExitIo;
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kExitConfig;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitIo;
  }
  return kExitConfig;
}
