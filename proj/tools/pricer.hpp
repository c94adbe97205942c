#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdp/circuits.hpp"
#include "qdp/grid.hpp"
#include "qdp/market.hpp"
#include "qdp/mlae.hpp"

namespace qdp::cli {

/// Invalid run configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Stream keys split off the run seed.
inline constexpr std::uint64_t kMonteCarloStream = 1;
inline constexpr std::uint64_t kMlaeStream = 2;
inline constexpr std::uint64_t kPathStream = 3;

/// Everything a CLI run needs. Defaults are the single-qudit d = 8 setting.
struct RunConfig {
  GbmParams market{2.0, 0.07, 0.3, 1.0, 0.07};
  double strike = 1.7;
  int dim = 8;
  int qudits = 1;
  double scale_c = 0.05;
  double trunc_sigmas = 3.0;
  int shots = 100;
  int levels = 7;
  std::uint64_t seed = 0;
  bool seed_given = false;
  ComparatorVariant variant = ComparatorVariant::LinearAncilla;
  StrikeRounding rounding = StrikeRounding::Up;
  std::size_t mc_samples = 100000;
  int sweep_seeds = 20;
};

/// Checks every field against the preconditions of the modules it feeds.
void validate(const RunConfig& config);

ComparatorVariant parse_variant(const std::string& text);
StrikeRounding parse_rounding(const std::string& text);
std::string to_string(StrikeRounding rounding);

/// Stream for MLAE replicate `replicate`; replicate 0 is the one `price` uses.
RandomStream mlae_stream(std::uint64_t seed, std::uint64_t replicate);

struct PriceReport {
  RunConfig config;
  AssetGrid grid;
  std::size_t k = 0;
  double analytic = 0.0;
  double truncated = 0.0;
  double discretized = 0.0;
  MonteCarloEstimate monte_carlo;
  double exact_p1 = 0.0;
  double linear_p1 = 0.0;
  double encoding_bound_p1 = 0.0;
  double exact_expected_payoff = 0.0;
  std::vector<ShotRecord> records;
  MleResult mle;
  double quantum_expected_payoff = 0.0;
  double fair_value = 0.0;
  double analytic_fair_value = 0.0;
  double wall_time_seconds = 0.0;
  std::optional<StateVector> prepared_state;
  Circuit circuit;
};

PriceReport cmd_price(const RunConfig& config);
nlohmann::json to_json(const PriceReport& report, bool include_timing);
void write_text(std::ostream& out, const PriceReport& report);

struct SweepRow {
  int d = 0;
  double analytic = 0.0;
  double classical_discretized = 0.0;
  double quantum_mlae = 0.0;
  double abs_gap_quantum_classical = 0.0;
  unsigned long long oracle_calls = 0;
  double quantum_mlae_std = 0.0;
  double quantum_exact = 0.0;
  double encoding_bound = 0.0;  // cubic encoding term in payoff units
  int seeds = 0;
};

std::vector<SweepRow> cmd_sweep_dim(const RunConfig& config, std::span<const int> dims);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
nlohmann::json sweep_json(std::span<const SweepRow> rows);

/// Long-format `path_id,t,S_t`.
void cmd_paths(const RunConfig& config, int n_paths, int steps, std::ostream& out);

struct PdfTables {
  std::vector<double> curve_s;
  std::vector<double> curve_density;
  AssetGrid grid;
};

PdfTables cmd_pdf(const RunConfig& config, int curve_points);
void write_curve_csv(std::ostream& out, const PdfTables& tables);

/// Full command-line entry point. Returns 0 on success, 2 on configuration
/// errors and 1 on runtime errors.
int run_cli(int argc, const char* const* argv);

}  // namespace qdp::cli
