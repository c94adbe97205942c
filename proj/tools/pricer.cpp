#include "pricer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "qdp/errors.hpp"
#include "qdp/format.hpp"

namespace qdp::cli {

using nlohmann::json;

ComparatorVariant parse_variant(const std::string& text) {
  if (text == "linear") return ComparatorVariant::LinearAncilla;
  if (text == "single") return ComparatorVariant::SingleAncilla;
  throw ConfigError("variant: expected 'linear' or 'single', got '" + text + "'");
}

StrikeRounding parse_rounding(const std::string& text) {
  if (text == "up") return StrikeRounding::Up;
  if (text == "nearest") return StrikeRounding::Nearest;
  throw ConfigError("strike-rounding: expected 'up' or 'nearest', got '" + text + "'");
}

std::string to_string(StrikeRounding rounding) { return rounding == StrikeRounding::Up ? "up" : "nearest"; }

void validate(const RunConfig& config) {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };
  const auto& m = config.market;
  require(std::isfinite(m.s0) && m.s0 > 0.0, "s0: must be > 0");
  require(std::isfinite(m.volatility) && m.volatility > 0.0, "sigma: must be > 0");
  require(std::isfinite(m.maturity) && m.maturity > 0.0, "maturity: must be > 0");
  require(std::isfinite(m.drift), "drift: must be finite");
  require(std::isfinite(m.risk_free_rate), "rate: must be finite");
  require(std::isfinite(config.strike) && config.strike > 0.0, "strike: must be > 0");
  require(config.dim >= 2, "dim: must be >= 2");
  require(config.qudits >= 1, "qudits: must be >= 1");
  require(config.scale_c > 0.0 && config.scale_c <= PayoffEncoding::kShift, "scale-c: must lie in (0, pi/4]");
  require(std::isfinite(config.trunc_sigmas) && config.trunc_sigmas > 0.0, "trunc-sigmas: must be > 0");
  require(config.shots >= 1, "shots: must be >= 1");
  require(config.levels >= 0 && config.levels <= 20, "levels: must lie in [0, 20]");
  require(config.mc_samples >= 2, "mc-samples: must be >= 2");
  require(config.sweep_seeds >= 1, "sweep-seeds: must be >= 1");

  try {
    require_dense(pricing_layout(config.dim, config.qudits, config.variant));
  } catch (const ResourceError& e) {
    throw ConfigError(std::string("dim/qudits: ") + e.what());
  }
  const AssetGrid grid = build_grid(config.market, config.dim, config.qudits, config.trunc_sigmas);
  require(config.strike < grid.last_point(),
          "strike: must lie below the last grid point " + format_real(grid.last_point()) +
              " (the option is otherwise never in the money on the grid)");
  try {
    PayoffEncoding(grid, config.strike, pricing_strike_index(grid, config.strike, config.rounding), config.scale_c);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("scale-c/strike: ") + e.what());
  }
}

RandomStream mlae_stream(std::uint64_t seed, std::uint64_t replicate) {
  return RandomStream(seed).split(kMlaeStream).split(replicate);
}

// ---------------------------------------------------------------------------
// price

PriceReport cmd_price(const RunConfig& config) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();

  PriceReport r;
  r.config = config;
  r.grid = build_grid(config.market, config.dim, config.qudits, config.trunc_sigmas);
  r.analytic = analytic_expected_payoff(config.market, config.strike);
  r.truncated = truncated_expected_payoff(config.market, config.strike, r.grid.s_min, r.grid.s_max);
  r.discretized = discretized_expected_payoff(r.grid, config.strike);

  RandomStream mc_rng = RandomStream(config.seed).split(kMonteCarloStream);
  r.monte_carlo = mc_expected_payoff(config.market, config.strike, config.mc_samples, mc_rng);

  const PricingOracle oracle = build_oracle_A(r.grid, config.strike, config.scale_c, config.variant, config.rounding);
  r.k = oracle.encoding.k();
  r.exact_p1 = exact_p1(oracle.encoding);
  r.linear_p1 = linear_p1(oracle.encoding);
  r.encoding_bound_p1 = cubic_error_bound(oracle.encoding);
  r.exact_expected_payoff = expected_payoff_from_p1(r.exact_p1, r.grid, config.strike, config.scale_c);
  r.prepared_state = apply_matrix(init_ground(oracle.layout), oracle.a);
  r.circuit = oracle.comparator;
  r.circuit.insert(r.circuit.end(), oracle.payoff_loader.begin(), oracle.payoff_loader.end());

  RandomStream shot_rng = mlae_stream(config.seed, 0);
  r.records = run_schedule(oracle.a, Schedule::make(config.levels, config.shots), shot_rng);
  r.mle = mle_estimate(r.records);
  r.quantum_expected_payoff = expected_payoff_from_p1(r.mle.p1_hat, r.grid, config.strike, config.scale_c);
  r.fair_value = discount(r.quantum_expected_payoff, config.market.risk_free_rate, config.market.maturity);
  r.analytic_fair_value = discount(r.analytic, config.market.risk_free_rate, config.market.maturity);

  r.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

namespace {

json config_json(const RunConfig& c) {
  return {{"s0", c.market.s0},
          {"drift", c.market.drift},
          {"rate", c.market.risk_free_rate},
          {"sigma", c.market.volatility},
          {"maturity", c.market.maturity},
          {"strike", c.strike},
          {"dim", c.dim},
          {"qudits", c.qudits},
          {"scale_c", c.scale_c},
          {"trunc_sigmas", c.trunc_sigmas},
          {"shots", c.shots},
          {"levels", c.levels},
          {"seed", c.seed},
          {"variant", std::string(to_string(c.variant))},
          {"strike_rounding", to_string(c.rounding)},
          {"mc_samples", c.mc_samples}};
}

}  // namespace

json to_json(const PriceReport& r, bool include_timing) {
  json records = json::array();
  for (const auto& rec : r.records) records.push_back({{"ell", rec.level}, {"m", rec.m}, {"N", rec.shots}, {"hits", rec.hits}});
  json out = {
      {"schema", "quditprice.price.v1"},
      {"config", config_json(r.config)},
      {"grid", {{"s_min", r.grid.s_min}, {"s_max", r.grid.s_max}, {"omega", r.grid.omega}, {"size", r.grid.size()}, {"k", r.k}}},
      {"analytic_expected_payoff", r.analytic},
      {"truncated_expected_payoff", r.truncated},
      {"discretized_expected_payoff", r.discretized},
      {"monte_carlo", {{"estimate", r.monte_carlo.estimate}, {"std_error", r.monte_carlo.std_error}, {"samples", r.config.mc_samples}}},
      {"statevector", {{"exact_p1", r.exact_p1}, {"linear_p1", r.linear_p1}, {"encoding_error_bound_p1", r.encoding_bound_p1},
                       {"expected_payoff", r.exact_expected_payoff}}},
      {"mlae", {{"theta_hat", r.mle.theta_hat}, {"p1_hat", r.mle.p1_hat}, {"expected_payoff", r.quantum_expected_payoff},
                {"log_likelihood", r.mle.log_likelihood}, {"oracle_calls", r.mle.oracle_calls}, {"records", records}}},
      {"oracle_calls", r.mle.oracle_calls},
      {"fair_value", r.fair_value},
      {"analytic_fair_value", r.analytic_fair_value},
  };
  if (include_timing) out["wall_time_seconds"] = r.wall_time_seconds;
  return out;
}

void write_text(std::ostream& out, const PriceReport& r) {
  out << "European call, d=" << r.config.dim << " n=" << r.config.qudits << " K=" << r.config.strike << " (k=" << r.k
      << ", rounding " << to_string(r.config.rounding) << ")\n";
  out << "  truncation window            [" << r.grid.s_min << ", " << r.grid.s_max << "], omega " << r.grid.omega << '\n';
  out << "  analytic E[f]                " << r.analytic << '\n';
  out << "  truncated quadrature E[f]    " << r.truncated << '\n';
  out << "  discretized classical E[f]   " << r.discretized << '\n';
  out << "  Monte Carlo E[f]             " << r.monte_carlo.estimate << " +/- " << r.monte_carlo.std_error << " ("
      << r.config.mc_samples << " samples)\n";
  out << "  exact P1                     " << r.exact_p1 << "  -> E[f] " << r.exact_expected_payoff << '\n';
  out << "  MLAE theta_hat               " << r.mle.theta_hat << "  P1_hat " << r.mle.p1_hat << '\n';
  out << "  MLAE E[f]                    " << r.quantum_expected_payoff << '\n';
  out << "  fair value (discounted MLAE) " << r.fair_value << "  analytic " << r.analytic_fair_value << '\n';
  out << "  oracle calls M               " << r.mle.oracle_calls << '\n';
  out << "  wall time                    " << r.wall_time_seconds << " s\n";
}

// ---------------------------------------------------------------------------
// sweep-dim

std::vector<SweepRow> cmd_sweep_dim(const RunConfig& config, std::span<const int> dims) {
  if (dims.empty()) throw ConfigError("dims: need at least one dimension");
  std::vector<SweepRow> rows;
  for (int d : dims) {
    RunConfig cfg = config;
    cfg.dim = d;
    validate(cfg);

    const AssetGrid grid = build_grid(cfg.market, cfg.dim, cfg.qudits, cfg.trunc_sigmas);
    const PricingOracle oracle = build_oracle_A(grid, cfg.strike, cfg.scale_c, cfg.variant, cfg.rounding);
    const Schedule schedule = Schedule::make(cfg.levels, cfg.shots);
    const double to_payoff = oracle.encoding.denominator() / (2.0 * cfg.scale_c);

    SweepRow row;
    row.d = d;
    row.analytic = analytic_expected_payoff(cfg.market, cfg.strike);
    row.classical_discretized = discretized_expected_payoff(grid, cfg.strike);
    row.quantum_exact = expected_payoff_from_p1(exact_p1(oracle.encoding), grid, cfg.strike, cfg.scale_c);
    row.encoding_bound = cubic_error_bound(oracle.encoding) * to_payoff;
    row.oracle_calls = schedule.oracle_calls();
    row.seeds = cfg.sweep_seeds;

    std::vector<double> estimates;
    for (int rep = 0; rep < cfg.sweep_seeds; ++rep) {
      RandomStream rng = mlae_stream(cfg.seed, static_cast<std::uint64_t>(rep));
      const auto records = run_schedule(oracle.a, schedule, rng);
      estimates.push_back(expected_payoff_from_p1(mle_estimate(records).p1_hat, grid, cfg.strike, cfg.scale_c));
    }
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / static_cast<double>(estimates.size());
    double ss = 0.0;
    for (double e : estimates) ss += (e - mean) * (e - mean);
    row.quantum_mlae = mean;
    row.quantum_mlae_std = estimates.size() > 1 ? std::sqrt(ss / static_cast<double>(estimates.size() - 1)) : 0.0;
    row.abs_gap_quantum_classical = std::abs(mean - row.classical_discretized);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "d,analytic,classical_discretized,quantum_mlae,abs_gap_quantum_classical,M,quantum_mlae_std,quantum_exact,"
         "encoding_bound,seeds\n";
  for (const auto& r : rows) {
    out << r.d << ',' << format_real(r.analytic) << ',' << format_real(r.classical_discretized) << ','
        << format_real(r.quantum_mlae) << ',' << format_real(r.abs_gap_quantum_classical) << ',' << r.oracle_calls << ','
        << format_real(r.quantum_mlae_std) << ',' << format_real(r.quantum_exact) << ',' << format_real(r.encoding_bound)
        << ',' << r.seeds << '\n';
  }
}

json sweep_json(std::span<const SweepRow> rows) {
  json out = {{"schema", "quditprice.sweep.v1"}, {"rows", json::array()}};
  for (const auto& r : rows) {
    out["rows"].push_back({{"d", r.d},
                           {"analytic", r.analytic},
                           {"classical_discretized", r.classical_discretized},
                           {"quantum_mlae", r.quantum_mlae},
                           {"abs_gap_quantum_classical", r.abs_gap_quantum_classical},
                           {"M", r.oracle_calls},
                           {"quantum_mlae_std", r.quantum_mlae_std},
                           {"quantum_exact", r.quantum_exact},
                           {"encoding_bound", r.encoding_bound},
                           {"seeds", r.seeds}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// paths / pdf

void cmd_paths(const RunConfig& config, int n_paths, int steps, std::ostream& out) {
  if (n_paths < 1) throw ConfigError("paths: must be >= 1");
  if (steps < 1) throw ConfigError("steps: must be >= 1");
  config.market.validate();
  const RandomStream base = RandomStream(config.seed).split(kPathStream);
  out << "path_id,t,S_t\n";
  for (int p = 0; p < n_paths; ++p) {
    RandomStream rng = base.split(static_cast<std::uint64_t>(p));
    const PricePath path = sample_gbm_path(config.market, static_cast<std::size_t>(steps), rng);
    for (std::size_t i = 0; i < path.times.size(); ++i)
      out << p << ',' << format_real(path.times[i]) << ',' << format_real(path.prices[i]) << '\n';
  }
}

PdfTables cmd_pdf(const RunConfig& config, int curve_points) {
  validate(config);
  if (curve_points < 2) throw ConfigError("curve-points: must be >= 2");
  PdfTables t;
  t.grid = build_grid(config.market, config.dim, config.qudits, config.trunc_sigmas);
  const double lo = t.grid.s_min;
  const double hi = t.grid.s_max;
  for (int i = 0; i < curve_points; ++i) {
    // Endpoints are nudged inward so s_min = 0 never reaches the density.
    const double s = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(curve_points);
    t.curve_s.push_back(s);
    t.curve_density.push_back(lognormal_pdf(s, config.market, config.market.maturity));
  }
  return t;
}

void write_curve_csv(std::ostream& out, const PdfTables& tables) {
  out << "s,density\n";
  for (std::size_t i = 0; i < tables.curve_s.size(); ++i)
    out << format_real(tables.curve_s[i]) << ',' << format_real(tables.curve_density[i]) << '\n';
}

// ---------------------------------------------------------------------------
// command line

namespace {

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const int lo = std::stoi(item.substr(0, dash));
        const int hi = std::stoi(item.substr(dash + 1));
        if (hi < lo) throw ConfigError("dims: empty range '" + item + "'");
        for (int d = lo; d <= hi; ++d) dims.push_back(d);
      } else {
        dims.push_back(std::stoi(item));
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      throw ConfigError("dims: cannot parse '" + item + "'");
    }
  }
  if (dims.empty()) throw ConfigError("dims: no dimensions given");
  return dims;
}

// Opens --out, or returns stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
  body(file);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Qudit statevector option pricer: European call via amplitude estimation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value config file; command-line flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  RunConfig config;
  std::string variant = "linear";
  std::string rounding = "up";
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 0;

  app.add_option("--s0", config.market.s0, "Spot price S0")->capture_default_str();
  app.add_option("--drift", config.market.drift, "GBM drift alpha")->capture_default_str();
  app.add_option("--rate", config.market.risk_free_rate, "Risk-free rate r (discounting)")->capture_default_str();
  app.add_option("--sigma", config.market.volatility, "Volatility sigma")->capture_default_str();
  app.add_option("--maturity", config.market.maturity, "Maturity T in years")->capture_default_str();
  app.add_option("--strike", config.strike, "Strike K")->capture_default_str();
  app.add_option("--dim", config.dim, "Asset qudit dimension d")->capture_default_str();
  app.add_option("--qudits", config.qudits, "Number of asset qudits n")->capture_default_str();
  app.add_option("--scale-c", config.scale_c, "Payoff rotation scale c in (0, pi/4]")->capture_default_str();
  app.add_option("--trunc-sigmas", config.trunc_sigmas, "Truncation half-width in standard deviations")->capture_default_str();
  app.add_option("--shots", config.shots, "Shots N per Grover level")->capture_default_str();
  app.add_option("--levels", config.levels, "Grover level cutoff T")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (auto-chosen and reported when omitted)");
  app.add_option("--variant", variant, "Comparator variant")->check(CLI::IsMember({"linear", "single"}))->capture_default_str();
  app.add_option("--strike-rounding", rounding, "Strike-to-register rounding")->check(CLI::IsMember({"up", "nearest"}))->capture_default_str();
  app.add_option("--mc-samples", config.mc_samples, "Monte Carlo baseline sample count")->capture_default_str();
  app.add_option("--out", out_path, "Output path (pdf: file prefix); stdout when omitted");
  app.add_option("--format", format, "Data output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* price = app.add_subcommand("price", "Run the full pricing pipeline and report every estimator");
  bool timing = false;
  std::string amplitudes_path;
  std::string records_path;
  bool print_circuit = false;
  price->add_flag("--timing", timing, "Include wall time in the JSON report");
  price->add_option("--dump-amplitudes", amplitudes_path, "Write A|0> amplitudes as CSV (index,re,im)");
  price->add_option("--records", records_path, "Write MLAE shot records as CSV (ell,m,N,hits)");
  price->add_flag("--print-circuit", print_circuit, "Print the comparator and payoff gate lists");

  auto* sweep = app.add_subcommand("sweep-dim", "Expected payoff versus qudit dimension");
  std::string dims_text = "2-8";
  sweep->add_option("--dims", dims_text, "Dimensions, e.g. 2-8 or 2,4,8")->capture_default_str();
  sweep->add_option("--sweep-seeds", config.sweep_seeds, "MLAE replicates per dimension")->capture_default_str();

  auto* paths = app.add_subcommand("paths", "Sample GBM price paths");
  int n_paths = 10;
  int steps = 250;
  paths->add_option("--paths", n_paths, "Number of paths")->capture_default_str();
  paths->add_option("--steps", steps, "Time steps per path")->capture_default_str();

  auto* pdf = app.add_subcommand("pdf", "Terminal density curve and grid samples");
  int curve_points = 400;
  pdf->add_option("--curve-points", curve_points, "Dense curve sample count")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    config.variant = parse_variant(variant);
    config.rounding = parse_rounding(rounding);
    config.seed_given = seed_opt->count() > 0;
    if (config.seed_given) {
      config.seed = seed;
    } else {
      config.seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) | std::random_device{}();
      std::cerr << "auto-chosen seed: " << config.seed << '\n';
    }
    auto seed_comment = [&](std::ostream& os) {
      if (!config.seed_given) os << "# seed=" << config.seed << '\n';
    };

    if (*price) {
      const PriceReport report = cmd_price(config);
      const json doc = to_json(report, timing);
      if (format == "json" && out_path.empty()) {
        std::cout << doc.dump(2) << '\n';
      } else {
        write_text(std::cout, report);
        if (!out_path.empty()) write_file(out_path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
      }
      if (!amplitudes_path.empty())
        write_file(amplitudes_path, [&](std::ostream& os) { write_amplitudes_csv(os, *report.prepared_state); });
      if (!records_path.empty()) write_file(records_path, [&](std::ostream& os) { write_records_csv(os, report.records); });
      if (print_circuit) write_circuit(std::cout, report.circuit);
    } else if (*sweep) {
      const auto rows = cmd_sweep_dim(config, parse_dims(dims_text));
      Output out(out_path);
      if (format == "json") {
        json doc = sweep_json(rows);
        doc["seed"] = config.seed;
        out.stream() << doc.dump(2) << '\n';
      } else {
        seed_comment(out.stream());
        write_sweep_csv(out.stream(), rows);
      }
    } else if (*paths) {
      // Unless set explicitly, paths use drift 0.05 and volatility 0.2.
      if (app.get_option("--drift")->count() == 0) config.market.drift = 0.05;
      if (app.get_option("--sigma")->count() == 0) config.market.volatility = 0.2;
      Output out(out_path);
      seed_comment(out.stream());
      cmd_paths(config, n_paths, steps, out.stream());
    } else if (*pdf) {
      const PdfTables tables = cmd_pdf(config, curve_points);
      const std::string prefix = out_path.empty() ? "pdf" : out_path;
      write_file(prefix + ".curve.csv", [&](std::ostream& os) { write_curve_csv(os, tables); });
      write_file(prefix + ".grid.csv", [&](std::ostream& os) { write_grid_csv(os, tables.grid); });
      std::cout << "wrote " << prefix << ".curve.csv and " << prefix << ".grid.csv\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qdp::cli
