#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "brlab/grid.hpp"

namespace brlab {

// One experiment run: curve presets, grid, delta sweep, randomization, and
// quadrature densities. Loaded from JSON (unknown keys rejected) with
// per-experiment defaults for fields left unset.
struct ExperimentConfig {
  std::string experiment = "l2-scaling";
  std::vector<std::string> curves;  // preset names; first entry is primary
  double Lambda = 16.0;
  int N = 512;
  std::vector<double> deltas;  // dyadic 2^{-2k}, k >= 2 (even exponents)
  int fields = 10;             // random fields per configuration
  std::uint64_t seed = 101;
  int ppo = 0;       // t-quadrature points per octave; 0 = per-delta density
  int r_ppo = 16;    // R-grid points per octave for maximal sweeps
  double lambda_order = 1.0;  // cone multiplier order
  int s_points = 512;         // subordination s-quadrature subintervals
  double s_power = 2.0;       // weighted inequality power s > 1
  std::vector<double> tau_list;   // strip widths for the weighted check
  std::vector<int> dir_counts;    // kakeya direction-set sizes
  double annulus_lo = 2.0, annulus_hi = 7.0;  // random-field radial band
  std::string out_json = "report.json";
  std::string out_csv = "report.csv";
};

// Parses and validates; throws config_error on malformed JSON, unknown keys,
// bad experiment names, inadmissible deltas, or an under-resolved grid.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

struct ReportRow {
  std::string experiment;
  std::string curve;   // empty when not curve-specific
  double delta = 0.0;  // 0 when not applicable
  std::string quantity;
  double value = 0.0;
  double tolerance = 0.0;
  std::string verdict;  // "pass" | "fail" | "info" | "degenerate"
};

struct Report {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, double>> fitted;  // named constants
  // Environment stamp (grid, seeds, densities; nothing time-dependent, so
  // identical configs produce byte-identical files).
  std::vector<std::pair<std::string, double>> environment;

  bool all_pass() const;
};

void write_report_json(const Report& r, const std::string& path);
void write_report_csv(const Report& r, const std::string& path);

// Ordinary least squares of log(value) against log(delta) plus a 200-sample
// bootstrap over rows for the 95% interval [lo, hi]. Requires >= 3 rows and
// positive values (fit_error otherwise).
struct SlopeFit {
  double slope = 0.0, intercept = 0.0;
  double lo = 0.0, hi = 0.0;
};
SlopeFit slope_fit(const std::vector<double>& deltas,
                   const std::vector<double>& values, std::uint64_t seed = 2027);

Report run_l2_scaling(const ExperimentConfig& cfg);
Report run_l4_scaling(const ExperimentConfig& cfg);
Report run_lemma_suite(const ExperimentConfig& cfg);
Report run_maximal_domination(const ExperimentConfig& cfg);
Report run_maximal(const ExperimentConfig& cfg);

// Dispatches on cfg.experiment.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace brlab
