#pragma once

// Experiment configuration and the preset sweeps ex1..ex6.
//
// Desk presets use kappa2 = 2 and N = 201 (ex4 sweeps N over 67, 134, 201)
// and run in minutes on one core. Full presets use kappa2 = 10 and N = 601
// (ex4: 201, 401, 601), about half a minute of synthesis per run plus inversion.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roughlsm/forward.hpp"
#include "roughlsm/inversion.hpp"

namespace roughlsm {

struct ExperimentConfig {
  std::string label = "run";
  std::string profile = "f1";       // flat, f1, f2, f3, f6
  std::string profile_table;        // two-column file; overrides profile when set
  double kappa1 = 1.0;
  double kappa2 = 2.0;
  double a = 15.0;
  double b = 0.55;
  int n = 201;
  double x_min = -10.0, x_max = 10.0, y_min = -1.0, y_max = 0.5;
  double hx = 0.5, hy = 0.1;
  double alpha = 5e-5;
  std::vector<double> noise{0.0};
  std::uint64_t seed = 42;
  Variant variant = Variant::raw;
  double gr_radius = 0.0;  // modified variant only
  double cell_width = 0.0;  // 0 selects lambda2 / 10
  double cutoff = 0.5;
  std::filesystem::path output_dir = "out";

  InterfaceProfile make_profile() const;
  Medium medium() const { return Medium(kappa1, kappa2); }
  MeasurementLine line() const { return MeasurementLine(a, b, n); }
  SamplingGrid grid() const { return SamplingGrid(x_min, x_max, y_min, y_max, hx, hy); }
  double effective_cell_width() const;

  /// Throws DomainError naming the offending field.
  void validate() const;
  /// validate() without the sampling-grid and inversion fields.
  void validate_synthesis() const;
};

enum class PresetScale { desk, full };

/// Runs of a preset experiment ("ex1".."ex6").
std::vector<ExperimentConfig> experiment_preset(const std::string& name, PresetScale scale);

struct RunSummary {
  std::string label;
  int n = 0;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;
  SeparationMetric metric;
  double condition_estimate = 0.0;
  std::size_t cells = 0;
};

using ProgressLog = std::function<void(const std::string&)>;

/// Synthesizes once, then for each noise level writes the matrix, indicator
/// CSV, heatmap and overlay to output_dir/<label>_d<delta>.*
std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg, const ProgressLog& log = {});

void write_summary(const std::vector<RunSummary>& rows, const std::filesystem::path& path);

/// "0", "0.02" -> file-name tag "d0", "d0.02".
std::string noise_tag(double delta);

}  // namespace roughlsm
