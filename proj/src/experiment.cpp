#include "roughlsm/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "roughlsm/errors.hpp"
#include "roughlsm/io.hpp"

namespace roughlsm {

InterfaceProfile ExperimentConfig::make_profile() const {
  if (!profile_table.empty()) return InterfaceProfile::load_tabulated(profile_table);
  return InterfaceProfile::by_name(profile);
}

double ExperimentConfig::effective_cell_width() const {
  return cell_width > 0 ? cell_width : default_cell_width(medium());
}

void ExperimentConfig::validate() const {
  validate_synthesis();
  const auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) throw DomainError(std::string("config: ") + name + " must be positive");
  };
  positive(alpha, "alpha");
  positive(hx, "hx");
  positive(hy, "hy");
  if (!(x_max >= x_min)) throw DomainError("config: x_max must not be below x_min");
  if (!(y_max >= y_min)) throw DomainError("config: y_max must not be below y_min");
  if (!(y_max < b)) throw DomainError("config: y_max must lie below the measurement height b");
  if (!(cutoff > 0) || cutoff > 1) throw DomainError("config: cutoff must lie in (0, 1]");
}

void ExperimentConfig::validate_synthesis() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) throw DomainError(std::string("config: ") + name + " must be positive");
  };
  positive(kappa1, "kappa1");
  positive(kappa2, "kappa2");
  positive(a, "a");
  if (n < 2) throw DomainError("config: n must be at least 2");
  if (cell_width < 0) throw DomainError("config: cell_width must be non-negative");
  for (double d : noise) {
    if (!(d >= 0) || !std::isfinite(d)) throw DomainError("config: noise levels must be non-negative");
  }
  const InterfaceProfile p = make_profile();
  if (!(b > p.max_value())) {
    std::ostringstream msg;
    msg << "config: b = " << b << " must exceed the interface maximum " << p.max_value();
    throw DomainError(msg.str());
  }
  if (variant == Variant::modified && !(gr_radius > p.support_radius())) {
    std::ostringstream msg;
    msg << "config: gr_radius must exceed the perturbation half-width " << p.support_radius()
        << " for the modified variant";
    throw DomainError(msg.str());
  }
}

std::vector<ExperimentConfig> experiment_preset(const std::string& name, PresetScale scale) {
  const bool full = scale == PresetScale::full;
  ExperimentConfig base;
  base.kappa2 = full ? 10.0 : 2.0;
  base.n = full ? 601 : 201;
  base.output_dir = "out/" + name + (full ? "-full" : "-desk");

  const auto example1 = [&](const std::string& profile) {
    ExperimentConfig c = base;
    c.profile = profile;
    c.a = 15.0;
    c.b = 0.55;
    c.y_min = -1.0;
    c.y_max = 0.5;
    return c;
  };
  const auto example2 = [&] {
    ExperimentConfig c = base;
    c.profile = "f2";
    c.a = 15.0;
    c.b = 0.25;
    c.y_min = -1.0;
    c.y_max = 0.2;
    return c;
  };

  std::vector<ExperimentConfig> runs;
  if (name == "ex1" || name == "ex2" || name == "ex3") {
    ExperimentConfig c = name == "ex1" ? example1("f1") : name == "ex2" ? example2() : example1("f3");
    c.label = name;
    c.noise = {0.0, 0.02, 0.05};
    runs.push_back(c);
  } else if (name == "ex4") {
    const std::vector<int> ns = full ? std::vector<int>{201, 401, 601} : std::vector<int>{67, 134, 201};
    for (int n : ns) {
      ExperimentConfig c = example1("f1");
      c.n = n;
      c.label = name + "_N" + std::to_string(n);
      c.noise = {0.0, 0.02};
      runs.push_back(c);
    }
  } else if (name == "ex5") {
    for (double b : {0.25, 0.65, 1.05}) {
      ExperimentConfig c = example2();
      c.b = b;
      char tag[32];
      std::snprintf(tag, sizeof tag, "_b%g", b);
      c.label = name + tag;
      c.noise = {0.0, 0.02};
      runs.push_back(c);
    }
  } else if (name == "ex6") {
    for (double a : {2.0, 8.0, 14.0}) {
      ExperimentConfig c = example1("f6");
      c.a = a;
      c.label = name + "_a" + std::to_string(static_cast<int>(a));
      c.noise = {0.0, 0.02};
      runs.push_back(c);
    }
  } else {
    throw DomainError("unknown experiment '" + name + "' (expected ex1..ex6)");
  }
  return runs;
}

std::string noise_tag(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "d%g", delta);
  return buf;
}

std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg, const ProgressLog& log) {
  cfg.validate();
  const auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  const InterfaceProfile profile = cfg.make_profile();
  const Medium medium = cfg.medium();
  const MeasurementLine line = cfg.line();
  const SamplingGrid grid = cfg.grid();
  std::optional<HalfDiskInterface> gr;
  if (cfg.variant == Variant::modified) gr = HalfDiskInterface{cfg.gr_radius};

  const auto t0 = std::chrono::steady_clock::now();
  SynthesisReport report;
  const NearFieldMatrix clean =
      synthesize(profile, medium, line, cfg.variant, gr, cfg.effective_cell_width(), &report);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    std::ostringstream msg;
    msg << cfg.label << ": synthesized " << cfg.n << "x" << cfg.n << " matrix, " << report.cells
        << " cells, condition " << report.condition_estimate << ", " << seconds << " s";
    say(msg.str());
  }

  std::vector<RunSummary> out;
  for (double delta : cfg.noise) {
    const NearFieldMatrix data = delta > 0 ? add_noise(clean, delta, cfg.seed) : clean;
    const std::filesystem::path stem = cfg.output_dir / (cfg.label + "_" + noise_tag(delta));
    write_matrix(data, stem.string() + ".nfm");
    const IndicatorField field = indicator_map(data, grid, TikhonovConfig{cfg.alpha}, cfg.variant);
    write_indicator(field, cfg.cutoff, stem.string() + ".csv");
    write_heatmap(field, stem.string() + ".pgm");
    write_overlay(extract_interface(field, cfg.cutoff), &profile, stem.string() + "_overlay.csv");

    RunSummary row{cfg.label, cfg.n, cfg.a, cfg.b, delta, separation_metric(field, profile),
                   report.condition_estimate, report.cells};
    std::ostringstream msg;
    msg << cfg.label << " delta=" << delta << ": separation " << row.metric.ratio;
    say(msg.str());
    out.push_back(row);
  }
  return out;
}

void write_summary(const std::vector<RunSummary>& rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path.string());
  os << "label,N,a,b,delta,inside_mean,outside_mean,separation,cells,condition\n";
  for (const RunSummary& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%d,%g,%g,%g,%.6g,%.6g,%.6g,%zu,%.6g\n", r.label.c_str(), r.n, r.a, r.b,
                  r.delta, r.metric.inside_mean, r.metric.outside_mean, r.metric.ratio, r.cells,
                  r.condition_estimate);
    os << buf;
  }
}

}  // namespace roughlsm
