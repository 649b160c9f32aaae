// roughlsm: synthesize near-field data and image locally rough interfaces.
//
//   roughlsm synthesize --profile f1 --kappa2 2 --n 201 --out data/ex1.nfm
//   roughlsm invert --matrix data/ex1.nfm --out data/ex1
//   roughlsm experiment ex4 [--full]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "roughlsm/errors.hpp"
#include "roughlsm/experiment.hpp"
#include "roughlsm/io.hpp"

using namespace roughlsm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void add_medium(CLI::App* app, ExperimentConfig& cfg) {
  app->add_option("--kappa1", cfg.kappa1, "wavenumber above the interface")->capture_default_str();
  app->add_option("--kappa2", cfg.kappa2, "wavenumber below the interface")->capture_default_str();
}

void add_profile(CLI::App* app, ExperimentConfig& cfg) {
  app->add_option("--profile", cfg.profile, "flat, f1, f2, f3 or f6")->capture_default_str();
  app->add_option("--profile-table", cfg.profile_table, "two-column (x, f) table; overrides --profile");
}

void add_synthesis(CLI::App* app, ExperimentConfig& cfg, std::string& variant) {
  add_medium(app, cfg);
  add_profile(app, cfg);
  app->add_option("--a", cfg.a, "half-width of the measurement segment")->capture_default_str();
  app->add_option("--b", cfg.b, "height of the measurement segment")->capture_default_str();
  app->add_option("--n", cfg.n, "number of source/receiver points")->capture_default_str();
  app->add_option("--variant", variant, "raw or modified")->capture_default_str();
  app->add_option("--gr-radius", cfg.gr_radius, "half-disk radius for the modified variant");
  app->add_option("--cell-width", cfg.cell_width, "cell width; 0 selects lambda2/10")->capture_default_str();
  app->add_option("--noise", cfg.noise, "noise levels delta")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->capture_default_str();
  app->add_option("--seed", cfg.seed, "noise seed")->capture_default_str();
}

void add_inversion(CLI::App* app, ExperimentConfig& cfg) {
  app->add_option("--x-min", cfg.x_min)->capture_default_str();
  app->add_option("--x-max", cfg.x_max)->capture_default_str();
  app->add_option("--y-min", cfg.y_min)->capture_default_str();
  app->add_option("--y-max", cfg.y_max)->capture_default_str();
  app->add_option("--hx", cfg.hx, "grid step in x1")->capture_default_str();
  app->add_option("--hy", cfg.hy, "grid step in x2")->capture_default_str();
  app->add_option("--alpha", cfg.alpha, "Tikhonov parameter")->capture_default_str();
  app->add_option("--cutoff", cfg.cutoff, "extraction cutoff C")->capture_default_str();
}

void accept_config(CLI::App* app) {
  // Consumed by expand_config before parsing; declared here for --help.
  static std::string unused;
  app->add_option("--config", unused, "flat key = value file; later command-line options override it");
}

// Replaces "--config FILE" by the options it lists, so that config keys go
// through the same parser and unknown keys are rejected like unknown flags.
// Keys also given on the command line are dropped from the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::set<std::string> explicit_flags;
  for (const std::string& a : args) {
    if (a.starts_with("--")) explicit_flags.insert(a.substr(0, a.find('=')));
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].starts_with("--config=")) {
      file = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(file)) {
      if (!item.parents.empty()) {
        throw CLI::ConversionError("config " + file + ": sections are not supported ('" + item.fullname() + "')");
      }
      std::string name = item.name;
      std::replace(name.begin(), name.end(), '_', '-');
      if (explicit_flags.count("--" + name)) continue;
      if (item.inputs.size() == 1 && item.inputs[0] == "true") {
        out.push_back("--" + name);
      } else if (!(item.inputs.size() == 1 && item.inputs[0] == "false")) {
        out.push_back("--" + name);
        out.insert(out.end(), item.inputs.begin(), item.inputs.end());
      }
    }
  }
  return out;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_noisy_copies(const NearFieldMatrix& clean, const ExperimentConfig& cfg, const std::string& out) {
  const std::filesystem::path path(out);
  for (double delta : cfg.noise) {
    if (delta == 0) continue;
    const std::filesystem::path noisy =
        path.parent_path() / (path.stem().string() + "_" + noise_tag(delta) + path.extension().string());
    write_matrix(add_noise(clean, delta, cfg.seed), noisy);
    std::cout << "wrote " << noisy.string() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field imaging of locally rough interfaces by linear sampling"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  int threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = runtime default)");

  ExperimentConfig cfg;
  std::string variant = "raw";
  std::string out;
  bool csv = false;

  CLI::App* synth = app.add_subcommand("synthesize", "compute a near-field matrix");
  add_synthesis(synth, cfg, variant);
  add_inversion(synth->add_option_group("Inversion", "accepted so one config serves both steps; unused here"), cfg);
  synth->add_option("--out", out, "matrix file")->required();
  synth->add_flag("--csv", csv, "also write p,q,re,im CSV next to the matrix");
  accept_config(synth);

  std::string matrix_file;
  bool no_truth = false;
  CLI::App* invert = app.add_subcommand("invert", "indicator field from a matrix file");
  invert->add_option("--matrix", matrix_file, "matrix file")->required()->check(CLI::ExistingFile);
  add_inversion(invert, cfg);
  add_synthesis(invert->add_option_group("Synthesis", "taken from the matrix header; only the profile is used, "
                                                      "as the overlay truth"),
                cfg, variant);
  invert->add_flag("--no-truth", no_truth, "leave the truth column of the overlay empty");
  invert->add_option("--out", out, "output stem for .csv, .pgm and _overlay.csv")->required();
  accept_config(invert);

  std::string experiment;
  bool full = false;
  std::string experiment_dir;
  CLI::App* exp = app.add_subcommand("experiment", "run an experiment preset");
  exp->add_option("name", experiment, "ex1..ex6")->required();
  exp->add_flag("--full", full, "kappa2 = 10 and N = 601 (slow)");
  exp->add_option("--out", experiment_dir, "output directory");

  std::string kind = "g0";
  double sx = 0.0, sy = 1.0;
  CLI::App* table = app.add_subcommand("green-table", "dump Green's function samples on the measurement line");
  add_medium(table, cfg);
  table->add_option("--a", cfg.a)->capture_default_str();
  table->add_option("--b", cfg.b)->capture_default_str();
  table->add_option("--n", cfg.n)->capture_default_str();
  table->add_option("--kind", kind, "g0, g0s (G0 - Phi) or grs (half-disk G_r^s)")
      ->check(CLI::IsMember({"g0", "g0s", "grs"}))
      ->capture_default_str();
  table->add_option("--source-x", sx)->capture_default_str();
  table->add_option("--source-y", sy)->capture_default_str();
  table->add_option("--gr-radius", cfg.gr_radius);
  table->add_option("--cell-width", cfg.cell_width, "cell width for grs; 0 selects lambda2/10");
  table->add_option("--out", out, "CSV file")->required();

  std::string noise_in;
  double delta = 0.0;
  CLI::App* noise = app.add_subcommand("noise", "add calibrated noise to a matrix file");
  noise->add_option("--in", noise_in)->required()->check(CLI::ExistingFile);
  noise->add_option("--delta", delta)->required();
  noise->add_option("--seed", cfg.seed)->capture_default_str();
  noise->add_option("--out", out)->required();

  try {
    std::vector<std::string> args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    const auto t0 = std::chrono::steady_clock::now();
    if (*synth) {
      cfg.variant = variant_from_string(variant);
      cfg.validate_synthesis();
      SynthesisReport report;
      std::optional<HalfDiskInterface> gr;
      if (cfg.variant == Variant::modified) gr = HalfDiskInterface{cfg.gr_radius};
      const NearFieldMatrix m = synthesize(cfg.make_profile(), cfg.medium(), cfg.line(), cfg.variant, gr,
                                           cfg.effective_cell_width(), &report);
      write_matrix(m, out);
      if (csv) write_matrix_csv(m, std::filesystem::path(out).replace_extension(".csv"));
      std::cout << "cells " << report.cells << ", reference cells " << report.reference_cells
                << ", condition estimate " << report.condition_estimate << ", " << elapsed(t0) << " s\n"
                << "wrote " << out << "\n";
      write_noisy_copies(m, cfg, out);
    } else if (*invert) {
      const NearFieldMatrix m = read_matrix(matrix_file);
      const SamplingGrid grid = cfg.grid();
      if (!(cfg.y_max < m.line.height())) throw DomainError("config: y_max must lie below the measurement height");
      const IndicatorField field = indicator_map(m, grid, TikhonovConfig{cfg.alpha}, m.variant);
      write_indicator(field, cfg.cutoff, out + ".csv");
      write_heatmap(field, out + ".pgm");
      std::optional<InterfaceProfile> truth;
      if (!no_truth) {
        if (!cfg.profile_table.empty() || invert->count("--profile") > 0) {
          truth = cfg.make_profile();
        } else if (!m.profile_id.empty() && !m.profile_id.starts_with("table:")) {
          truth = InterfaceProfile::by_name(m.profile_id);
        }
      }
      write_overlay(extract_interface(field, cfg.cutoff), truth ? &*truth : nullptr, out + "_overlay.csv");
      if (truth) {
        const SeparationMetric s = separation_metric(field, *truth);
        std::cout << "separation " << s.ratio << " (inside " << s.inside_count << ", outside " << s.outside_count
                  << ")\n";
      }
      std::cout << "wrote " << out << ".csv, .pgm, _overlay.csv (" << elapsed(t0) << " s)\n";
    } else if (*exp) {
      std::vector<RunSummary> rows;
      std::filesystem::path dir;
      for (ExperimentConfig run : experiment_preset(experiment, full ? PresetScale::full : PresetScale::desk)) {
        if (!experiment_dir.empty()) run.output_dir = experiment_dir;
        dir = run.output_dir;
        const auto part = run_experiment(run, [](const std::string& s) { std::cout << s << std::endl; });
        rows.insert(rows.end(), part.begin(), part.end());
      }
      write_summary(rows, dir / "summary.csv");
      std::cout << "wrote " << (dir / "summary.csv").string() << " (" << elapsed(t0) << " s)\n";
    } else if (*table) {
      const Medium medium = cfg.medium();
      const LayeredGreen green(medium);
      const Point source(sx, sy);
      const std::vector<Point> pts = cfg.line().points();
      std::optional<HalfDiskReference> reference;
      if (kind == "grs") {
        reference.emplace(medium, HalfDiskInterface{cfg.gr_radius},
                          cfg.cell_width > 0 ? cfg.cell_width : default_cell_width(medium));
      }
      std::FILE* f = std::fopen(out.c_str(), "w");
      if (!f) throw FormatError("cannot write " + out);
      std::fprintf(f, "x1,x2,re,im\n");
      for (const Point& x : pts) {
        Complex v;
        if (kind == "g0") {
          v = green.g0(x, source);
        } else if (kind == "g0s") {
          v = green.g0_scattered(x, source);
        } else {
          v = reference->scattered(x, source);
        }
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", x.x(), x.y(), v.real(), v.imag());
      }
      std::fclose(f);
      std::cout << "wrote " << out << "\n";
    } else if (*noise) {
      write_matrix(add_noise(read_matrix(noise_in), delta, cfg.seed), out);
      std::cout << "wrote " << out << "\n";
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
