#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "regloss/shear.hpp"

namespace regloss {

enum class Mode { mix, norms, certify_thm1, certify_thm2, lower_bound_sweep, truncated_solution };
const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct MixerConfig {
  std::uint64_t seed = 1;
  double amplitude = 14.0;
  double step_duration = 0.05;
  int steps = 20;
  ShearProfile profile = ShearProfile::sawtooth;
  double seam = 0.1;
  bool confined = false;
  double datum_radius = 0.125;
  int refine_every = 0;
  int skip = 2;  // samples dropped before the rate-fit window
};

struct NormsConfig {
  std::vector<double> orders{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> gagliardo_orders{0.25, 0.5, 0.75};
  int gagliardo_max_M = 64;
};

struct ScheduleConfig {
  int d = 3;
  double r = 2.0;
  double p = 2.0;
  double sigma = 1.0;
  double T = 1.0;
  double alpha = 0.0;  // 0 selects 2 (r-1) b / beta
  std::optional<double> b;
  std::optional<double> c;
  std::vector<double> s_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> t_grid{0.01, 0.1, 1.0};
  std::vector<double> p_grid{1.5, 2.0, 4.0, 8.0};
  std::vector<double> sigma_grid{0.5, 1.0, 2.0, 10.0};
  std::vector<int> d_grid{2, 3};
  int s_samples = 100;  // theorem-2 threshold sweep
  long N = 30;
  double target = 1e6;
};

struct TruncatedConfig {
  long N = 3;
  int M = 512;
  int base_M = 256;
  double window_side = 2.3;
  double window_start = 0.13;
  std::vector<double> times{0.0, 0.05, 0.1};
  double s = 0.5;
};

struct ExperimentConfig {
  Mode mode = Mode::mix;
  int d = 2;
  int M = 256;
  int threads = 1;
  std::string out_dir = ".";
  MixerConfig mixer;
  NormsConfig norms;
  ScheduleConfig schedule;
  TruncatedConfig truncated;
};

// Throws a schema error naming the offending field path.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

struct NormRow {
  double t;
  double order;
  std::string method;
  double value;
};

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

struct ReportBundle {
  std::string mode;
  std::vector<NormRow> norms;
  nlohmann::json certificates = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<Check> checks;
  // Extra CSV tables: file name -> (header, rows).
  std::vector<std::pair<std::string, std::pair<std::string, std::vector<std::string>>>> tables;

  bool all_pass() const;
};

ReportBundle run_experiment(const ExperimentConfig& config);

enum class ReportFormat { csv, json, summary_text };

// Writes norms.csv, certificates.json or summary.txt (plus extra tables with
// csv) into dir. Returns the written paths.
std::vector<std::string> emit_report(const ReportBundle& bundle, ReportFormat format,
                                     const std::string& dir);

std::string render_norms_csv(const ReportBundle& bundle);
std::string render_certificates(const ReportBundle& bundle);
std::string render_summary(const ReportBundle& bundle);

}  // namespace regloss
