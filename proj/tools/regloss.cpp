#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "regloss/error.hpp"
#include "regloss/runner.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> threads;
  std::optional<int> theorem;
};

int run(const std::string& sub, const Flags& f) {
  using regloss::Mode;
  nlohmann::json j = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream is(f.config);
    if (!is) throw regloss::Error(regloss::ErrorKind::io, "cannot read config " + f.config);
    try {
      j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
      throw regloss::Error(regloss::ErrorKind::schema, f.config + ": " + e.what());
    }
  }
  if (!j.is_object())
    throw regloss::Error(regloss::ErrorKind::schema, "<root>: expected an object");
  // Subcommand picks the mode; certify keeps certify-thm2 from the config.
  std::string mode = sub;
  if (sub == "certify") {
    const bool thm2 = f.theorem ? *f.theorem == 2
                                : j.value("mode", std::string()) == "certify-thm2";
    mode = thm2 ? "certify-thm2" : "certify-thm1";
  } else if (sub == "sweep") {
    mode = "lower-bound-sweep";
  } else if (sub == "solve") {
    mode = "truncated-solution";
  }
  j["mode"] = mode;
  if (f.seed) j["mixer"]["seed"] = *f.seed;
  if (f.grid) {
    if (mode == "truncated-solution")
      j["truncated"]["M"] = *f.grid;
    else
      j["M"] = *f.grid;
  }
  if (f.threads) j["threads"] = *f.threads;
  if (!f.out.empty()) j["out_dir"] = f.out;

  const regloss::ExperimentConfig cfg = regloss::parse_config(j);
  const regloss::ReportBundle bundle = regloss::run_experiment(cfg);
  for (auto fmt : {regloss::ReportFormat::csv, regloss::ReportFormat::json,
                   regloss::ReportFormat::summary_text})
    regloss::emit_report(bundle, fmt, cfg.out_dir);
  std::cout << regloss::render_summary(bundle);
  return bundle.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regloss: mixing flows, fractional Sobolev norms and series certificates"};
  app.require_subcommand(1);
  Flags f;
  std::string chosen;
  for (const char* name : {"mix", "norms", "certify", "sweep", "solve"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "mixer seed");
    sub->add_option("--grid", f.grid, "points per side");
    sub->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
    if (std::string(name) == "certify")
      sub->add_option("--theorem", f.theorem, "1 or 2")->check(CLI::IsMember({1, 2}));
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI11_PARSE(app, argc, argv);
  try {
    return run(chosen, f);
  } catch (const regloss::Error& e) {
    std::cerr << "error [" << regloss::to_string(e.kind()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
