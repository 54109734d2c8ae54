// Command-line front end. Talks to the core exclusively through the shared
// library's C API (semimed.h).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semimed.h"

namespace {

int exit_code_for(smd_status st) {
  switch (st) {
    case SMD_OK: return 0;
    case SMD_ERR_VALIDATION: return 2;
    case SMD_ERR_PARTIAL_VARIANCE: return 3;
    default: return 1;
  }
}

int bail(smd_status st) {
  std::cerr << "error: " << smd_last_error() << "\n";
  return exit_code_for(st);
}

int threads_default() {
  if (const char* env = std::getenv("SEMIMED_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

bool parse_effects(const std::string& list, unsigned* mask) {
  *mask = 0;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "total") *mask |= SMD_EFFECT_TOTAL;
    else if (tok == "de") *mask |= SMD_EFFECT_DE;
    else if (tok == "ie") *mask |= SMD_EFFECT_IE;
    else if (tok == "de_alt") *mask |= SMD_EFFECT_DE_ALT;
    else if (tok == "ie_alt") *mask |= SMD_EFFECT_IE_ALT;
    else return false;
  }
  return *mask != 0;
}

bool parse_grid(const std::string& spec, std::vector<double>* grid) {
  if (spec == "events") return true;  // empty grid means event times
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (!end || *end != '\0') return false;
    grid->push_back(v);
  }
  return !grid->empty();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural direct and indirect treatment effects on a terminal event "
               "in semi-competing-risks data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(smd_version()));

  // ---- estimate ----
  auto* est = app.add_subcommand("estimate", "Estimate effect curves from a CSV dataset");
  std::string input, out_dir = ".", decomposition = "both", ci = "none",
              effects = "total,de,ie,de_alt,ie_alt", grid_spec = "events";
  int n_boot = 200, threads = threads_default();
  double alpha = 0.05;
  std::uint64_t seed = 20240801;
  est->add_option("--input", input, "Input CSV file")->required();
  est->add_option("--decomposition", decomposition, "prev | haz | both")
      ->check(CLI::IsMember({"prev", "haz", "both"}));
  est->add_option("--effects", effects, "Comma list of total,de,ie,de_alt,ie_alt");
  est->add_option("--ci", ci, "none | asymptotic | bootstrap | both")
      ->check(CLI::IsMember({"none", "asymptotic", "bootstrap", "both"}));
  est->add_option("--n-boot", n_boot, "Bootstrap resamples");
  est->add_option("--alpha", alpha, "Two-sided interval level (default 0.05)");
  est->add_option("--seed", seed, "RNG seed");
  est->add_option("--grid", grid_spec, "\"events\" or comma list of times");
  est->add_option("--out-dir", out_dir, "Output directory");
  est->add_option("--threads", threads, "Worker threads (env SEMIMED_THREADS)");

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "Run a replication study on simulated data");
  std::string setting = "1", eval_spec;
  smd_sim_opts so;
  smd_sim_opts_init(&so, 1);
  std::string sim_out_dir = ".";
  int sim_threads = threads_default();
  std::uint64_t sim_seed = so.seed;
  std::size_t m = so.m;
  sim->add_option("--setting", setting, "1 | 2 | 3 | custom");
  sim->add_option("--a", so.a, "Direct terminal-hazard switch (custom setting)");
  sim->add_option("--b", so.b, "Non-terminal-hazard switch (custom setting)");
  sim->add_option("--c", so.c, "Post-event terminal-hazard switch (custom setting)");
  sim->add_option("--m", m, "Sample size per replicate");
  sim->add_option("--p-treat", so.p_treat, "Treatment probability");
  sim->add_option("--censor-low", so.censor_low, "Censoring support lower end");
  sim->add_option("--censor-high", so.censor_high, "Censoring support upper end");
  sim->add_option("--horizon", so.horizon, "Reporting horizon");
  sim->add_option("--reps", so.n_reps, "Replications");
  sim->add_option("--n-boot", so.n_boot, "Bootstrap resamples per replicate");
  sim->add_option("--seed", sim_seed, "Master RNG seed");
  sim->add_option("--eval-times", eval_spec, "Comma list of report times (default 2,4,6,8)");
  sim->add_option("--out-dir", sim_out_dir, "Output directory");
  sim->add_option("--threads", sim_threads, "Worker threads (env SEMIMED_THREADS)");

  CLI11_PARSE(app, argc, argv);

  if (est->parsed()) {
    smd_estimate_opts opts;
    smd_estimate_opts_init(&opts);
    opts.decomposition = decomposition == "prev"  ? SMD_DECOMP_PREV
                         : decomposition == "haz" ? SMD_DECOMP_HAZ
                                                  : SMD_DECOMP_BOTH;
    opts.ci = ci == "asymptotic"  ? SMD_CI_ASYMPTOTIC
              : ci == "bootstrap" ? SMD_CI_BOOTSTRAP
              : ci == "both"      ? SMD_CI_BOTH
                                  : SMD_CI_NONE;
    if (!parse_effects(effects, &opts.effects)) {
      std::cerr << "error: bad --effects list\n";
      return 2;
    }
    std::vector<double> grid;
    if (!parse_grid(grid_spec, &grid)) {
      std::cerr << "error: bad --grid\n";
      return 2;
    }
    if (!grid.empty()) {
      opts.grid = grid.data();
      opts.grid_len = grid.size();
    }
    opts.n_boot = n_boot;
    opts.alpha = alpha;
    opts.seed = seed;
    opts.threads = threads;

    smd_dataset* data = nullptr;
    smd_status st = smd_dataset_read_csv(input.c_str(), &data);
    if (st != SMD_OK) return bail(st);

    smd_estimate* fit = nullptr;
    st = smd_run_estimate(data, &opts, &fit);
    if (st != SMD_OK) {
      smd_dataset_free(data);
      return bail(st);
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    st = smd_estimate_write(fit, out_dir.c_str(), input.c_str());
    if (st != SMD_OK) {
      smd_estimate_free(fit);
      smd_dataset_free(data);
      return bail(st);
    }
    for (size_t i = 0; i < smd_estimate_warning_count(fit); ++i) {
      std::cerr << "warning: " << smd_estimate_warning(fit, i) << "\n";
    }
    std::cout << "wrote " << out_dir << "/curves.csv (" << smd_estimate_row_count(fit)
              << " rows, horizon " << smd_estimate_horizon(fit) << ")\n";
    smd_estimate_free(fit);
    smd_dataset_free(data);
    return 0;
  }

  // simulate
  if (setting == "1" || setting == "2" || setting == "3") {
    const int s = setting[0] - '0';
    const int keep_reps = so.n_reps, keep_boot = so.n_boot;
    const double keep_pt = so.p_treat, keep_cl = so.censor_low, keep_ch = so.censor_high,
                 keep_h = so.horizon;
    smd_sim_opts_init(&so, s);
    so.n_reps = keep_reps;
    so.n_boot = keep_boot;
    so.p_treat = keep_pt;
    so.censor_low = keep_cl;
    so.censor_high = keep_ch;
    so.horizon = keep_h;
  } else if (setting == "custom") {
    so.setting = 0;
  } else {
    std::cerr << "error: --setting must be 1, 2, 3 or custom\n";
    return 2;
  }
  so.m = m;
  so.seed = sim_seed;
  so.threads = sim_threads;
  std::vector<double> eval;
  if (!eval_spec.empty()) {
    if (!parse_grid(eval_spec, &eval) || eval.empty()) {
      std::cerr << "error: bad --eval-times\n";
      return 2;
    }
    so.eval_times = eval.data();
    so.n_eval = eval.size();
  }

  smd_study* study = nullptr;
  smd_status st = smd_run_study(&so, &study);
  if (st != SMD_OK) return bail(st);
  std::error_code ec;
  std::filesystem::create_directories(sim_out_dir, ec);
  st = smd_study_write(study, sim_out_dir.c_str());
  if (st != SMD_OK) {
    smd_study_free(study);
    return bail(st);
  }
  for (size_t i = 0; i < smd_study_warning_count(study); ++i) {
    std::cerr << "warning: " << smd_study_warning(study, i) << "\n";
  }
  std::cout << "wrote " << sim_out_dir << "/study_summary.csv ("
            << smd_study_row_count(study) << " rows)\n";
  smd_study_free(study);
  return 0;
}
