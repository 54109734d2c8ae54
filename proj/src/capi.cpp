#include "semimed.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "semimed/errors.hpp"
#include "semimed/estimate.hpp"
#include "semimed/io.hpp"
#include "semimed/records.hpp"
#include "semimed/simulation.hpp"

using namespace semimed;

namespace {

thread_local std::string g_last_error;

smd_status fail(smd_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
smd_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    return fail(SMD_ERR_VALIDATION, e.what());
  } catch (const PartialVarianceError& e) {
    return fail(SMD_ERR_PARTIAL_VARIANCE, e.what());
  } catch (const ConfigError& e) {
    return fail(SMD_ERR_INVALID_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(SMD_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(SMD_ERR_RUNTIME, "unknown error");
  }
}

// flattened row ready for smd_estimate_row
struct FlatRow {
  double time;
  std::string z1, z2e, dec, method;
  double estimate, se, lo, hi;
  int has_se, has_ci;
};

ScenarioConfig config_from(const smd_sim_opts& o) {
  ScenarioConfig cfg;
  if (o.setting >= 1 && o.setting <= 3) {
    cfg = ScenarioConfig::preset(o.setting);
  } else {
    cfg.setting = 0;
    cfg.a = o.a;
    cfg.b = o.b;
    cfg.c = o.c;
  }
  cfg.m = o.m;
  cfg.p_treat = o.p_treat;
  cfg.censor_low = o.censor_low;
  cfg.censor_high = o.censor_high;
  cfg.horizon = o.horizon;
  cfg.n_reps = o.n_reps;
  cfg.n_boot = o.n_boot;
  cfg.seed = o.seed;
  if (o.eval_times && o.n_eval > 0) {
    cfg.eval_times.assign(o.eval_times, o.eval_times + o.n_eval);
  }
  return cfg;
}

std::vector<std::pair<std::string, std::string>> study_config_kv(const ScenarioConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("setting", std::to_string(c.setting));
  kv.emplace_back("a", std::to_string(c.a));
  kv.emplace_back("b", std::to_string(c.b));
  kv.emplace_back("c", std::to_string(c.c));
  kv.emplace_back("m", std::to_string(c.m));
  kv.emplace_back("p_treat", format_double(c.p_treat));
  kv.emplace_back("censor_low", format_double(c.censor_low));
  kv.emplace_back("censor_high", format_double(c.censor_high));
  kv.emplace_back("horizon", format_double(c.horizon));
  kv.emplace_back("n_reps", std::to_string(c.n_reps));
  kv.emplace_back("n_boot", std::to_string(c.n_boot));
  std::string ts;
  for (double t : c.eval_times) {
    if (!ts.empty()) ts += ";";
    ts += format_double(t);
  }
  kv.emplace_back("eval_times", ts);
  return kv;
}

std::string kv_canonical(const std::vector<std::pair<std::string, std::string>>& kv,
                         std::uint64_t seed) {
  std::string s;
  for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
  s += "seed=" + std::to_string(seed) + "\n";
  s += std::string("version=") + kVersion + "\n";
  return s;
}

}  // namespace

struct smd_dataset {
  std::vector<SubjectRecord> records;
};

struct smd_estimate {
  EstimateResult result;
  std::vector<FlatRow> rows;
  std::string run_id;
  std::vector<std::pair<std::string, std::string>> config_kv;
};

struct smd_study {
  StudySummary summary;
  std::string run_id;
  std::vector<std::pair<std::string, std::string>> config_kv;
};

extern "C" {

const char* smd_version(void) { return kVersion; }

const char* smd_last_error(void) { return g_last_error.c_str(); }

smd_status smd_dataset_read_csv(const char* path, smd_dataset** out) {
  if (!path || !out) return fail(SMD_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto d = new smd_dataset{read_records_csv(path)};
    *out = d;
    return SMD_OK;
  });
}

smd_status smd_dataset_from_rows(size_t n, const char* const* ids, const int* z,
                                 const double* time_nonterminal,
                                 const int* status_nonterminal, const double* time_terminal,
                                 const int* status_terminal, smd_dataset** out) {
  if (!out || !z || !time_nonterminal || !status_nonterminal || !time_terminal ||
      !status_terminal) {
    return fail(SMD_ERR_INVALID_ARG, "null argument");
  }
  return guarded([&] {
    std::vector<SubjectRecord> rows;
    rows.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      SubjectRecord r;
      r.id = ids && ids[i] ? ids[i] : "s" + std::to_string(i + 1);
      r.arm = z[i];
      r.time_nonterminal = time_nonterminal[i];
      r.status_nonterminal = status_nonterminal[i];
      r.time_terminal = time_terminal[i];
      r.status_terminal = status_terminal[i];
      rows.push_back(std::move(r));
    }
    auto d = new smd_dataset{validate_records(std::move(rows))};
    *out = d;
    return SMD_OK;
  });
}

void smd_dataset_free(smd_dataset* d) { delete d; }

size_t smd_dataset_count(const smd_dataset* d, int arm) {
  if (!d) return 0;
  if (arm != 0 && arm != 1) return d->records.size();
  size_t n = 0;
  for (const auto& r : d->records) {
    if (r.arm == arm) ++n;
  }
  return n;
}

void smd_estimate_opts_init(smd_estimate_opts* opts) {
  if (!opts) return;
  opts->decomposition = SMD_DECOMP_BOTH;
  opts->ci = SMD_CI_NONE;
  opts->effects = SMD_EFFECT_ALL;
  opts->n_boot = 200;
  opts->alpha = 0.05;
  opts->seed = 20240801;
  opts->threads = 1;
  opts->grid = nullptr;
  opts->grid_len = 0;
}

smd_status smd_run_estimate(const smd_dataset* d, const smd_estimate_opts* opts,
                            smd_estimate** out) {
  if (!d || !opts || !out) return fail(SMD_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    EstimateOptions eo;
    switch (opts->decomposition) {
      case SMD_DECOMP_PREV: eo.decomposition = DecompositionChoice::prev; break;
      case SMD_DECOMP_HAZ: eo.decomposition = DecompositionChoice::haz; break;
      case SMD_DECOMP_BOTH: eo.decomposition = DecompositionChoice::both; break;
      default: throw ConfigError("bad decomposition");
    }
    switch (opts->ci) {
      case SMD_CI_NONE: eo.ci = CiChoice::none; break;
      case SMD_CI_ASYMPTOTIC: eo.ci = CiChoice::asymptotic; break;
      case SMD_CI_BOOTSTRAP: eo.ci = CiChoice::bootstrap; break;
      case SMD_CI_BOTH: eo.ci = CiChoice::both; break;
      default: throw ConfigError("bad ci method");
    }
    eo.effects_mask = opts->effects & SMD_EFFECT_ALL;
    eo.n_boot = opts->n_boot;
    eo.alpha = opts->alpha;
    eo.seed = opts->seed;
    eo.threads = opts->threads > 0 ? opts->threads : 1;
    if (opts->grid && opts->grid_len > 0) {
      eo.grid.assign(opts->grid, opts->grid + opts->grid_len);
    }

    auto e = std::make_unique<smd_estimate>();
    e->result = run_estimate(d->records, eo);

    // flatten rows once; string fields stay alive inside the handle
    for (const CurveOutput& c : e->result.curves) {
      for (const auto& band : c.bands) {
        for (std::size_t i = 0; i < e->result.grid.size(); ++i) {
          FlatRow r;
          r.time = e->result.grid[i];
          r.z1 = c.is_effect ? "" : std::to_string(c.z1);
          r.z2e = c.is_effect ? to_string(c.effect) : std::to_string(c.z2);
          r.dec = to_string(c.dec);
          r.method = std::string(to_string(band.method)) + (band.partial ? "_partial" : "");
          r.estimate = c.estimate[i];
          r.has_se = band.se.empty() ? 0 : 1;
          r.se = r.has_se ? band.se[i] : 0.0;
          r.has_ci = band.has_ci ? 1 : 0;
          r.lo = band.has_ci ? band.lo[i] : 0.0;
          r.hi = band.has_ci ? band.hi[i] : 0.0;
          e->rows.push_back(std::move(r));
        }
      }
    }

    auto& kv = e->config_kv;
    kv.emplace_back("decomposition", opts->decomposition == SMD_DECOMP_PREV   ? "prev"
                                     : opts->decomposition == SMD_DECOMP_HAZ ? "haz"
                                                                             : "both");
    kv.emplace_back("ci", to_string(eo.ci == CiChoice::none          ? VarianceMethod::none
                                    : eo.ci == CiChoice::asymptotic ? VarianceMethod::asymptotic
                                                                    : VarianceMethod::bootstrap));
    if (eo.ci == CiChoice::both) kv.back().second = "both";
    kv.emplace_back("effects", std::to_string(eo.effects_mask));
    kv.emplace_back("n_boot", std::to_string(eo.n_boot));
    kv.emplace_back("alpha", format_double(eo.alpha));
    if (!eo.grid.empty()) {
      std::string g;
      for (double t : eo.grid) {
        if (!g.empty()) g += ";";
        g += format_double(t);
      }
      kv.emplace_back("grid", g);
    } else {
      kv.emplace_back("grid", "events");
    }
    e->run_id = config_hash_hex(kv_canonical(kv, eo.seed));
    *out = e.release();
    return SMD_OK;
  });
}

void smd_estimate_free(smd_estimate* e) { delete e; }

double smd_estimate_horizon(const smd_estimate* e) { return e ? e->result.horizon : 0.0; }

size_t smd_estimate_row_count(const smd_estimate* e) { return e ? e->rows.size() : 0; }

smd_status smd_estimate_row(const smd_estimate* e, size_t index, smd_curve_row* out) {
  if (!e || !out) return fail(SMD_ERR_INVALID_ARG, "null argument");
  if (index >= e->rows.size()) return fail(SMD_ERR_INVALID_ARG, "row index out of range");
  const FlatRow& r = e->rows[index];
  out->time = r.time;
  out->z1 = r.z1.c_str();
  out->z2_or_effect = r.z2e.c_str();
  out->decomposition = r.dec.c_str();
  out->variance_method = r.method.c_str();
  out->estimate = r.estimate;
  out->se = r.se;
  out->ci_lo = r.lo;
  out->ci_hi = r.hi;
  out->has_se = r.has_se;
  out->has_ci = r.has_ci;
  return SMD_OK;
}

size_t smd_estimate_warning_count(const smd_estimate* e) {
  return e ? e->result.warnings.size() : 0;
}

const char* smd_estimate_warning(const smd_estimate* e, size_t index) {
  if (!e || index >= e->result.warnings.size()) return "";
  return e->result.warnings[index].c_str();
}

smd_status smd_estimate_write(const smd_estimate* e, const char* dir,
                              const char* input_name) {
  if (!e || !dir) return fail(SMD_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const std::string d(dir);
    write_curves_csv(e->result, d + "/curves.csv", e->run_id);
    ManifestInfo mi;
    mi.command = "estimate";
    mi.run_id = e->run_id;
    mi.config_hash = e->run_id;
    mi.seed = e->result.options.seed;
    if (input_name) mi.inputs.push_back(input_name);
    mi.outputs = {"curves.csv"};
    mi.horizon = e->result.horizon;
    mi.has_horizon = true;
    mi.warnings = e->result.warnings;
    mi.config = e->config_kv;
    write_manifest(d, mi);
    return SMD_OK;
  });
}

void smd_sim_opts_init(smd_sim_opts* opts, int setting) {
  if (!opts) return;
  ScenarioConfig cfg;
  if (setting >= 1 && setting <= 3) cfg = ScenarioConfig::preset(setting);
  opts->setting = setting >= 1 && setting <= 3 ? setting : 0;
  opts->a = cfg.a;
  opts->b = cfg.b;
  opts->c = cfg.c;
  opts->m = cfg.m;
  opts->p_treat = cfg.p_treat;
  opts->censor_low = cfg.censor_low;
  opts->censor_high = cfg.censor_high;
  opts->horizon = cfg.horizon;
  opts->n_reps = cfg.n_reps;
  opts->n_boot = cfg.n_boot;
  opts->seed = cfg.seed;
  opts->eval_times = nullptr;
  opts->n_eval = 0;
  opts->threads = 1;
}

smd_status smd_run_study(const smd_sim_opts* opts, smd_study** out) {
  if (!opts || !out) return fail(SMD_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const ScenarioConfig cfg = config_from(*opts);
    auto s = std::make_unique<smd_study>();
    s->summary = run_study(cfg, opts->threads > 0 ? opts->threads : 1);
    s->config_kv = study_config_kv(cfg);
    s->run_id = config_hash_hex(kv_canonical(s->config_kv, cfg.seed));
    *out = s.release();
    return SMD_OK;
  });
}

void smd_study_free(smd_study* s) { delete s; }

size_t smd_study_row_count(const smd_study* s) { return s ? s->summary.rows.size() : 0; }

smd_status smd_study_get_row(const smd_study* s, size_t index, smd_study_row* out) {
  if (!s || !out) return fail(SMD_ERR_INVALID_ARG, "null argument");
  if (index >= s->summary.rows.size())
    return fail(SMD_ERR_INVALID_ARG, "row index out of range");
  const StudyRow& r = s->summary.rows[index];
  out->setting = r.setting;
  out->effect = r.effect.c_str();
  out->decomposition = r.decomposition.c_str();
  out->truth_assumption = r.truth_assumption.c_str();
  out->stat = r.stat.c_str();
  out->t = r.t;
  out->value = r.value;
  return SMD_OK;
}

size_t smd_study_warning_count(const smd_study* s) {
  return s ? s->summary.warnings.size() : 0;
}

const char* smd_study_warning(const smd_study* s, size_t index) {
  if (!s || index >= s->summary.warnings.size()) return "";
  return s->summary.warnings[index].c_str();
}

smd_status smd_study_write(const smd_study* s, const char* dir) {
  if (!s || !dir) return fail(SMD_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const std::string d(dir);
    write_study_summary_csv(s->summary, d + "/study_summary.csv", s->run_id);
    write_replicates_csv(s->summary, d + "/study_replicates.csv", s->run_id);
    write_oracle_csv(s->summary.truths, d + "/oracle_curves.csv", s->run_id);
    ManifestInfo mi;
    mi.command = "simulate";
    mi.run_id = s->run_id;
    mi.config_hash = s->run_id;
    mi.seed = s->summary.config.seed;
    mi.outputs = {"study_summary.csv", "study_replicates.csv", "oracle_curves.csv"};
    mi.warnings = s->summary.warnings;
    mi.config = s->config_kv;
    write_manifest(d, mi);
    return SMD_OK;
  });
}

smd_status smd_generate_dataset(const smd_sim_opts* opts, int rep, smd_dataset** out) {
  if (!opts || !out) return fail(SMD_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const ScenarioConfig cfg = config_from(*opts);
    auto d = new smd_dataset{generate_dataset(cfg, rep)};
    *out = d;
    return SMD_OK;
  });
}

smd_status smd_dataset_write_csv(const smd_dataset* d, const char* path) {
  if (!d || !path) return fail(SMD_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(std::string("cannot write ") + path);
    out << "id,z,time_nonterminal,status_nonterminal,time_terminal,status_terminal\n";
    for (const auto& r : d->records) {
      out << r.id << ',' << r.arm << ',' << format_double(r.time_nonterminal) << ','
          << r.status_nonterminal << ',' << format_double(r.time_terminal) << ','
          << r.status_terminal << "\n";
    }
    return SMD_OK;
  });
}

}  // extern "C"
