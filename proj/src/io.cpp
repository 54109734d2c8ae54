#include "semimed/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "semimed/errors.hpp"

namespace semimed {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string config_hash_hex(const std::string& canonical) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char* hexd = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hexd[h & 0xF];
    h >>= 4;
  }
  return std::string(buf, 16);
}

namespace {

std::string iso_timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void write_preamble(std::ofstream& out, const std::string& run_id) {
  out << "# manifest: manifest.json run_id=" << run_id << "\n";
}

}  // namespace

std::string write_manifest(const std::string& dir, const ManifestInfo& info) {
  nlohmann::ordered_json j;
  j["command"] = info.command;
  j["version"] = kVersion;
  j["run_id"] = info.run_id;
  j["config_hash"] = info.config_hash;
  j["seed"] = info.seed;
  j["timestamp"] = iso_timestamp_utc();
  j["inputs"] = info.inputs;
  j["outputs"] = info.outputs;
  if (info.has_horizon) j["horizon"] = info.horizon;
  j["warnings"] = info.warnings;
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : info.config) cfg[k] = v;
  j["config"] = cfg;
  const std::string path = dir + "/manifest.json";
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  return path;
}

void write_curves_csv(const EstimateResult& res, const std::string& path,
                      const std::string& run_id) {
  auto out = open_out(path);
  write_preamble(out, run_id);
  out << "time,z1,z2_or_effect,decomposition,estimate,se,ci_lo,ci_hi,variance_method\n";
  for (const CurveOutput& c : res.curves) {
    const std::string z1 = c.is_effect ? "" : std::to_string(c.z1);
    const std::string z2e = c.is_effect ? to_string(c.effect) : std::to_string(c.z2);
    for (const auto& band : c.bands) {
      for (std::size_t i = 0; i < res.grid.size(); ++i) {
        out << format_double(res.grid[i]) << ',' << z1 << ',' << z2e << ','
            << to_string(c.dec) << ',' << format_double(c.estimate[i]) << ',';
        if (!band.se.empty()) out << format_double(band.se[i]);
        out << ',';
        if (band.has_ci) out << format_double(band.lo[i]);
        out << ',';
        if (band.has_ci) out << format_double(band.hi[i]);
        out << ',' << to_string(band.method) << (band.partial ? "_partial" : "") << "\n";
      }
    }
  }
}

void write_study_summary_csv(const StudySummary& s, const std::string& path,
                             const std::string& run_id) {
  auto out = open_out(path);
  write_preamble(out, run_id);
  out << "setting,effect,decomposition,truth_assumption,stat,t,value\n";
  for (const StudyRow& r : s.rows) {
    out << r.setting << ',' << r.effect << ',' << r.decomposition << ','
        << r.truth_assumption << ',' << r.stat << ',' << format_double(r.t) << ','
        << format_double(r.value) << "\n";
  }
}

void write_oracle_csv(const OracleCurves& truths, const std::string& path,
                      const std::string& run_id) {
  auto out = open_out(path);
  write_preamble(out, run_id);
  out << "time,curve,decomposition,value\n";
  const char* dec_name[2] = {"prev", "haz"};
  for (int d = 0; d < 2; ++d) {
    for (int z1 = 0; z1 < 2; ++z1) {
      for (int z2 = 0; z2 < 2; ++z2) {
        const std::string label =
            "F(" + std::to_string(z1) + "," + std::to_string(z2) + ")";
        for (std::size_t i = 0; i < truths.grid.size(); ++i) {
          out << format_double(truths.grid[i]) << ',' << label << ',' << dec_name[d] << ','
              << format_double(truths.f[d][z1][z2][i]) << "\n";
        }
      }
    }
    const std::vector<double>* eff[3] = {&truths.total[d], &truths.de[d], &truths.ie[d]};
    const char* eff_name[3] = {"total", "de", "ie"};
    for (int e = 0; e < 3; ++e) {
      for (std::size_t i = 0; i < truths.grid.size(); ++i) {
        out << format_double(truths.grid[i]) << ',' << eff_name[e] << ',' << dec_name[d]
            << ',' << format_double((*eff[e])[i]) << "\n";
      }
    }
  }
}

void write_replicates_csv(const StudySummary& s, const std::string& path,
                          const std::string& run_id) {
  auto out = open_out(path);
  write_preamble(out, run_id);
  out << "replicate,effect,decomposition,t,estimate,se_asymptotic,boot_se,boot_lo,boot_hi\n";
  for (const ReplicateRow& r : s.replicates) {
    out << r.replicate << ',' << r.effect << ',' << r.decomposition << ','
        << format_double(r.t) << ',' << format_double(r.estimate) << ',';
    if (!std::isnan(r.se_asymptotic)) out << format_double(r.se_asymptotic);
    out << ',' << format_double(r.boot_se) << ',' << format_double(r.boot_lo) << ','
        << format_double(r.boot_hi) << "\n";
  }
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  CsvTable t;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!header_seen && !line.empty() && line[0] == '#') {
      t.preamble.push_back(line);
      continue;
    }
    if (!header_seen) {
      t.header = line;
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    t.rows.push_back(std::move(fields));
  }
  return t;
}

void write_csv_table(const CsvTable& t, const std::string& path) {
  auto out = open_out(path);
  for (const auto& p : t.preamble) out << p << "\n";
  out << t.header << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << "\n";
  }
}

}  // namespace semimed
