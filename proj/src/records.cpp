#include "semimed/records.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "semimed/errors.hpp"

namespace semimed {

std::string record_violation(const SubjectRecord& r) {
  if (r.arm != 0 && r.arm != 1) return "z must be 0 or 1";
  if (r.status_nonterminal != 0 && r.status_nonterminal != 1)
    return "status_nonterminal must be 0 or 1";
  if (r.status_terminal != 0 && r.status_terminal != 1) return "status_terminal must be 0 or 1";
  if (!std::isfinite(r.time_nonterminal) || !std::isfinite(r.time_terminal))
    return "times must be finite";
  if (r.time_nonterminal < 0.0 || r.time_terminal < 0.0) return "times must be nonnegative";
  if (r.time_terminal == 0.0) return "time_terminal = 0: zero-length follow-up";
  if (r.time_nonterminal > r.time_terminal)
    return "time_nonterminal exceeds time_terminal";
  if (r.status_nonterminal == 0 && r.time_nonterminal != r.time_terminal)
    return "status_nonterminal = 0 requires time_nonterminal = time_terminal";
  return {};
}

std::vector<SubjectRecord> validate_records(std::vector<SubjectRecord> rows) {
  std::ostringstream problems;
  int n_bad = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string why = record_violation(rows[i]);
    if (!why.empty()) {
      ++n_bad;
      if (n_bad <= 20) problems << "row " << (i + 1) << ": " << why << "\n";
    }
  }
  if (n_bad > 20) problems << "... and " << (n_bad - 20) << " more\n";
  if (n_bad > 0) throw ValidationError(problems.str());
  if (rows.empty()) throw ValidationError("no records");
  int count[2] = {0, 0};
  for (const auto& r : rows) ++count[r.arm];
  if (count[0] == 0 || count[1] == 0) {
    throw ValidationError(std::string("arm ") + (count[0] == 0 ? "0" : "1") + " is empty");
  }
  return rows;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

bool parse_flag(const std::string& s, int* out) {
  if (s == "0") {
    *out = 0;
    return true;
  }
  if (s == "1") {
    *out = 1;
    return true;
  }
  return false;
}

}  // namespace

std::vector<SubjectRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty input file: " + path);
  const std::string expected =
      "id,z,time_nonterminal,status_nonterminal,time_terminal,status_terminal";
  {
    std::string header = line;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != expected) {
      throw ValidationError("bad header; expected exactly: " + expected);
    }
  }
  std::vector<SubjectRecord> rows;
  std::ostringstream problems;
  int n_bad = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    SubjectRecord r;
    std::string why;
    if (fields.size() != 6) {
      why = "expected 6 fields, got " + std::to_string(fields.size());
    } else {
      r.id = fields[0];
      if (!parse_flag(fields[1], &r.arm)) why = "z must be 0 or 1";
      else if (!parse_double(fields[2], &r.time_nonterminal)) why = "bad time_nonterminal";
      else if (!parse_flag(fields[3], &r.status_nonterminal)) why = "status_nonterminal must be 0 or 1";
      else if (!parse_double(fields[4], &r.time_terminal)) why = "bad time_terminal";
      else if (!parse_flag(fields[5], &r.status_terminal)) why = "status_terminal must be 0 or 1";
      else why = record_violation(r);
    }
    if (!why.empty()) {
      ++n_bad;
      if (n_bad <= 20) problems << "line " << lineno << ": " << why << "\n";
      continue;
    }
    rows.push_back(std::move(r));
  }
  if (n_bad > 20) problems << "... and " << (n_bad - 20) << " more\n";
  if (n_bad > 0) throw ValidationError(problems.str());
  return validate_records(std::move(rows));
}

}  // namespace semimed
