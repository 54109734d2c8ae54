#pragma once

#include <string>
#include <vector>

namespace semimed {

// One individual's observed semi-competing-risks outcome. time_nonterminal is
// min(nonterminal event, terminal event, censoring); time_terminal is
// min(terminal event, censoring). When no non-terminal event is observed the
// two times coincide and status_nonterminal is 0.
struct SubjectRecord {
  std::string id;
  int arm = 0;                    // 0 control, 1 treated
  double time_nonterminal = 0.0;  // x1
  int status_nonterminal = 0;     // delta1
  double time_terminal = 0.0;     // x2
  int status_terminal = 0;        // delta2
};

// Checks a single record against the structural invariants. Returns an empty
// string when valid, otherwise a description of the violated invariant.
std::string record_violation(const SubjectRecord& r);

// Validates every record and that both arms are nonempty. Throws
// ValidationError listing offending rows (1-based positions in `rows`).
std::vector<SubjectRecord> validate_records(std::vector<SubjectRecord> rows);

// Reads the input CSV (header required, columns exactly: id, z,
// time_nonterminal, status_nonterminal, time_terminal, status_terminal) and
// validates it. Throws ValidationError with row-level diagnostics.
std::vector<SubjectRecord> read_records_csv(const std::string& path);

}  // namespace semimed
