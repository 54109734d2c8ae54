#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "semimed/errors.hpp"
#include "semimed/panel.hpp"
#include "semimed/records.hpp"
#include "semimed/rng.hpp"
#include "support/brute_force.hpp"

using namespace semimed;

namespace {

SubjectRecord rec(int arm, double x1, int d1, double x2, int d2, const std::string& id = "") {
  SubjectRecord r;
  static int serial = 0;
  r.id = id.empty() ? "r" + std::to_string(++serial) : id;
  r.arm = arm;
  r.time_nonterminal = x1;
  r.status_nonterminal = d1;
  r.time_terminal = x2;
  r.status_terminal = d2;
  return r;
}

std::size_t grid_index(const RiskSetPanel& p, double t) {
  auto it = std::lower_bound(p.grid.begin(), p.grid.end(), t);
  REQUIRE(it != p.grid.end());
  REQUIRE(*it == t);
  return static_cast<std::size_t>(it - p.grid.begin());
}

}  // namespace

TEST_CASE("record validation catches each invariant") {
  CHECK(record_violation(rec(1, 2.0, 1, 5.0, 1)).empty());   // relapse at 2, death at 5
  CHECK(!record_violation(rec(0, 3.0, 0, 2.5, 0)).empty());  // x1 > x2
  CHECK(record_violation(rec(1, 4.0, 1, 4.0, 1)).empty());   // tie, handled downstream
  CHECK(!record_violation(rec(1, 1.0, 0, 2.0, 1)).empty());  // d1=0 needs x1 == x2
  CHECK(!record_violation(rec(1, -1.0, 0, -1.0, 0)).empty());
  CHECK(!record_violation(rec(2, 1.0, 0, 1.0, 0)).empty());
  CHECK(!record_violation(rec(1, 0.0, 0, 0.0, 0)).empty());  // zero-length follow-up
  SubjectRecord bad = rec(1, 1.0, 0, 1.0, 0);
  bad.status_terminal = 2;
  CHECK(!record_violation(bad).empty());
}

TEST_CASE("validate_records reports rows and requires both arms") {
  std::vector<SubjectRecord> rows = {rec(1, 1.0, 0, 1.0, 1), rec(1, 3.0, 0, 2.5, 0)};
  try {
    validate_records(rows);
    FAIL("expected throw");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(validate_records({rec(1, 1.0, 0, 1.0, 1)}), ValidationError);
}

TEST_CASE("csv reader enforces the exact header and reports line numbers") {
  const std::string path = "test_event_data_tmp.csv";
  {
    std::ofstream f(path);
    f << "id,z,time_nonterminal,status_nonterminal,time_terminal,status_terminal\n";
    f << "a,1,2.0,1,5.0,1\n";
    f << "b,0,1.0,0,1.0,0\n";
  }
  auto rows = read_records_csv(path);
  CHECK(rows.size() == 2);
  CHECK(rows[0].arm == 1);
  CHECK(rows[0].time_terminal == 5.0);

  {
    std::ofstream f(path);
    f << "id,z,t1,d1,t2,d2\n";
  }
  CHECK_THROWS_AS(read_records_csv(path), ValidationError);

  {
    std::ofstream f(path);
    f << "id,z,time_nonterminal,status_nonterminal,time_terminal,status_terminal\n";
    f << "a,1,2.0,1,5.0,1\n";
    f << "b,0,3.0,0,2.5,0\n";
  }
  try {
    read_records_csv(path);
    FAIL("expected throw");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("panel: death and censoring without prior events") {
  std::vector<SubjectRecord> rows = {rec(0, 1.0, 0, 1.0, 1), rec(0, 3.0, 0, 3.0, 0),
                                     rec(1, 1.0, 0, 1.0, 1)};
  RiskSetPanel p = build_panel(rows, 0);
  CHECK(p.m_arm == 2);
  const std::size_t k1 = grid_index(p, 1.0);
  CHECK(p.y0[k1] == 2);
  CHECK(p.dn0[k1] == 1);
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    CHECK(p.dn_star[k] == 0);
    CHECK(p.dn1[k] == 0);
  }
}

TEST_CASE("panel: tie is non-terminal first, then a state-1 death") {
  std::vector<SubjectRecord> rows = {rec(0, 4.0, 1, 4.0, 1), rec(1, 1.0, 0, 1.0, 1)};
  RiskSetPanel p = build_panel(rows, 0);
  const std::size_t k = grid_index(p, 4.0);
  CHECK(p.dn_star[k] == 1);
  CHECK(p.dn1[k] == 1);
  CHECK(p.dn0[k] == 0);
  CHECK(p.y1[k] == 1);
  CHECK(p.y0[k] == 1);
}

TEST_CASE("panel: no events leaves counting processes empty") {
  std::vector<SubjectRecord> rows = {rec(0, 2.0, 0, 2.0, 0), rec(0, 3.0, 0, 3.0, 0),
                                     rec(1, 1.0, 0, 1.0, 0)};
  RiskSetPanel p = build_panel(rows, 0);
  CHECK(p.y0[0] == 2);  // everyone at risk just before the first observed time
  CHECK(!panel_has_terminal_events(p));
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    CHECK(p.dn_star[k] + p.dn0[k] + p.dn1[k] == 0);
  }
}

TEST_CASE("panel invariants hold against the per-subject oracle on random data") {
  Rng rng(substream_seed(7, 42));
  for (int it = 0; it < 300; ++it) {
    auto rows = brute::random_dataset(rng);
    for (int arm = 0; arm < 2; ++arm) {
      RiskSetPanel p = build_panel(rows, arm);
      CHECK(p.grid == brute::grid_of(rows, arm));
      std::int64_t sum_star = 0, sum_term = 0;
      for (std::size_t k = 0; k < p.grid.size(); ++k) {
        const auto c = brute::counts_at(rows, arm, p.grid[k]);
        CHECK(p.y0[k] == c.y0);
        CHECK(p.y1[k] == c.y1);
        CHECK(p.dn_star[k] == c.dn_star);
        CHECK(p.dn0[k] == c.dn0);
        CHECK(p.dn1[k] == c.dn1);
        CHECK(p.dn_star[k] + p.dn0[k] <= p.y0[k]);
        CHECK(p.dn1[k] <= p.y1[k]);
        if (k > 0) CHECK(p.y0[k] <= p.y0[k - 1]);  // state-0 risk set shrinks
        sum_star += p.dn_star[k];
        sum_term += p.dn0[k] + p.dn1[k];
      }
      std::int64_t n_d1 = 0, n_d2 = 0;
      for (const auto& r : rows) {
        if (r.arm != arm) continue;
        n_d1 += r.status_nonterminal;
        n_d2 += r.status_terminal;
      }
      CHECK(sum_star == n_d1);
      CHECK(sum_term == n_d2);
    }
  }
}

TEST_CASE("panel is permutation invariant") {
  Rng rng(substream_seed(7, 43));
  auto rows = brute::random_dataset(rng, 6);
  RiskSetPanel a = build_panel(rows, 0);
  std::mt19937 g(99);
  std::shuffle(rows.begin(), rows.end(), g);
  RiskSetPanel b = build_panel(rows, 0);
  CHECK(a.grid == b.grid);
  CHECK(a.y0 == b.y0);
  CHECK(a.y1 == b.y1);
  CHECK(a.dn_star == b.dn_star);
  CHECK(a.dn0 == b.dn0);
  CHECK(a.dn1 == b.dn1);
}
