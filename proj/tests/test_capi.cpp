#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "semimed.h"

namespace {

struct TempDir {
  std::string path;
  explicit TempDir(const std::string& name) : path("capi_tmp_" + name) {
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("version and error strings") {
  CHECK(std::string(smd_version()) == "0.1.0");
  CHECK(smd_last_error() != nullptr);
}

TEST_CASE("dataset from rows validates and counts") {
  const char* ids[] = {"a", "b", "c", "d"};
  const int z[] = {0, 0, 1, 1};
  const double t1[] = {1.0, 2.0, 1.5, 3.0};
  const int d1[] = {0, 1, 0, 0};
  const double t2[] = {1.0, 5.0, 1.5, 3.0};
  const int d2[] = {1, 1, 1, 0};
  smd_dataset* d = nullptr;
  REQUIRE(smd_dataset_from_rows(4, ids, z, t1, d1, t2, d2, &d) == SMD_OK);
  CHECK(smd_dataset_count(d, 0) == 2);
  CHECK(smd_dataset_count(d, 1) == 2);
  CHECK(smd_dataset_count(d, -1) == 4);
  smd_dataset_free(d);

  const double bad_t2[] = {0.5, 5.0, 1.5, 3.0};  // x1 > x2 in row 1
  smd_dataset* d2h = nullptr;
  CHECK(smd_dataset_from_rows(4, ids, z, t1, d1, bad_t2, d2, &d2h) == SMD_ERR_VALIDATION);
  CHECK(std::strlen(smd_last_error()) > 0);
}

TEST_CASE("estimate handle: rows, warnings, writing") {
  smd_sim_opts so;
  smd_sim_opts_init(&so, 1);
  so.m = 200;
  so.seed = 2222;
  smd_dataset* d = nullptr;
  REQUIRE(smd_generate_dataset(&so, 0, &d) == SMD_OK);

  smd_estimate_opts opts;
  smd_estimate_opts_init(&opts);
  CHECK(opts.n_boot == 200);
  CHECK(opts.alpha == 0.05);
  opts.ci = SMD_CI_BOTH;
  opts.n_boot = 25;
  opts.threads = 2;
  smd_estimate* e = nullptr;
  REQUIRE(smd_run_estimate(d, &opts, &e) == SMD_OK);
  CHECK(smd_estimate_horizon(e) > 0.0);
  REQUIRE(smd_estimate_row_count(e) > 0);
  smd_curve_row row;
  REQUIRE(smd_estimate_row(e, 0, &row) == SMD_OK);
  CHECK(row.time >= 0.0);
  CHECK(row.decomposition != nullptr);
  CHECK(smd_estimate_row(e, smd_estimate_row_count(e), &row) == SMD_ERR_INVALID_ARG);

  TempDir dir("est");
  REQUIRE(smd_estimate_write(e, dir.path.c_str(), "synthetic") == SMD_OK);
  CHECK(std::filesystem::exists(dir.path + "/curves.csv"));
  CHECK(std::filesystem::exists(dir.path + "/manifest.json"));
  const std::string csv = slurp(dir.path + "/curves.csv");
  CHECK(csv.find("time,z1,z2_or_effect,decomposition,estimate,se,ci_lo,ci_hi,variance_method") !=
        std::string::npos);
  smd_estimate_free(e);
  smd_dataset_free(d);
}

TEST_CASE("asymptotic-only intervals for the prevalence decomposition are refused") {
  smd_sim_opts so;
  smd_sim_opts_init(&so, 2);
  so.m = 120;
  smd_dataset* d = nullptr;
  REQUIRE(smd_generate_dataset(&so, 1, &d) == SMD_OK);
  smd_estimate_opts opts;
  smd_estimate_opts_init(&opts);
  opts.decomposition = SMD_DECOMP_PREV;
  opts.ci = SMD_CI_ASYMPTOTIC;
  smd_estimate* e = nullptr;
  CHECK(smd_run_estimate(d, &opts, &e) == SMD_ERR_PARTIAL_VARIANCE);
  CHECK(std::string(smd_last_error()).find("bootstrap") != std::string::npos);
  smd_dataset_free(d);
}

TEST_CASE("study handle: rows and deterministic rewrites") {
  smd_sim_opts so;
  smd_sim_opts_init(&so, 2);
  so.m = 120;
  so.n_reps = 3;
  so.n_boot = 8;
  so.threads = 2;
  smd_study* s = nullptr;
  REQUIRE(smd_run_study(&so, &s) == SMD_OK);
  REQUIRE(smd_study_row_count(s) > 0);
  smd_study_row row;
  REQUIRE(smd_study_get_row(s, 0, &row) == SMD_OK);
  CHECK(row.setting == 2);
  CHECK(row.effect != nullptr);

  TempDir d1("study1"), d2("study2");
  REQUIRE(smd_study_write(s, d1.path.c_str()) == SMD_OK);
  smd_study* s2 = nullptr;
  so.threads = 1;
  REQUIRE(smd_run_study(&so, &s2) == SMD_OK);
  REQUIRE(smd_study_write(s2, d2.path.c_str()) == SMD_OK);
  CHECK(slurp(d1.path + "/study_summary.csv") == slurp(d2.path + "/study_summary.csv"));
  CHECK(slurp(d1.path + "/oracle_curves.csv") == slurp(d2.path + "/oracle_curves.csv"));
  CHECK(slurp(d1.path + "/study_replicates.csv") == slurp(d2.path + "/study_replicates.csv"));
  smd_study_free(s);
  smd_study_free(s2);
}

TEST_CASE("dataset csv round trip through the C API") {
  smd_sim_opts so;
  smd_sim_opts_init(&so, 3);
  so.m = 50;
  smd_dataset* d = nullptr;
  REQUIRE(smd_generate_dataset(&so, 2, &d) == SMD_OK);
  TempDir dir("ds");
  const std::string p = dir.path + "/data.csv";
  REQUIRE(smd_dataset_write_csv(d, p.c_str()) == SMD_OK);
  smd_dataset* back = nullptr;
  REQUIRE(smd_dataset_read_csv(p.c_str(), &back) == SMD_OK);
  CHECK(smd_dataset_count(back, -1) == smd_dataset_count(d, -1));
  CHECK(smd_dataset_count(back, 1) == smd_dataset_count(d, 1));
  smd_dataset_free(back);
  smd_dataset_free(d);
}

TEST_CASE("invalid options are rejected with the right codes") {
  smd_sim_opts so;
  smd_sim_opts_init(&so, 1);
  so.p_treat = 2.0;
  smd_study* s = nullptr;
  CHECK(smd_run_study(&so, &s) == SMD_ERR_INVALID_ARG);
  CHECK(smd_dataset_read_csv("does_not_exist.csv", nullptr) == SMD_ERR_INVALID_ARG);
  smd_dataset* d = nullptr;
  CHECK(smd_dataset_read_csv("does_not_exist.csv", &d) == SMD_ERR_VALIDATION);
}
