#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "darwin_mbl/darwin_mbl.h"

extern "C" int dmbl_c_smoke(void);

namespace fs = std::filesystem;

TEST_CASE("header compiles and works from C") { CHECK(dmbl_c_smoke() == 1); }

TEST_CASE("version and status names") {
  CHECK(std::string(dmbl_version()).size() > 0);
  CHECK(std::string(dmbl_status_name(DMBL_OK)) == "ok");
  CHECK(std::string(dmbl_status_name(DMBL_ERR_VALIDATION)) == "validation-error");
  CHECK(std::string(dmbl_status_name(DMBL_ERR_DEGENERATE_SYSTEM_ENTROPY)) == "degenerate-system-entropy");
}

TEST_CASE("config errors come back as status codes") {
  dmbl_config* cfg = nullptr;
  CHECK(dmbl_config_parse("protocol = lr-sweep\nL = 6\nh = -1\nseed = 1\n", &cfg) == DMBL_ERR_VALIDATION);
  CHECK(cfg == nullptr);
  CHECK(std::string(dmbl_last_error()).find("h:") != std::string::npos);
  CHECK(dmbl_config_parse("L = 6,\n", &cfg) == DMBL_ERR_PARSE);
  CHECK(std::string(dmbl_last_error()).find("line 1") != std::string::npos);
  CHECK(dmbl_config_parse(nullptr, &cfg) == DMBL_ERR_INVALID_ARGUMENT);
  CHECK(dmbl_config_load("/nonexistent/file.cfg", &cfg) == DMBL_ERR_IO);
}

TEST_CASE("run through the C API") {
  const auto dir = fs::temp_directory_path() / "dmbl_capi_run";
  fs::remove_all(dir);
  dmbl_config* cfg = nullptr;
  REQUIRE(dmbl_config_parse("protocol = ee-sweep\nL = 6\nh = 1, 3\nrealizations = 3\nseed = 1\n", &cfg) == DMBL_OK);
  REQUIRE(dmbl_config_set_output_dir(cfg, dir.string().c_str()) == DMBL_OK);
  CHECK(dmbl_config_set_seed(cfg, 17) == DMBL_OK);
  dmbl_run_options opts{2, 0};
  dmbl_run_report report{};
  CHECK(dmbl_run(cfg, &opts, &report) == DMBL_OK);
  CHECK(fs::exists(report.results_path));
  CHECK(fs::exists(report.manifest_path));
  CHECK(report.hard_failures == 0);
  CHECK(dmbl_run(cfg, &opts, &report) == DMBL_ERR_IO);
  opts.overwrite = 1;
  CHECK(dmbl_run(cfg, &opts, nullptr) == DMBL_OK);
  dmbl_config_free(cfg);
}

TEST_CASE("single realization handle") {
  dmbl_realization_params p;
  dmbl_realization_params_default(&p);
  CHECK(p.epsilon == 0.5);
  CHECK(p.lambda == 0.0);
  p.sites = 8;
  p.disorder = 4.0;
  dmbl_realization* r = nullptr;
  REQUIRE(dmbl_realization_run(&p, 99, &r) == DMBL_OK);
  CHECK(dmbl_realization_sites(r) == 8);
  double lr = -1.0;
  CHECK(dmbl_realization_lack_of_redundancy(r, &lr) == DMBL_OK);
  CHECK(lr >= 0.0);
  std::vector<double> mi(8);
  CHECK(dmbl_realization_mutual_information(r, mi.data(), mi.size()) == DMBL_OK);
  CHECK(mi.back() == doctest::Approx(2.0 * dmbl_realization_system_entropy(r)).epsilon(1e-6));
  CHECK(dmbl_realization_mutual_information(r, mi.data(), 3) == DMBL_ERR_INVALID_ARGUMENT);
  double re = 0.0, im = 0.0;
  dmbl_realization_decoherence(r, &re, &im);
  CHECK(dmbl_realization_purity(r) == doctest::Approx((1.0 + re * re + im * im) / 2.0));
  dmbl_realization_free(r);

  p.t = 1.5707963267948966;
  REQUIRE(dmbl_realization_run(&p, 99, &r) == DMBL_OK);
  CHECK(dmbl_realization_lack_of_redundancy(r, &lr) == DMBL_ERR_DEGENERATE_SYSTEM_ENTROPY);
  CHECK(dmbl_realization_entanglement_entropy(r) > 0.0);
  dmbl_realization_free(r);

  p.sites = 2;
  CHECK(dmbl_realization_run(&p, 1, &r) == DMBL_ERR_INVALID_ARGUMENT);
}
