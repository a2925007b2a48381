// Exercises the extern-C surface the CLI is built on.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "fklab.h"

namespace fs = std::filesystem;

namespace {
std::string temp_out(const char* tag) {
  const fs::path p = fs::temp_directory_path() / (std::string("fklab_capi_") + tag);
  fs::create_directories(p);
  return p.string();
}
}  // namespace

TEST_CASE("version string is present") {
  REQUIRE(fklab_version() != nullptr);
  CHECK(std::strlen(fklab_version()) >= 5);
}

TEST_CASE("create rejects malformed input") {
  fklab_run* run = reinterpret_cast<fklab_run*>(0x1);

  CHECK(fklab_run_create(nullptr, "{}", &run) == FKLAB_CONFIG_ERROR);
  CHECK(run == nullptr);
  CHECK(std::strlen(fklab_last_error()) > 0);

  CHECK(fklab_run_create("spectrum", "{not json", &run) == FKLAB_CONFIG_ERROR);
  CHECK(run == nullptr);

  CHECK(fklab_run_create("unknown_cmd", "{}", &run) == FKLAB_CONFIG_ERROR);
  CHECK(fklab_run_create("spectrum", "{\"bogus\": 1}", &run) == FKLAB_CONFIG_ERROR);
  CHECK(fklab_run_create("spectrum", "{\"n\": 7}", &run) == FKLAB_CONFIG_ERROR);
  CHECK(fklab_run_create("spectrum", "{}", nullptr) == FKLAB_CONFIG_ERROR);
}

TEST_CASE("spectrum run end to end") {
  const std::string cfg = std::string("{\"n\": 128, \"theta\": 1.0, \"out\": \"") +
                          temp_out("spectrum") + "\"}";
  fklab_run* run = nullptr;
  REQUIRE(fklab_run_create("spectrum", cfg.c_str(), &run) == FKLAB_OK);
  REQUIRE(run != nullptr);
  CHECK(fklab_run_summary_json(run) == nullptr);  // not executed yet
  CHECK(fklab_run_execute(run) == FKLAB_OK);
  const char* summary = fklab_run_summary_json(run);
  REQUIRE(summary != nullptr);
  CHECK(std::string(summary).find("\"run_id\"") != std::string::npos);
  CHECK(std::string(summary).find("\"per_theta\"") != std::string::npos);
  CHECK(std::strlen(fklab_run_error(run)) == 0);
  fklab_run_destroy(run);
}

TEST_CASE("verify run reports failure status without throwing across the boundary") {
  const std::string cfg = std::string("{\"n\": 128, \"only\": \"grid_core\", \"out\": \"") +
                          temp_out("verify") + "\"}";
  fklab_run* run = nullptr;
  REQUIRE(fklab_run_create("verify", cfg.c_str(), &run) == FKLAB_OK);
  CHECK(fklab_run_execute(run) == FKLAB_OK);
  fklab_run_destroy(run);
}

TEST_CASE("null run handles are tolerated") {
  CHECK(fklab_run_execute(nullptr) == FKLAB_CONFIG_ERROR);
  CHECK(fklab_run_summary_json(nullptr) == nullptr);
  CHECK(std::strlen(fklab_run_error(nullptr)) == 0);
  fklab_run_destroy(nullptr);
}
