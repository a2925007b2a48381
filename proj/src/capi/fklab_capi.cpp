#include "fklab.h"

#include <string>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"
#include "core/experiments.hpp"

namespace {

thread_local std::string g_last_error;

}  // namespace

struct fklab_run {
  fklab::RunConfig config;
  std::string summary;
  std::string error;
  bool executed = false;
};

extern "C" {

const char *fklab_version(void) { return "0.1.0"; }

const char *fklab_last_error(void) { return g_last_error.c_str(); }

fklab_status fklab_run_create(const char *command, const char *config_json,
                              fklab_run **out_run) {
  if (out_run == nullptr) {
    g_last_error = "out_run must not be NULL";
    return FKLAB_CONFIG_ERROR;
  }
  *out_run = nullptr;
  if (command == nullptr || *command == '\0') {
    g_last_error = "command must not be empty";
    return FKLAB_CONFIG_ERROR;
  }
  try {
    nlohmann::json merged = nlohmann::json::object();
    if (config_json != nullptr && *config_json != '\0') {
      merged = nlohmann::json::parse(config_json);
    }
    fklab::RunConfig config = fklab::RunConfig::from_json(command, merged);
    auto run = new fklab_run();
    run->config = std::move(config);
    *out_run = run;
    g_last_error.clear();
    return FKLAB_OK;
  } catch (const nlohmann::json::exception &e) {
    g_last_error = std::string("config is not valid JSON: ") + e.what();
    return FKLAB_CONFIG_ERROR;
  } catch (const fklab::ConfigError &e) {
    g_last_error = e.what();
    return FKLAB_CONFIG_ERROR;
  } catch (const std::exception &e) {
    g_last_error = e.what();
    return FKLAB_CONFIG_ERROR;
  }
}

fklab_status fklab_run_execute(fklab_run *run) {
  if (run == nullptr) {
    g_last_error = "run must not be NULL";
    return FKLAB_CONFIG_ERROR;
  }
  try {
    const fklab::RunResult result = fklab::run_command(run->config);
    run->summary = result.summary.dump(2);
    run->executed = true;
    run->error.clear();
    switch (result.exit_code) {
      case 0:
        return FKLAB_OK;
      case 1:
        run->error = "verification suite reported failing checks";
        return FKLAB_VERIFY_FAILED;
      default:
        run->error = "run finished with a numeric failure";
        return FKLAB_NUMERIC_ERROR;
    }
  } catch (const fklab::ConfigError &e) {
    run->error = e.what();
    return FKLAB_CONFIG_ERROR;
  } catch (const fklab::NumericError &e) {
    run->error = e.what();
    return FKLAB_NUMERIC_ERROR;
  } catch (const std::exception &e) {
    run->error = e.what();
    return FKLAB_NUMERIC_ERROR;
  }
}

const char *fklab_run_summary_json(const fklab_run *run) {
  if (run == nullptr || !run->executed) return nullptr;
  return run->summary.c_str();
}

const char *fklab_run_error(const fklab_run *run) {
  if (run == nullptr) return "";
  return run->error.c_str();
}

void fklab_run_destroy(fklab_run *run) { delete run; }

}  // extern "C"
