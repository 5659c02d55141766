// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line experiment runner on top of the C interface.
//
//   eldan <localize|tube|baseline|mixture|centerlaw|tilt|selftest>
//         [--config PATH] [--seed U64] [--out DIR] [--threads N|auto]
//         [--h F] [--T F] [--paths N] [--samples N]
//
// Exit codes: 0 success, 1 usage or config error, 2 numerical failure,
// 3 invariant or inequality verdict violated. Errors are reported on stderr
// as one JSON object.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "eldan/eldan.h"

namespace {

using Json = nlohmann::json;

int exit_code_of(eldan_status s) {
  switch (s) {
    case ELDAN_OK: return 0;
    case ELDAN_ERR_INVALID: return 1;
    case ELDAN_ERR_VERDICT: return 3;
    case ELDAN_ERR_NUMERICAL:
    case ELDAN_ERR_INTERNAL:
    default: return 2;
  }
}

int report(int code, const Json& error) {
  Json j = {{"error", error}, {"exit_code", code}};
  std::cerr << j.dump() << "\n";
  return code;
}

int report_status(eldan_status s) {
  Json err = Json::parse(eldan_last_error(), nullptr, false);
  if (err.is_discarded() || !err.is_object())
    err = {{"kind", "internal"}, {"message", eldan_last_error()}, {"path", ""}};
  return report(exit_code_of(s), err);
}

int usage_error(const std::string& message) {
  return report(1, {{"kind", "usage"}, {"message", message}, {"path", ""}});
}

struct Config {
  eldan_config* ptr = nullptr;
  ~Config() { eldan_config_free(ptr); }
};

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { eldan_string_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fiber-confined stochastic localization experiments"};
  app.require_subcommand(1, 1);
  app.set_help_flag("--help", "Print this help message and exit");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string threads = "auto";
  std::optional<double> h, horizon;
  std::optional<std::int64_t> paths, samples;

  const char* commands[][2] = {
      {"localize", "Simulate paths and write per-path diagnostics"},
      {"tube", "Monte Carlo tube measures against the affine baseline"},
      {"baseline", "Closed-form affine tube measures"},
      {"mixture", "Mixture identity over localization paths"},
      {"centerlaw", "Terminal centers and their moments"},
      {"tilt", "Random instances of the tilted disc inequality"},
      {"selftest", "Quick invariant suite"},
  };
  for (auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    // "-h" would collide with the step-size option.
    sub->set_help_flag("--help", "Print this help message and exit");
    bool needs_config = std::string(name) != "tilt" && std::string(name) != "selftest";
    auto* opt = sub->add_option("--config", config_path, "Experiment config (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--seed", seed, "Master seed (u64)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads or 'auto'");
    sub->add_option("--h", h, "Step size");
    sub->add_option("--T", horizon, "Horizon");
    sub->add_option("--paths", paths, "Number of paths");
    sub->add_option("--samples", samples, "Monte Carlo samples");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }
  const std::string command = app.get_subcommands().front()->get_name();

  int n_threads = 0;
  if (threads != "auto") {
    try {
      std::size_t used = 0;
      n_threads = std::stoi(threads, &used);
      if (used != threads.size() || n_threads < 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      return usage_error("--threads expects a positive integer or 'auto'");
    }
  }

  std::string text = "{}";
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) return usage_error("cannot read config file '" + config_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }

  Config cfg;
  if (eldan_status s = eldan_config_parse(text.c_str(), &cfg.ptr)) return report_status(s);
  eldan_status s = ELDAN_OK;
  if (seed) s = eldan_config_set_seed(cfg.ptr, *seed);
  if (!s && h) s = eldan_config_set_real(cfg.ptr, "h", *h);
  if (!s && horizon) s = eldan_config_set_real(cfg.ptr, "T", *horizon);
  if (!s && paths) s = eldan_config_set_int(cfg.ptr, "paths", *paths);
  if (!s && samples) s = eldan_config_set_int(cfg.ptr, "samples", *samples);
  if (s) return report_status(s);

  OwnedString result;
  s = eldan_run(cfg.ptr, command.c_str(), n_threads, &result.ptr);
  if (s != ELDAN_OK && s != ELDAN_ERR_VERDICT) return report_status(s);

  Json out = Json::parse(result.ptr);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) return usage_error("cannot create output directory '" + out_dir + "'");
  for (const auto& f : out["files"]) {
    auto path = std::filesystem::path(out_dir) / f["name"].get<std::string>();
    std::ofstream file(path, std::ios::binary);
    file << f["content"].get<std::string>();
    if (!file) return usage_error("cannot write '" + path.string() + "'");
  }
  std::cout << out["summary"].dump(2) << "\n";
  if (s == ELDAN_ERR_VERDICT) return report_status(s);
  return 0;
}
