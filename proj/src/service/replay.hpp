#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "service/service.hpp"

namespace trellis {

struct ReplayStep {
  std::size_t index = 0;
  std::string outcome;  // Opened, Accepted, Frozen, ForceApplied, Reverted, AssertOk, AssertFailed, or an error code
  std::size_t op_count = 0;
  std::uint64_t hash = 0;  // of the state after the step
  nlohmann::json request;  // null for assert steps
  nlohmann::json response;
  nlohmann::json state;
  std::vector<std::string> failures;  // assert mismatches
};

struct ReplayResult {
  std::vector<ReplayStep> steps;  // steps[0] is the open
  bool ok = true;                 // every assert held and no step errored

  // One line per step: index, outcome, op count, 16-hex state hash; tab separated.
  std::string trace() const;
};

// Runs a script through `service` (a private one when null).
ReplayResult replay(const nlohmann::json& script, Service* service = nullptr);

// Parses a script file; a "file" entry is read relative to the script.
// Throws Io or MalformedMessage.
nlohmann::json load_replay_script(const std::filesystem::path& path);

std::uint64_t state_hash(const nlohmann::json& state);

}  // namespace trellis
