#pragma once

// Run manifests: config hash, code version, file digests and timings.

#include <map>
#include <string>
#include <vector>

#include "frl/serialize.hpp"

namespace frl::expcli {

/// Version string compiled into the library.
const char* code_version();

/// SHA-256 of a file's bytes.
std::string file_digest(const std::string& path);

struct ExperimentRecord {
  std::string name;
  std::map<std::string, std::string> inputs;   // path -> digest
  std::map<std::string, std::string> outputs;  // path -> digest
  double seconds = 0.0;
  int exit_code = 0;
};

struct RunManifest {
  std::string config_hash;
  std::string code_version;
  std::vector<ExperimentRecord> experiments;

  Json to_json() const;
};

}  // namespace frl::expcli
