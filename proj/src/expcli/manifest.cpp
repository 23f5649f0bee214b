#include "frl/expcli/manifest.hpp"

#include <fstream>
#include <sstream>

#ifndef FRL_VERSION
#define FRL_VERSION "0.0.0"
#endif

namespace frl::expcli {

const char* code_version() { return FRL_VERSION; }

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

Json RunManifest::to_json() const {
  Json runs = Json::array();
  for (const auto& e : experiments) {
    runs.push_back({{"name", e.name},
                    {"inputs", e.inputs},
                    {"outputs", e.outputs},
                    {"seconds", e.seconds},
                    {"exit_code", e.exit_code}});
  }
  return {{"format", "run-manifest"},
          {"format_version", kFormatVersion},
          {"config_hash", config_hash},
          {"code_version", code_version},
          {"experiments", runs}};
}

}  // namespace frl::expcli
