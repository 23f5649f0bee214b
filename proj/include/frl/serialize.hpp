#pragma once

// JSON documents for alphabets, certificates, plans and stages.

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "frl/alphabet.hpp"
#include "frl/stage.hpp"

namespace frl {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

Json alphabet_to_json(const Alphabet& alphabet);
Alphabet alphabet_from_json(const Json& doc);

Json certificate_to_json(const LambdaPCertificate& certificate);
LambdaPCertificate certificate_from_json(const Json& doc);

Json plan_to_json(const SequencePlan& plan);
SequencePlan plan_from_json(const Json& doc);

/// Versioned stage document: plan, alphabets, every translation vector, and
/// the hash of the config that produced it (may be empty).
Json stage_to_json(const CantorStage& stage, const std::string& config_hash = "");
CantorStage stage_from_json(const Json& doc, std::int64_t node_budget = 1'000'000);

/// SHA-256 of the stage's canonical JSON (without config hash).
std::string stage_digest(const CantorStage& stage);

}  // namespace frl
