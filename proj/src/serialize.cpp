#include "frl/serialize.hpp"

#include <openssl/evp.h>

#include <cstdio>

namespace frl {

namespace {

void require_format(const Json& doc, const char* kind) {
  require(doc.is_object(), std::string(kind) + " document must be a JSON object");
  require(doc.value("format", "") == kind, std::string("expected a ") + kind + " document");
  require(doc.value("format_version", 0) == kFormatVersion,
          std::string("unsupported ") + kind + " format_version");
}

template <class T>
T field(const Json& doc, const char* name) {
  require(doc.contains(name), std::string("missing field: ") + name);
  try {
    return doc.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad field ") + name + ": " + e.what());
  }
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::string out;
  char hex[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(hex, sizeof hex, "%02x", digest[i]);
    out += hex;
  }
  return out;
}

Json alphabet_to_json(const Alphabet& alphabet) {
  return {{"format", "alphabet"},
          {"format_version", kFormatVersion},
          {"dim", alphabet.dim()},
          {"modulus", alphabet.modulus()},
          {"size", alphabet.size()},
          {"elements", alphabet.elements()}};
}

Alphabet alphabet_from_json(const Json& doc) {
  require_format(doc, "alphabet");
  Alphabet out(field<int>(doc, "dim"), field<std::int64_t>(doc, "modulus"),
               field<std::vector<Point>>(doc, "elements"));
  require(field<std::size_t>(doc, "size") == out.size(), "alphabet size field disagrees");
  return out;
}

Json certificate_to_json(const LambdaPCertificate& c) {
  return {{"format", "certificate"},
          {"format_version", kFormatVersion},
          {"exponent", c.exponent},
          {"constant_lower", c.constant_lower},
          {"constant_cap", c.constant_cap},
          {"method", to_string(c.method)},
          {"grid_spacing", c.grid_spacing},
          {"iterations", c.iterations}};
}

LambdaPCertificate certificate_from_json(const Json& doc) {
  require_format(doc, "certificate");
  LambdaPCertificate c;
  c.exponent = field<double>(doc, "exponent");
  c.constant_lower = field<double>(doc, "constant_lower");
  c.constant_cap = field<double>(doc, "constant_cap");
  c.method = certificate_method_from_string(field<std::string>(doc, "method"));
  c.grid_spacing = field<double>(doc, "grid_spacing");
  c.iterations = field<int>(doc, "iterations");
  require(c.exponent > 2.0, "certificate exponent must exceed 2");
  require(c.constant_lower >= 1.0, "certificate constant_lower must be >= 1");
  require(c.method != CertificateMethod::kExactEvenP || is_even_integer(c.exponent),
          "exact-even-p certificate needs an even exponent");
  return c;
}

Json plan_to_json(const SequencePlan& plan) {
  return {{"format", "plan"},
          {"format_version", kFormatVersion},
          {"dim", plan.dim},
          {"alpha", plan.alpha},
          {"p", plan.p},
          {"c0", plan.c0},
          {"c0_realized", plan.c0_realized},
          {"c1", plan.c1},
          {"n_seq", plan.n_seq},
          {"t_seq", plan.t_seq}};
}

SequencePlan plan_from_json(const Json& doc) {
  require_format(doc, "plan");
  SequencePlan plan;
  plan.dim = field<int>(doc, "dim");
  plan.alpha = field<double>(doc, "alpha");
  plan.p = field<double>(doc, "p");
  plan.c0 = field<double>(doc, "c0");
  plan.c0_realized = field<double>(doc, "c0_realized");
  plan.c1 = field<double>(doc, "c1");
  plan.n_seq = field<std::vector<std::int64_t>>(doc, "n_seq");
  plan.t_seq = field<std::vector<std::int64_t>>(doc, "t_seq");
  validate_plan(plan);
  return plan;
}

Json stage_to_json(const CantorStage& stage, const std::string& config_hash) {
  Json alphabets = Json::array();
  for (const auto& b : stage.base_sets()) alphabets.push_back(alphabet_to_json(b));
  std::vector<std::int64_t> scales, counts;
  for (int j = 0; j <= stage.depth(); ++j) {
    scales.push_back(stage.scale(j));
    counts.push_back(stage.count(j));
  }
  return {{"format", "stage"},
          {"format_version", kFormatVersion},
          {"config_hash", config_hash},
          {"depth", stage.depth()},
          {"plan", plan_to_json(stage.plan())},
          {"base_sets", alphabets},
          {"translations", stage.all_translations()},
          {"N", scales},
          {"T", counts}};
}

CantorStage stage_from_json(const Json& doc, std::int64_t node_budget) {
  require_format(doc, "stage");
  const int depth = field<int>(doc, "depth");
  std::vector<Alphabet> base_sets;
  for (const auto& b : field<Json>(doc, "base_sets")) base_sets.push_back(alphabet_from_json(b));
  CantorStage stage(plan_from_json(field<Json>(doc, "plan")), std::move(base_sets),
                    field<std::vector<std::vector<std::int64_t>>>(doc, "translations"), depth,
                    node_budget);
  if (doc.contains("N")) {
    const auto scales = field<std::vector<std::int64_t>>(doc, "N");
    require(static_cast<int>(scales.size()) == depth + 1 &&
                scales.back() == stage.scale(depth),
            "stage N field disagrees with the plan");
  }
  return stage;
}

std::string stage_digest(const CantorStage& stage) {
  return sha256_hex(stage_to_json(stage).dump());
}

}  // namespace frl
