#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "narrex/bundle.hpp"

namespace narrex {

/// Parses a bundle document (JSON, see schema/bundle.schema.json).
/// Structural problems throw BundleError; explainability gaps (unsourced
/// rules, untyped entities, ...) are left to validate_explainability.
ExplanandumBundle parse_bundle(std::string_view document);
ExplanandumBundle bundle_from_json(const nlohmann::json& document);

ExplanandumBundle load_bundle(const std::filesystem::path& path);

nlohmann::json bundle_to_json(const ExplanandumBundle& bundle);
std::string serialize_bundle(const ExplanandumBundle& bundle);

}  // namespace narrex
