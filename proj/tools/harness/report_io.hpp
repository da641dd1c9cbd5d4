#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lojvar/types.hpp"

namespace lojvar::harness {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kVersionString = "lojvar " LOJVAR_VERSION;

/// Round-trippable decimal form (%.17g).
std::string format_double(double x);

/// {"version": ..., "rng": ...}; every report starts from this.
ojson report_header();

void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const ojson& doc);

/// Node-major coordinate table, one row per node, comma separated. Lines
/// starting with '#' and blank lines are skipped.
NodeField read_node_csv(const std::filesystem::path& path);
void write_node_csv(const std::filesystem::path& path, const NodeField& values);

/// Machine-readable error document for stderr.
std::string error_record(const std::exception& e, const std::string& context);

}  // namespace lojvar::harness
