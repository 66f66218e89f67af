#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "pframe/frames.hpp"
#include "pframe/theorems.hpp"

namespace pframe {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

Json coordinates_json(const Vector& v);
Json bounds_json(const FrameBounds& bounds);
Json verdict_json(const TheoremVerdict& verdict);

struct RunReport {
  std::string digest;  // empty for commands without an instance file
  std::string command;
  std::uint64_t seed = 0;
  Json results = Json::object();
  std::optional<double> seconds;  // only reported when requested

  Json to_json() const;
};

/// Indented "key: value" rendering of a report for terminals.
std::string render_text(const Json& report);

}  // namespace pframe
