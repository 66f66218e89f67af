#include "pframe/report.hpp"

#include <cmath>
#include <sstream>

namespace pframe {

namespace {

// Non-finite values have no JSON literal; they serialize as strings.
Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

void render(std::ostringstream& os, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      os << pad << key << ":\n";
      render(os, value, depth + 1);
    } else if (value.is_string()) {
      os << pad << key << ": " << value.get<std::string>() << "\n";
    } else {
      os << pad << key << ": " << value.dump() << "\n";
    }
  }
}

}  // namespace

Json coordinates_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

Json bounds_json(const FrameBounds& b) {
  return {{"lower", number(b.lower)},
          {"upper", number(b.upper)},
          {"method", to_string(b.method)},
          {"arg_lower", coordinates_json(b.arg_lower)},
          {"arg_upper", coordinates_json(b.arg_upper)}};
}

Json verdict_json(const TheoremVerdict& v) {
  Json diagnostics = Json::object();
  for (const auto& [key, value] : v.diagnostics) diagnostics[key] = number(value);
  return {{"theorem_id", v.theorem_id},
          {"hypothesis", {{"holds", v.hypothesis_holds}, {"margin", optional_number(v.hypothesis_margin)}}},
          {"predicted", {{"lower", optional_number(v.predicted_lower)}, {"upper", optional_number(v.predicted_upper)}}},
          {"empirical", {{"lower", number(v.empirical.lower)}, {"upper", number(v.empirical.upper)}}},
          {"passed", v.passed},
          {"status", to_string(v.status)},
          {"notes", v.notes},
          {"diagnostics", diagnostics}};
}

Json RunReport::to_json() const {
  Json j;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["instance_digest"] = digest.empty() ? Json(nullptr) : Json(digest);
  j["seed"] = seed;
  j["results"] = results;
  if (seconds) j["timings"] = {{"seconds", *seconds}};
  return j;
}

std::string render_text(const Json& report) {
  std::ostringstream os;
  render(os, report, 0);
  return os.str();
}

}  // namespace pframe
