#include "nlflat/report.hpp"

#include <cmath>

namespace nlflat {

namespace {

// JSON has no inf/nan; keep them readable instead of emitting null.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["check"] = r.check;
  j["pass"] = r.pass;
  j["measured"] = number(r.measured);
  j["bound"] = number(r.bound);
  j["tolerance"] = number(r.tolerance);
  j["worst_t"] = number(r.worst_t);
  j["worst_x"] = number(r.worst_x);
  j["metadata"] = r.metadata;
  return j;
}

nlohmann::json to_json(const std::vector<VerificationReport>& reports) {
  auto arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

}  // namespace nlflat
