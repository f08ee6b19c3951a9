#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace nlflat {

/// Machine-readable outcome of one quantitative check. `pass` is true iff
/// `measured` satisfies the check's inequality against `bound` within `tolerance`.
struct VerificationReport {
  std::string check;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  double worst_t = 0.0;
  double worst_x = 0.0;
  std::map<std::string, std::string> metadata;
};

nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const std::vector<VerificationReport>& reports);

}  // namespace nlflat
