#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace tdelay {

struct CheckRecord {
  int criterion = 0;
  std::string name;
  nlohmann::json parameters = nlohmann::json::object();
  double expected = 0.0;
  double observed = 0.0;
  double std_error = 0.0;
  double tolerance = 0.0;
  std::string relation;  // how observed is compared with expected
  std::string note;
  bool pass = false;
};

struct VerificationReport {
  std::string suite;
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
  std::vector<CheckRecord> records;
  bool pass() const;
  nlohmann::json to_json() const;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int workers = 0;
  std::ostream* log = nullptr;  // one line per finished record when set
};

constexpr int kCriteria = 12;
std::string criterion_title(int id);

// All checks belonging to acceptance criterion `id` (1..12).
std::vector<CheckRecord> run_criterion(int id, const VerifyOptions& opt);

// core | tails | charfunc | all. Throws DomainError for other names.
VerificationReport run_suite(const std::string& suite, const VerifyOptions& opt);
bool known_suite(const std::string& suite);

}  // namespace tdelay
