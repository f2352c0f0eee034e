#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace resolv {

struct SuiteResult {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::string first_failure{};  // empty when none
};

struct SuiteInfo {
  std::string name;
  std::uint64_t default_cases;
  std::string summary;
};

const std::vector<SuiteInfo>& property_suites();

// Throws std::invalid_argument for an unknown name.
SuiteResult run_suite(const std::string& name, std::uint64_t cases, std::uint64_t seed);

}  // namespace resolv
