#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "lgle/verify.hpp"

namespace lgle::acceptance {

struct Options {
  bool quick = false;        // sample sizes / 5, KS thresholds * sqrt(5)
  int jobs = 1;
  std::uint64_t seed = 20240917;
  std::set<int> only;        // empty: all twelve
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;  // every report passes
  double seconds = 0.0;
  std::vector<verify::StatReport> reports;
};

/// Runs the selected criteria in order; `on_done` (if set) is called as
/// each one finishes.
std::vector<CriterionResult> run(const Options& opt,
                                 const std::function<void(const CriterionResult&)>& on_done = {});

/// "[PASS] 7 Tracy-Widom one-point limit (123.4 s)" and one indented line
/// per report.
std::string summary_line(const CriterionResult& r);

}  // namespace lgle::acceptance
