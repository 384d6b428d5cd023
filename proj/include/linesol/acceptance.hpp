// SPDX-License-Identifier: Apache-2.0
//
// The acceptance suite: one verdict per criterion, each backed by the module
// checks it composes. Shared by `linesol verify` and the acceptance binary.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "linesol/io.hpp"

namespace linesol {

enum class Verdict {
  pass,
  fail,
  // The literal statement fails while the corrected one passes; the details
  // carry both. Reported as FAIL, does not gate the exit status.
  known_conflict,
};

struct CriterionResult {
  int id = 0;
  std::string title;
  Verdict verdict = Verdict::fail;
  std::string summary;          // one line
  nlohmann::json detail;        // deterministic numbers only
  double seconds = 0.0;         // wall time, kept out of the JSON
};

struct AcceptanceReport {
  std::string hash;
  std::vector<CriterionResult> criteria;
  bool gating_pass() const;     // no plain failures
};

using ProgressFn = std::function<void(const CriterionResult&)>;

/// Runs criteria 1-11 for the p values of `c`. Criterion 12 is evaluated in
/// process, by repeating the branch and probe pipeline for the first p,
/// unless `repeat_check` is false (callers that compare whole runs instead).
/// `progress` is called as each criterion completes.
AcceptanceReport run_acceptance(const RunConfig& c, const ProgressFn& progress = {},
                                bool repeat_check = true);

std::string to_string(Verdict v);
/// "PASS", "FAIL" or "FAIL (known conflict)" followed by id, title and summary.
std::string format_line(const CriterionResult& r);
nlohmann::json to_json(const CriterionResult& r);
nlohmann::json to_json(const AcceptanceReport& r);

}  // namespace linesol
