#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace conu {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ReproduceOptions {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir;  // curves of the overfitting run land here when set
};

/// identity, unbiased, dominance, gradients, bbe, priors, overfit, learning,
/// sensitivity (in criterion order).
const std::vector<std::string>& suite_names();

CriterionResult run_suite(std::string_view name, const ReproduceOptions& opts = {});
/// "all" expands to every suite.
std::vector<CriterionResult> run_suites(const std::vector<std::string>& names,
                                        const ReproduceOptions& opts = {});

/// "[PASS] 3 dominance: ... (0.12 s)"
std::string format_result(const CriterionResult& r);
/// id,name,passed,seconds,detail
void write_results_csv(const std::vector<CriterionResult>& results, std::ostream& out);

}  // namespace conu
