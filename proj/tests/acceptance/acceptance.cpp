// Runs every verification suite and prints one line per criterion.
// Usage: conu_acceptance [suite ...] [--jobs N] [--out-dir DIR]

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "conu/reproduce.hpp"

int main(int argc, char** argv) {
  conu::ReproduceOptions opts;
  std::vector<std::string> suites;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--jobs" && i + 1 < argc) opts.jobs = std::atoi(argv[++i]);
    else if (a == "--out-dir" && i + 1 < argc) opts.out_dir = argv[++i];
    else suites.push_back(a);
  }
  if (suites.empty()) suites = conu::suite_names();

  int failed = 0;
  for (const auto& name : suites) {
    conu::CriterionResult r;
    try {
      r = conu::run_suite(name, opts);
    } catch (const std::exception& e) {
      r.name = name;
      r.detail = std::string("error: ") + e.what();
    }
    std::cout << conu::format_result(r) << std::endl;
    failed += !r.passed;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << '\n';
  return failed ? 1 : 0;
}
