// Acceptance suite: runs every criterion and prints one pass/fail line each.
#include <cstdio>

#include "ccdist/verify.hpp"

int main() {
  using ccdist::verify::SuiteResult;
  const std::vector<SuiteResult> results = ccdist::verify::run_all();
  int failures = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    const SuiteResult& res = results[i];
    std::printf("[%s] criterion %2zu: %-20s (%.1fs)\n", res.pass ? "PASS" : "FAIL", i + 1,
                res.name.c_str(), res.seconds);
    for (const auto& row : res.rows)
      std::printf("        %s %-64s measured=%.6g threshold=%.6g\n", row.pass ? "ok  " : "FAIL",
                  row.check.c_str(), row.measured, row.threshold);
    if (!res.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures == 0 ? 0 : 1;
}
