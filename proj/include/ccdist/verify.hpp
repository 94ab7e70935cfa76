// ccdist -- named verification suites: the checks behind `ccdist verify` and
// the acceptance test binary.
#pragma once

#include <string>
#include <vector>

#include "ccdist/group.hpp"

namespace ccdist::verify {

struct Row {
  std::string check;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct SuiteResult {
  std::string name;
  std::vector<Row> rows;
  bool pass = true;
  double seconds = 0.0;

  // measured <= threshold
  void expect_le(const std::string& check, double measured, double threshold);
  // boolean condition, threshold column reads 1
  void expect_true(const std::string& check, bool ok);
};

SuiteResult heisenberg_grid();      // closed form vs solver on a grid
SuiteResult cut_axis();             // vertical-axis points: level hand-off and value
SuiteResult lower_bounds();         // certified lower bounds vs the direct oracle
SuiteResult monotonicity();         // level values increase; equal after attainment
SuiteResult n32_oracle();           // solver vs oracles on the rank-3 free group
SuiteResult bessel_suite();         // zeros, interlacing, recursion, series
SuiteResult concavity();            // midpoint concavity sampling
SuiteResult relation_pk();          // the P_k recursion relation
SuiteResult positivity();           // P_{k,h} > 0 samples
SuiteResult varadhan();             // small-time log limit and leading-term ratio
SuiteResult geodesic_roundtrip();   // exp consistency and record verification
SuiteResult cut_verdicts();         // cut-locus classification
SuiteResult gm_classifier();        // sampled classifier on fixtures

// CLI suite names and the mapping to the checks above.
std::vector<std::string> suite_names();
std::vector<SuiteResult> run_suite(const std::string& name);

// All suites, in acceptance order.
std::vector<SuiteResult> run_all();

}  // namespace ccdist::verify
