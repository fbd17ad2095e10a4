// Acceptance gate: runs every release criterion at the default configuration
// and prints one PASS/FAIL line each.  Exit code 0 iff all criteria hold.

#include <iostream>

#include "osmoflow/config.hpp"
#include "osmoflow/verify.hpp"
#include "osmoflow/version.hpp"

int main() {
  osmoflow::RunConfig cfg;  // defaults pin the production resolutions
  std::cout << "osmoflow acceptance battery (version " << osmoflow::version()
            << ", config " << cfg.hash() << ")\n";

  const osmoflow::VerifyReport report = osmoflow::run_acceptance(cfg, &std::cout);

  if (report.all_passed()) {
    std::cout << "ALL CRITERIA PASSED (" << report.results.size() << ")\n";
    return 0;
  }
  int failed = 0;
  for (const auto& r : report.results) failed += r.passed ? 0 : 1;
  std::cout << "SOME CRITERIA FAILED (" << failed << " of "
            << report.results.size() << ")\n";
  return 1;
}
