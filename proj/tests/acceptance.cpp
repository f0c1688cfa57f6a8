#include <cstdio>
#include <iostream>

#include "fraclab/error.hpp"
#include "fraclab/verify.hpp"

// Runs the full verification suite and prints one verdict line per criterion,
// followed by the individual checks behind it.
int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <config.yaml>\n";
    return 2;
  }
  try {
    const auto cfg = fraclab::load_config(argv[1]);
    const auto report = fraclab::run_verify_suite(cfg);

    for (const auto& [id, ok] : report.criteria()) {
      int count = 0, failed = 0;
      for (const auto& s : report.stages)
        for (const auto& c : s.checks)
          if (c.criterion == id) ++count, failed += c.passed ? 0 : 1;
      std::printf("%-4s %s  (%d checks, %d failed)\n", id.c_str(), ok ? "PASS" : "FAIL", count, failed);
      for (const auto& s : report.stages)
        for (const auto& c : s.checks)
          if (c.criterion == id) {
            const bool sampled = c.relation == "checker";
            std::printf("       %-4s %-46s %.6g %s %.6g%s%s\n", c.passed ? "ok" : "FAIL", c.name.c_str(), c.value,
                        sampled ? "ref" : c.relation.c_str(), c.tolerance, c.detail.empty() ? "" : "  ",
                        c.detail.c_str());
          }
    }
    for (const auto& s : report.stages)
      if (!s.ran) std::printf("stage %s skipped: %s\n", s.name.c_str(), s.skipped_reason.c_str());
    std::printf("%s\n", report.passed() ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
    return report.passed() ? 0 : 1;
  } catch (const fraclab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
