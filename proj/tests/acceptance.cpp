// Acceptance run: one line per criterion, then the full table.
// Exit status is nonzero if any criterion fails.

#include <cstdio>
#include <iostream>

#include "cvtf/cli.hpp"

int main() {
  cvtf::VerifyOptions opts;
  const auto first = cvtf::run_verification(opts);
  const auto second = cvtf::run_verification(opts);
  const auto table = cvtf::render_verification(first);
  const bool reproducible = table == cvtf::render_verification(second);

  int failed = 0;
  for (const auto& r : first) {
    bool ok = r.passed();
    char timing[96] = "";
    if (r.time_limit > 0) {
      const bool in_time = r.seconds < r.time_limit;
      ok = ok && in_time;
      std::snprintf(timing, sizeof timing, " (%.3f s, limit %.0f s)", r.seconds, r.time_limit);
    }
    if (r.id == 9) {
      ok = ok && reproducible;
      if (!reproducible) std::snprintf(timing, sizeof timing, " (verify output differed between runs)");
    }
    if (!ok) ++failed;
    std::printf("criterion %d %s: %s%s\n", r.id, ok ? "PASS" : "FAIL", r.title.c_str(), timing);
  }
  std::printf("\n%s", table.c_str());
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
