// Runs every acceptance check and prints one line per criterion.
// With --strict the exit status is nonzero when any check fails.

#include <cstdio>
#include <cstring>

#include "multibump/acceptance.hpp"

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--strict") == 0) strict = true;
  int passed = 0, total = 0;
  for (int id : multibump::criterion_ids()) {
    const multibump::CriterionResult r = multibump::run_criterion(id);
    std::printf("[%s] %2d %s: %s\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.summary.c_str());
    std::fflush(stdout);
    passed += r.passed;
    ++total;
  }
  std::printf("%d/%d criteria passed\n", passed, total);
  return strict && passed != total ? 1 : 0;
}
