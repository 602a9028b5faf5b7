// Desk-scale acceptance run: basis 64, dt = T/2000, T = 1, N = 6.
#include <cstdio>

#include "starwave/acceptance.hpp"

int main() {
  const starwave::AcceptanceConfig config;
  int failed = 0;
  starwave::run_acceptance(config, [&](const starwave::CriterionResult& r) {
    std::printf("%s\n", starwave::summary_line(r).c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  });
  std::printf("%d of 11 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
