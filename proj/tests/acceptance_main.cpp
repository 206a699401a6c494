#include <cstdio>

#include "ndqmc/acceptance.hpp"

int main() {
  bool all = true;
  ndqmc::acceptance::run_acceptance({}, [&](const ndqmc::acceptance::CriterionResult& r) {
    std::printf("%s\n", ndqmc::acceptance::summary_line(r).c_str());
    std::fflush(stdout);
    all = all && r.passed;
  });
  std::printf("%s\n", all ? "all criteria passed" : "some criteria FAILED");
  return all ? 0 : 1;
}
