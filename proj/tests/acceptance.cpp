// Acceptance suite: one PASS/FAIL line per criterion, thresholds pinned in
// src/acceptance.cpp. Usage: acceptance [--quick] [--jobs K] [--only 3,7]

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "lgle/acceptance.hpp"

int main(int argc, char** argv) {
  lgle::acceptance::Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") {
      opt.quick = true;
    } else if (a == "--jobs" && i + 1 < argc) {
      opt.jobs = std::atoi(argv[++i]);
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) opt.only.insert(std::stoi(tok));
    } else {
      std::fprintf(stderr, "usage: acceptance [--quick] [--jobs K] [--only ids]\n");
      return 2;
    }
  }
  int failed = 0;
  lgle::acceptance::run(opt, [&](const lgle::acceptance::CriterionResult& r) {
    failed += !r.pass;
    std::printf("%s\n", lgle::acceptance::summary_line(r).c_str());
    std::fflush(stdout);
  });
  std::printf("%s\n", failed == 0 ? "all criteria passed" : (std::to_string(failed) + " criteria failed").c_str());
  return failed == 0 ? 0 : 1;
}
