// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Usage: acceptance [report.json] [criterion ids...]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "tdelay/verify.hpp"

using namespace tdelay;

int main(int argc, char** argv) {
  const std::string report_path = argc > 1 ? argv[1] : "acceptance_report.json";
  std::vector<int> ids;
  for (int i = 2; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int id = 1; id <= kCriteria; ++id) ids.push_back(id);

  VerifyOptions opt;
  opt.seed = 1;
  opt.log = &std::cerr;
  VerificationReport report;
  report.suite = "acceptance";
  report.seed = opt.seed;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> lines;
  for (int id : ids) {
    const auto c0 = std::chrono::steady_clock::now();
    const std::vector<CheckRecord> recs = run_criterion(id, opt);
    bool pass = !recs.empty();
    for (const CheckRecord& r : recs) pass = pass && r.pass;
    report.records.insert(report.records.end(), recs.begin(), recs.end());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
    char buf[256];
    std::snprintf(buf, sizeof buf, "C%-2d %s  %s (%zu checks, %.1f s)", id, pass ? "PASS" : "FAIL",
                  criterion_title(id).c_str(), recs.size(), secs);
    std::cout << buf << std::endl;
  }
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream(report_path) << report.to_json().dump(2) << '\n';
  std::cout << (report.pass() ? "ALL PASS" : "SOME CRITERIA FAILED") << " in " << report.runtime_seconds << " s\n";
  return report.pass() ? 0 : 1;
}
