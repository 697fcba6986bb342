// Release gate runner: one line per criterion, nonzero exit if any fails.
// Criterion 11 runs the CLI `verify` twice and byte-compares results.jsonl.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "entkit/acceptance.hpp"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

entkit::acceptance::CriterionResult criterion_11_determinism() {
  entkit::acceptance::CriterionResult r{11, "determinism", false, ""};
#ifdef ENTKIT_CLI_PATH
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path base =
      std::filesystem::temp_directory_path() / "entkit_verify_determinism";
  std::error_code ec;
  std::filesystem::remove_all(base, ec);
  bool ok = true;
  for (int run = 0; run < 2 && ok; ++run) {
    const std::filesystem::path out = base / ("run" + std::to_string(run));
    const std::string cmd = std::string(ENTKIT_CLI_PATH) + " --seed 12345 --out \"" +
                            out.string() + "\" verify > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
      r.detail = "verify run " + std::to_string(run) + " exited with " + std::to_string(rc);
      ok = false;
    }
  }
  if (ok) {
    const std::string first = slurp(base / "run0" / "results.jsonl");
    const std::string second = slurp(base / "run1" / "results.jsonl");
    if (first.empty()) {
      r.detail = "results.jsonl empty or missing";
    } else if (first != second) {
      r.detail = "results.jsonl differs between runs";
    } else {
      r.passed = true;
    }
  }
  r.ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               start)
             .count();
#else
  r.detail = "CLI path not configured";
#endif
  return r;
}

}  // namespace

int main() {
  auto results = entkit::acceptance::run_acceptance();
  results.push_back(criterion_11_determinism());
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.index << ". " << r.name << "  ("
              << r.ms << " ms)";
    if (!r.passed && !r.detail.empty()) std::cout << "  [" << r.detail << "]";
    std::cout << "\n";
    all = all && r.passed;
  }
  std::cout << (all ? "all criteria passed" : "ACCEPTANCE FAILURE") << "\n";
  return all ? 0 : 1;
}
