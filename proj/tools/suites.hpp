#pragma once

// Reproduction suites: analytic prediction vs engine verdict, one row per case.

#include <string>
#include <vector>

namespace semistab::suites {

struct Row {
  std::string label;
  std::string prediction;
  std::string engine;
  bool agree = false;
  std::string note;
};

const std::vector<std::string>& names();
/// Throws std::invalid_argument for an unknown suite.
std::vector<Row> run(const std::string& suite);

}  // namespace semistab::suites
