#pragma once

#include <string>

#include "instance.hpp"
#include "solution.hpp"
#include "trace.hpp"

namespace md {

// JSON documents with rationals as "p/q" strings; exact round-trips.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);
Instance load_instance(const std::string& path);
void save_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// FNV-1a of the canonical instance serialization; traces and solutions carry
// it so that mismatched files are rejected instead of silently cross-checked.
std::string instance_digest(const Instance& inst);

std::string trace_to_json(const Trace& tr);
Trace trace_from_json(const std::string& text);

std::string solution_to_json(const OfflineSolution& sol,
                             const std::string& digest);
OfflineSolution solution_from_json(const std::string& text,
                                   std::string* digest_out = nullptr);

// One bound check inside a run report.
struct BoundCheck {
  std::string name;
  Rat lhs, rhs;
  bool ok = false;
};

struct RunReport {
  std::string instance;
  uint64_t seed = 0;
  std::string algo;
  int n = 0;  // leaves
  int depth = 0;
  int k = 0;
  CostBreakdown cost;
  std::optional<Rat> feas_total;
  std::vector<BoundCheck> checks;

  bool all_ok() const {
    for (const auto& c : checks)
      if (!c.ok) return false;
    return true;
  }
};

std::string report_to_json(const RunReport& r);
std::string report_csv_header(const RunReport& r);
std::string report_csv_row(const RunReport& r);

}  // namespace md
