#pragma once

#include <cstdint>
#include <string>

#include "instance.hpp"

namespace md {

struct GenSpec {
  std::string kind;     // random-hst | random-tree | random-euclidean
  std::string problem;  // fl-deadline | fl-delay | mad | osd
  int n = 8;            // leaves (tree kinds) or points (euclidean)
  int requests = 10;
  uint64_t seed = 0;
  std::string profile;  // deadline-uniform | linear-slopes | bursty-coalitions
  int max_depth = 5;
};

// Deterministic in all arguments; re-running with identical arguments gives a
// byte-identical instance file.
Instance gen_instance(const GenSpec& spec);

}  // namespace md
