#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlpot/measure.hpp"

namespace nlpot::cli {

struct CorpusEntry {
  std::string name;    // "m03_separated_balls"
  std::string family;  // radial_bump | annulus | separated_balls | atomic_cloud
  Measure measure;
};

/// `count` measures in R^n cycling through the four families. Output depends
/// only on (n, count, seed); entry k does not depend on `count`.
std::vector<CorpusEntry> generate_corpus(int n, int count, std::uint64_t seed);

/// Companion inhomogeneous datum: a small atomic ball of mass 1/2 centred at
/// distance 1.8 from the origin in a seeded direction.
Measure corpus_mu(int n, std::uint64_t seed);

/// Evaluation points for corpus measures: the origin, points at radii 0.5,
/// 1 and 2.5 on seeded directions.
PointSet corpus_probes(int n, std::uint64_t seed);

}  // namespace nlpot::cli
