#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlpot/cli/corpus.hpp"
#include "nlpot/params.hpp"

namespace nlpot::cli {

/// Parses argv and dispatches to a subcommand. Returns the exit code:
/// 0 pass, 1 check failure, 2 usage error, 3 numerical diagnostic. Errors are
/// written to `err` as one line: nlpot error code=<c> kind=<k> message="...".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Expands tokens like "p=2,2.5,3" "q=auto" "alpha=1" "n=3,5" into raw tuples
/// (p, q, alpha, n) in lexicographic order p, q, alpha, n. q=auto resolves to
/// (p-1)/2. Tuples are not validated here.
struct RawTuple {
  double p, q, alpha;
  int n;
};
std::vector<RawTuple> expand_params_grid(const std::vector<std::string>& tokens);

struct SweepSettings {
  double tol = 1e-6;
  int radii = 8;
  int ascent_iters = 100;
  std::uint64_t seed = 7;
};

struct SweepRow {
  std::string check;
  double value = 0.0;
  bool pass = false;
};

/// Checks for one (tuple, measure, mu) job: solve, sandwich constants,
/// subsolution bound and existence. Invalid tuples yield one "valid" row.
std::vector<SweepRow> sweep_job(const RawTuple& t, const CorpusEntry& entry, bool with_mu, const SweepSettings& s);

}  // namespace nlpot::cli
