#ifndef PTE_QUADSEARCH_HPP
#define PTE_QUADSEARCH_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pte/quadring.hpp"

namespace pte::quadsearch {

// staged search for symmetric ideal solutions over the ring of integers of
// Q(i*sqrt(d)): two-prime selection chain on the conjugate factors of the
// sieve prime p, small-prime completability filter, filter-polynomial check,
// and interpolation finalization
struct SearchConfigQ {
  int d = 1;
  int n = 0;
  long p = 0;     // rational sieve prime; must split in the ring
  long H = 0;     // norm bound for the selection sets
  double ell = 0; // even case: the first element has norm <= H/ell
  // prime elements of norm < p used by the completability filter; empty
  // means "use the required divisors of the constant for (d, n)"
  std::vector<quad::QuadInt> smallPrimeFilters;
};

// published parameter-table row for (d, n); throws if not tabulated
SearchConfigQ table_config(int d, int n);

struct StatsQ {
  long long chainLeaves = 0;    // full-length selection tuples reached
  long long step4Passed = 0;    // survived the small-prime divisor filter
  long long prescreenPassed = 0;  // survived the floating-point / filter-poly stage
  long long exactPassed = 0;    // survived the exact filter-polynomial check
  long long solutionsFound = 0;
};

// resumable progress marker; the outer loop runs over first-element choices
struct CheckpointQ {
  std::string configHash;
  long outerIndex = 0;
  bool done = false;
  StatsQ stats;
  std::vector<std::string> solutions;  // serialized pairs found so far
};

std::string config_hash(const SearchConfigQ& cfg);
nlohmann::json to_json(const CheckpointQ& c);
CheckpointQ checkpoint_from_json(const nlohmann::json& j);
nlohmann::json quad_pair_to_json(const quad::QuadPair& P);
quad::QuadPair quad_pair_from_json(const nlohmann::json& j);

struct SearchResultQ {
  std::vector<quad::QuadPair> solutions;  // canonicalized, deterministic order
  StatsQ stats;
  CheckpointQ checkpoint;
};

// full staged pipeline (parity of cfg.n picks the odd or even algorithm);
// resume continues from a checkpoint, and a nonnegative stopAfterOuter
// interrupts after that many further outer blocks (checkpoint.done == false)
SearchResultQ search_quad(const SearchConfigQ& cfg, const CheckpointQ* resume = nullptr,
                          long stopAfterOuter = -1);

std::vector<quad::QuadPair> search_quad_odd(const SearchConfigQ& cfg);
std::vector<quad::QuadPair> search_quad_even(const SearchConfigQ& cfg);

// the smallest H at which some selection ordering of the known solution
// survives the chain rules (over unit rotations, side swaps and, for even n,
// sign choices); nullopt if no ordering works at any height
std::optional<long> calibrate_height(const quad::QuadPair& P, const SearchConfigQ& cfg);

// Eisenstein search with sixfold symmetry: each side is a union of
// zeta_6-orbits of n/6 generators; moments below the 6th (and, for n=18,
// between the 6th and 12th) match automatically, so only the 6th (and 12th)
// moment equations are imposed.  n in {12, 18}; generators have argument in
// [0, pi/3), nondecreasing rational parts bounded by rmax, and the first
// generator is a rational integer.
std::vector<quad::QuadPair> sixfold_search(int n, long rmax);

}  // namespace pte::quadsearch

#endif
