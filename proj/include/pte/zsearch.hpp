#ifndef PTE_ZSEARCH_HPP
#define PTE_ZSEARCH_HPP

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "pte/core.hpp"
#include "pte/modp.hpp"

namespace pte::zsearch {

enum class Mode { odd, even };

// staged exhaustive search for symmetric ideal solutions over Z:
// two-prime congruence chain, auxiliary completability filters mod the q_i,
// residue-table filter mod r, filter-polynomial checks mod M1/M2/exactly,
// then interpolation finalization
struct SearchConfigZ {
  int n = 0;
  long H = 0;        // height bound
  long p1 = 0;       // primary sieve prime (p1 > p2)
  long p2 = 0;       // secondary sieve prime
  std::vector<long> qList;  // auxiliary completability filter primes
  long r = 0;        // residue-table prime
  std::uint64_t M1 = (1ull << 50);
  std::uint64_t M2 = (1ull << 30) + 3;
  Mode mode = Mode::odd;

  // optional residue-pool restriction: every selected element must reduce
  // mod poolPrime into the given multiset (used to lift a local class when
  // poolPrime is not a proven divisor); empty = inactive
  long poolPrime = 0;
  std::vector<long> poolA, poolB;  // sorted residues in [0, poolPrime)
};

// published parameter-table row for n in 9..16 (mode set from parity)
SearchConfigZ default_config(int n, long H);

struct NearMiss {
  int n = 0;
  Mode mode = Mode::odd;
  // all elements known to be integers (odd mode: the known members of A;
  // even mode: the +/- closure of the known halves of A and B), sorted
  std::vector<long> integerPart;
  // primitive integer polynomials (ascending coefficients, positive leading
  // coefficient) whose roots complete the solution
  std::vector<std::vector<mpz_class>> residualPolys;
  // for a real quadratic residual: the same quadratic shifted so that its
  // relevant root is the fractional part alpha in [0,1) (the printed form)
  std::vector<std::vector<mpz_class>> alphaForms;
  std::string fieldNote;  // discriminant / degree / square-freeness summary
  // side attribution (even mode): known positive half-elements per side and,
  // per residual polynomial, the side (0 = A, 1 = B) it completes
  std::vector<long> aPart, bPart;
  std::vector<int> residualSides;
};

struct StageStats {
  long long chainPrefixes = 0;  // full-length chain-admissible tuples reached
  long long rPassed = 0;        // survived the residue-table filter
  long long qPassed = 0;        // survived the q completability filters
  long long m1Passed = 0;       // filter polynomial vanished mod 2^50
  long long m2Passed = 0;       // ... and mod 2^30+3
  long long exactPassed = 0;    // ... and exactly
  long long solutionsFound = 0;
  long long nearMissesFound = 0;
  void add(const StageStats& o);
};

// resumable progress marker; the outer loop runs over first-element blocks
struct Checkpoint {
  std::string configHash;
  long outerIndex = 0;  // next unprocessed outer block
  bool done = false;
  StageStats stats;
  // accumulated results so far, serialized (kept so that an interrupted and
  // resumed run reproduces the uninterrupted output exactly)
  std::vector<std::string> solutions;
  std::vector<std::string> nearMisses;
};

std::string config_hash(const SearchConfigZ& cfg);
nlohmann::json pair_to_json(const PtePair& P);
PtePair pair_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NearMiss& nm);
NearMiss nearmiss_from_json(const nlohmann::json& j);

struct SearchResult {
  std::vector<PtePair> solutions;   // canonicalized, deterministic order
  std::vector<NearMiss> nearMisses;
  StageStats stats;
  Checkpoint checkpoint;
};

// admissible next elements of the congruence chain given the selections so
// far; odd mode consumes a flat prefix of A, even mode alternates a_k / b_k
std::vector<long> sieve_chain_odd(const std::vector<long>& prefix, const SearchConfigZ& cfg);
std::vector<long> sieve_chain_even(const std::vector<long>& aSel, const std::vector<long>& bSel,
                                   const SearchConfigZ& cfg);

// completability of the partial selection to a full solution pattern mod q:
// odd mode needs A == -A mod q, even mode needs A == B mod q
bool local_filter(const std::vector<long>& prefix, long q, int n);
bool local_filter_even(const std::vector<long>& aSel, const std::vector<long>& bSel, long q,
                       int n);

// membership structure over (Z/r)^dim recording every moment vector the
// not-yet-selected elements can still account for
struct ResidueTable {
  long r = 0;
  int dim = 0;
  bool hashed = false;
  std::vector<std::uint64_t> bits;       // bitset when r^dim fits the budget
  std::unordered_set<std::uint64_t> set;  // fallback
  std::uint64_t index(const std::vector<long>& m) const;
  bool contains(const std::vector<long>& m) const;
};
ResidueTable residue_table(int n, long r);

struct FinalizeResult {
  enum class Kind { solution, nearMiss, reject };
  Kind kind = Kind::reject;
  PtePair solution;
  NearMiss nm;
};

// odd mode: prefix of (n+3)/2 integers; interpolates the degree-(n-1)/2
// polynomial whose roots are the negations of the remaining elements
FinalizeResult finalize_odd(const std::vector<long>& prefix, int n, long H);
// even mode: s = ceil(n/4)+1 selected a's and t = floor(n/4)+1 selected b's;
// two interpolations in the squared variables recover the missing halves
FinalizeResult finalize_even(const std::vector<long>& aSel, const std::vector<long>& bSel,
                             int n, long H);

// full staged pipeline; resume continues from a checkpoint, and a
// nonnegative stopAfterOuter interrupts after that many further outer blocks
// (the returned checkpoint then has done == false)
SearchResult search(const SearchConfigZ& cfg, const Checkpoint* resume = nullptr,
                    long stopAfterOuter = -1);

// integer solutions of height <= H reducing mod pstar to a unit multiple of
// one of the listed local classes; chain primes are taken from the proven
// divisor table, so an empty result justifies pstar as a sieve prime
std::vector<PtePair> pre_search(int n, long H, long pstar,
                                const std::vector<modp::LocalSolution>& obstructions);

// exact verification of an odd-mode near miss with one quadratic residual:
// all moment identities hold in Z[x]/(residual)
bool nearmiss_quadratic_ok(const NearMiss& nm);
// floating-point verification of the moment identities to 1e-6 relative
bool nearmiss_float_ok(const NearMiss& nm);

}  // namespace pte::zsearch

#endif
