#ifndef PTE_DIVISORS_HPP
#define PTE_DIVISORS_HPP

#include <gmpxx.h>
#include <string>
#include <vector>

#include "pte/core.hpp"
#include "pte/quadring.hpp"

namespace pte::divisors {

enum class Provenance {
  kleiman,
  rees_smyth,
  caley,
  filaseta_markovich,
  this_paper,
  symmetric_only,
  conjectural
};

struct ZEntry {
  long p;
  int exp;
  Provenance prov;
};

// required divisors of C_n over Z; with symmetric, adds the extra divisors
// known for symmetric ideal solutions
std::vector<ZEntry> required_z_entries(int n, bool symmetric);
mpz_class required_z(int n, bool symmetric);
// evidence-only primes (no proof); never used as sieve primes by default
std::vector<long> conjectural_z(int n);

// one factor of the required-divisor product over a quadratic ring:
// rho_p^exp when ramified, else the rational prime power p^exp
// (p split; both conjugate prime factors divide)
struct QEntry {
  long p;
  bool ramified;
  int exp;
  bool symmetric_only;
};

// required divisors over the ring of integers of Q(i*sqrt(d));
// tabulated data for d in {1,2,3,7}, rule-derived for d in {11,19}
std::vector<QEntry> derive_quad(int n, int d, bool symmetric);
bool quad_row_is_rule_derived(int d);

// what the splitting/multiplicity rules alone guarantee; the tabulated rows
// are a subset of this closure (checked in tests)
std::vector<QEntry> rule_closure(int n, int d, bool symmetric);

// prime elements of norm < pmax required for symmetric solutions (search filter)
std::vector<quad::QuadInt> quad_filter_primes(int n, int d, long pmax);

struct AuditLine {
  std::string factor;
  int required = 0;
  int found = 0;  // exponent margin in the constant
  bool ok = false;
};
std::vector<AuditLine> audit(const PtePair& P, bool symmetric);
std::vector<AuditLine> audit_quad(const quad::QuadPair& P, bool symmetric);
bool audit_ok(const std::vector<AuditLine>& lines);

std::string to_string(const std::vector<QEntry>& row);

}  // namespace pte::divisors

#endif
