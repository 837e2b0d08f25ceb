#ifndef PTE_MODP_HPP
#define PTE_MODP_HPP

#include <optional>
#include <string>
#include <vector>

namespace pte::modp {

// residue mod an odd prime p < 2^31
struct FpElem {
  long v = 0;
  long p = 0;
};

FpElem fp(long v, long p);  // reduces any integer
FpElem add(FpElem a, FpElem b);
FpElem sub(FpElem a, FpElem b);
FpElem mul(FpElem a, FpElem b);
FpElem pow(FpElem a, long e);
FpElem inv(FpElem a);
long balanced(FpElem a);  // representative in (-p/2, p/2]

long order(long a, long p);  // multiplicative order; 0 if a == 0 mod p

enum class LocalKind { odd_symmetric, even_symmetric };

// symmetric ideal solution mod p: for odd n, B = -A and the odd moments
// 1..n-2 of A vanish with A != -A; for even n, A = -A, B = -B, even moments
// 2..n-2 agree and A != B
struct LocalSolution {
  int n = 0;
  long p = 0;
  std::vector<long> A, B;  // sorted residues in [0, p)
  LocalKind kind = LocalKind::odd_symmetric;
};

bool local_ok(const LocalSolution& s);
std::string to_string(const LocalSolution& s);

struct MultiplicityCertificate {
  int n = 0;
  long p = 0;
  long minL1 = 0;
  long minimizerCount = 0;
  std::vector<long> witness;  // coefficients of h, ascending, balanced
  // all minimizers with next-to-leading coefficient 0 (translation gauge)
  // and linear coefficient 0 or 1 (scaling/negation gauge)
  std::vector<std::vector<long>> minimizers;
  bool provesDivisibility = false;            // minL1 > 2n
};

FpElem dickson(int n, FpElem x);                 // recurrence
FpElem dickson_binomial(int n, FpElem x);        // independent formula
FpElem chebyshev(int n, FpElem x);               // T_n via its own recurrence

// all shift values c for which x0^n + x0^(-n) = 2c has a solution with x0 in
// the relevant cyclic group of order divisible by n (multiplicative group if
// p = 1 mod n, norm-1 torus of the quadratic extension if p = -1 mod n)
std::vector<long> allowed_shifts(int n, long p);

// all n roots of T_n(x) - c with multiplicity if it splits completely
std::optional<std::vector<long>> chebyshev_shift_roots(int n, long p, long c);

std::vector<LocalSolution> construct_odd_local(int n, long p);
std::vector<LocalSolution> construct_even_local(int n, long p);

enum class EnumMethod { exhaustive, mitm };
struct EnumBounds {
  long maxC = 0;  // largest residue allowed in the unnegated half
  long minD = 0;  // smallest residue allowed in the negated half
};

// all local solutions up to scalar multiples, canonicalized (1 in A after
// scaling, ties lexicographic), sorted
std::vector<LocalSolution> enumerate_local(int n, long p, EnumMethod method,
                                           std::optional<EnumBounds> bounds = {});

MultiplicityCertificate multiplicity_search(int n, long p);

// evaluate the polynomial with the given ascending coefficients at x mod p
long poly_eval(const std::vector<long>& coeffs, long x, long p);
// unique interpolating polynomial (ascending, residues) through v[a] at a=0..p-1
std::vector<long> interpolate_values(const std::vector<long>& values, long p);

}  // namespace pte::modp

#endif
