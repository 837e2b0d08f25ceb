#ifndef PTE_CORE_HPP
#define PTE_CORE_HPP

#include <gmpxx.h>
#include <optional>
#include <string>
#include <vector>

namespace pte {

// Sorted multiset of integers (multiplicity allowed).
using MultisetZ = std::vector<mpz_class>;

MultisetZ make_multiset(std::vector<long> v);
MultisetZ sorted_multiset(std::vector<mpz_class> v);
MultisetZ negated(const MultisetZ& s);
// full +/- closure of a half set {x1..xk} -> {x1,-x1,...}
MultisetZ plus_minus(const std::vector<long>& half);
mpz_class height(const MultisetZ& s);

enum class Symmetry { none, odd_symmetric, even_symmetric };

struct PtePair {
  MultisetZ A, B;
  int n = 0;
  int degree = 0;                     // largest verified common-moment order
  std::optional<mpz_class> constant;  // set when ideal
  Symmetry symmetry = Symmetry::none;
  bool ideal() const { return degree == n - 1 && constant && *constant != 0; }
};

mpz_class moment(const MultisetZ& S, int k);

// largest m with moments 1..m equal (0 if first moments differ)
int verify(const MultisetZ& A, const MultisetZ& B);

// constant term of prod(x-a) - prod(x-b); throws if the difference has
// positive degree.  Also asserts the product form prod_i (b_j - a_i).
mpz_class constant(const MultisetZ& A, const MultisetZ& B);

Symmetry classify_symmetry(const MultisetZ& A, const MultisetZ& B);

// builds a verified pair; marks constant only when ideal
PtePair make_pte_pair(const MultisetZ& A, const MultisetZ& B);

// primitive form + deterministic representative under negation / swap / scaling
PtePair canonicalize(const PtePair& P);

std::string to_string(const MultisetZ& s);

}  // namespace pte

#endif
