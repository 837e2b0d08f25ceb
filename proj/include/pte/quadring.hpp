#ifndef PTE_QUADRING_HPP
#define PTE_QUADRING_HPP

#include <gmpxx.h>
#include <optional>
#include <string>
#include <vector>

namespace pte::quad {

// x + y*omega_d in the ring of integers of Q(i*sqrt(d)).
// omega_d = i*sqrt(d) for d in {1,2}; (1+i*sqrt(d))/2 for d in {3,7,11,19}.
struct QuadInt {
  int d = 1;
  mpz_class x, y;
  QuadInt() = default;
  QuadInt(int d_, mpz_class x_, mpz_class y_) : d(d_), x(std::move(x_)), y(std::move(y_)) {}
  bool operator==(const QuadInt&) const = default;
};

bool half_integral_basis(int d);  // true for d = 3,7,11,19
QuadInt add(const QuadInt& a, const QuadInt& b);
QuadInt sub(const QuadInt& a, const QuadInt& b);
QuadInt mul(const QuadInt& a, const QuadInt& b);
QuadInt neg(const QuadInt& a);
QuadInt conj(const QuadInt& a);
mpz_class norm(const QuadInt& a);
QuadInt pow(const QuadInt& a, int k);
bool is_zero(const QuadInt& a);

// element a + b*omega where omega = exp(2*pi*i/3); valid only for d=3
QuadInt from_omega_basis(const mpz_class& a, const mpz_class& b);

std::vector<QuadInt> units(int d);
bool divides(const QuadInt& w, const QuadInt& z);
std::optional<QuadInt> divexact(const QuadInt& z, const QuadInt& w);

// unit multiple with complex argument in [0, 2*pi/|units|)
QuadInt unit_canonical(const QuadInt& z);

enum class Behavior { split, ramified, inert };
struct PrimeFactor {
  long p;
  Behavior behavior;
  QuadInt pi;  // a prime of norm p for split/ramified (undefined for inert)
};
PrimeFactor split_prime(long p, int d);

// all nonzero z with norm <= bound, optionally multiples of pi,
// optionally one representative per unit orbit; sorted by (norm, x, y)
std::vector<QuadInt> enum_by_norm(long bound, int d, const QuadInt* pi = nullptr,
                                  bool unitCanonical = false);

std::string to_string(const QuadInt& z);  // human readable ("3+4i", "2w+9", ...)

// ---- pairs over the ring ----
struct QuadPair {
  int d = 1;
  std::vector<QuadInt> A, B;
};

int verify_quad(const QuadPair& P);  // largest m with matching moments 1..m
QuadInt constant_quad(const QuadPair& P);  // throws if not ideal
QuadPair canonical_quad(const QuadPair& P);
bool quad_pair_equal(const QuadPair& a, const QuadPair& b);  // as multiset pairs
std::string to_string(const QuadPair& P);

}  // namespace pte::quad

#endif
