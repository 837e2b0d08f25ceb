#ifndef PTE_FNPOLY_HPP
#define PTE_FNPOLY_HPP

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pte::fnpoly {

// weight of x_k: odd searches use 2k-1 (odd moments), even searches 2k
enum class WeightKind { odd, even };

using Exponents = std::vector<int>;

// term order: all monomials share the weighted degree, ties broken with the
// highest-index exponents most significant, ascending (matches the order in
// which weighted_monomials emits them; the pure power of x_1 comes first)
struct MonoLess {
  bool operator()(const Exponents& a, const Exponents& b) const {
    for (size_t i = a.size(); i-- > 0;) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  }
};

// homogeneous (under the weight) multivariate polynomial with integer
// coefficients of content 1; the first term's coefficient is positive
struct SparsePoly {
  int varCount = 0;
  WeightKind kind = WeightKind::odd;
  std::map<Exponents, mpz_class, MonoLess> terms;
};

struct FnSpec {
  int n = 0;
  int D = 0;         // minimal weighted degree with a nontrivial kernel
  int varCount = 0;  // floor(n/2) for odd n, n/2 - 1 for even n
  int kernelDim = 0;
  // count of symbolic unknowns substituted for the x_k: for odd n a single
  // block of (n-3)/2; for even n an a-block and a b-block
  int arityA = 0;
  int arityB = 0;
};

// all exponent vectors with weighted degree exactly D, in term order
std::vector<Exponents> weighted_monomials(int D, int n, WeightKind kind);

// filter polynomial for size n (9 <= n <= 16): the integer relation among
// the products of power sums of the not-yet-selected elements
std::pair<FnSpec, SparsePoly> build_fn(int n);

mpz_class height(const SparsePoly& F);  // max |coefficient|

// exact evaluation at a point
mpz_class eval_fn(const SparsePoly& F, const std::vector<mpz_class>& x);
// evaluation mod 2^50 via masked 64-bit wraparound
std::uint64_t eval_fn_mod2_50(const SparsePoly& F, const std::vector<std::int64_t>& x);
// evaluation mod an odd modulus m < 2^31 (e.g. 2^30 + 3, or a filter prime)
std::uint64_t eval_fn_mod(const SparsePoly& F, const std::vector<std::int64_t>& x,
                          std::uint64_t m);
inline constexpr std::uint64_t kCheckPrime = (1ull << 30) + 3;

// residues c mod r for the next selected element such that F vanishes mod r
// at the updated moment vector and, if a table lookup is supplied, the
// updated vector is recorded as reachable; partialMoments holds the moments
// of the already-selected elements (weights of the x_k give the powers), and
// sign is +1 except for even-n selections counted negatively
std::vector<long> candidate_residues(
    const SparsePoly& F, const std::vector<long>& partialMoments, long r, int sign = 1,
    const std::function<bool(const std::vector<long>&)>& inTable = {});

nlohmann::json to_json(const SparsePoly& F);
SparsePoly poly_from_json(const nlohmann::json& j);

}  // namespace pte::fnpoly

#endif
