#include "pte/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace pte {

MultisetZ make_multiset(std::vector<long> v) {
  MultisetZ s;
  s.reserve(v.size());
  for (long x : v) s.emplace_back(x);
  std::sort(s.begin(), s.end());
  return s;
}

MultisetZ sorted_multiset(std::vector<mpz_class> v) {
  std::sort(v.begin(), v.end());
  return v;
}

MultisetZ negated(const MultisetZ& s) {
  MultisetZ r;
  r.reserve(s.size());
  for (auto it = s.rbegin(); it != s.rend(); ++it) r.push_back(-*it);
  return r;
}

MultisetZ plus_minus(const std::vector<long>& half) {
  std::vector<long> v;
  v.reserve(half.size() * 2);
  for (long x : half) {
    v.push_back(x);
    v.push_back(-x);
  }
  return make_multiset(v);
}

mpz_class height(const MultisetZ& s) {
  mpz_class h = 0;
  for (const auto& x : s) {
    mpz_class a = abs(x);
    if (a > h) h = a;
  }
  return h;
}

mpz_class moment(const MultisetZ& S, int k) {
  if (k < 1) throw std::invalid_argument("moment: k must be >= 1");
  mpz_class sum = 0, pw;
  for (const auto& x : S) {
    mpz_pow_ui(pw.get_mpz_t(), x.get_mpz_t(), k);
    sum += pw;
  }
  return sum;
}

int verify(const MultisetZ& A, const MultisetZ& B) {
  if (A.size() != B.size()) throw std::invalid_argument("verify: size mismatch");
  int n = (int)A.size();
  int m = 0;
  for (int k = 1; k <= n - 1; k++) {
    if (moment(A, k) != moment(B, k)) break;
    m = k;
  }
  return m;
}

static std::vector<mpz_class> poly_from_roots(const MultisetZ& roots) {
  // prod (x - r); coefficients ascending
  std::vector<mpz_class> c{1};
  for (const auto& r : roots) {
    c.insert(c.begin(), 0);
    for (size_t i = 0; i + 1 < c.size(); i++) c[i] -= r * c[i + 1];
  }
  return c;
}

mpz_class constant(const MultisetZ& A, const MultisetZ& B) {
  if (A.size() != B.size()) throw std::invalid_argument("constant: size mismatch");
  auto pa = poly_from_roots(A), pb = poly_from_roots(B);
  for (size_t i = 1; i < pa.size(); i++)
    if (pa[i] != pb[i])
      throw std::runtime_error("constant: difference polynomial has positive degree");
  mpz_class C = pa[0] - pb[0];
  // product form: C = prod_i (b_j - a_i) for every j
  for (const auto& b : B) {
    mpz_class prod = 1;
    for (const auto& a : A) prod *= (b - a);
    if (prod != C) throw std::runtime_error("constant: product form mismatch");
  }
  return C;
}

Symmetry classify_symmetry(const MultisetZ& A, const MultisetZ& B) {
  if (A == negated(B)) return Symmetry::odd_symmetric;
  if (A == negated(A) && B == negated(B)) return Symmetry::even_symmetric;
  return Symmetry::none;
}

PtePair make_pte_pair(const MultisetZ& A, const MultisetZ& B) {
  PtePair P;
  P.A = A;
  P.B = B;
  P.n = (int)A.size();
  P.degree = verify(A, B);
  P.symmetry = classify_symmetry(A, B);
  if (P.degree == P.n - 1) {
    // ideal iff the difference polynomial degenerates to a nonzero constant
    auto pa = poly_from_roots(A), pb = poly_from_roots(B);
    bool same_tail = true;
    for (size_t i = 1; i < pa.size(); i++)
      if (pa[i] != pb[i]) same_tail = false;
    if (same_tail && pa[0] != pb[0]) P.constant = constant(A, B);
  }
  return P;
}

PtePair canonicalize(const PtePair& P) {
  mpz_class g = 0;
  for (const auto& x : P.A) g = gcd(g, x);
  for (const auto& x : P.B) g = gcd(g, x);
  if (g == 0) g = 1;
  auto scale = [&](const MultisetZ& s) {
    MultisetZ r = s;
    for (auto& x : r) x /= g;
    return r;
  };
  MultisetZ A = scale(P.A), B = scale(P.B);
  // candidates under negation (and A<->B swap, which negation realizes for
  // odd-symmetric pairs and which is independently allowed for even-symmetric)
  std::vector<std::pair<MultisetZ, MultisetZ>> cands;
  cands.push_back({A, B});
  cands.push_back({negated(A), negated(B)});
  if (P.symmetry == Symmetry::even_symmetric || P.symmetry == Symmetry::none) {
    cands.push_back({B, A});
    cands.push_back({negated(B), negated(A)});
  }
  // compare by (|x|, sign) with positive preferred, element-wise over A then B;
  // this makes the all-positive form win over its negation
  auto key = [](const std::pair<MultisetZ, MultisetZ>& c) {
    std::vector<std::pair<mpz_class, int>> k;
    for (const auto* s : {&c.first, &c.second})
      for (const auto& x : *s) k.push_back({abs(x), x >= 0 ? 0 : 1});
    std::sort(k.begin(), k.begin() + c.first.size());
    std::sort(k.begin() + c.first.size(), k.end());
    return k;
  };
  auto best = cands[0];
  auto bestKey = key(best);
  for (size_t i = 1; i < cands.size(); i++) {
    auto ki = key(cands[i]);
    if (ki < bestKey) {
      best = cands[i];
      bestKey = ki;
    }
  }
  return make_pte_pair(best.first, best.second);
}

std::string to_string(const MultisetZ& s) {
  std::string out = "{";
  for (size_t i = 0; i < s.size(); i++) {
    if (i) out += ",";
    out += s[i].get_str();
  }
  return out + "}";
}

}  // namespace pte
