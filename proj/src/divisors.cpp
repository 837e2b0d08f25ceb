#include "pte/divisors.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace pte::divisors {

using quad::Behavior;
using quad::QuadInt;

namespace {

using P = Provenance;
constexpr P K = P::kleiman;
constexpr P R = P::rees_smyth;
constexpr P C = P::caley;
constexpr P F = P::filaseta_markovich;
constexpr P T = P::this_paper;
constexpr P S = P::symmetric_only;

struct ZRow {
  int n;
  std::vector<ZEntry> base;     // required for every ideal solution
  std::vector<ZEntry> sym;      // additionally required for symmetric solutions
  std::vector<long> conjecture; // strong evidence, no proof
};

const std::vector<ZRow>& z_table() {
  static const std::vector<ZRow> t = {
      {3, {{2, 2, K}}, {}, {}},
      {4, {{2, 2, K}, {3, 2, K}}, {}, {}},
      {5, {{2, 4, K}, {3, 2, K}, {5, 1, K}, {7, 1, R}}, {}, {}},
      {6, {{2, 5, K}, {3, 2, K}, {5, 2, K}}, {}, {}},
      {7, {{2, 6, K}, {3, 3, K}, {5, 2, K}, {7, 1, K}, {11, 1, C}}, {{19, 1, S}}, {}},
      {8, {{2, 6, F}, {3, 3, K}, {5, 2, K}, {7, 2, K}, {11, 1, C}, {13, 1, C}}, {}, {}},
      {9, {{2, 9, F}, {3, 3, K}, {5, 2, K}, {7, 2, K}, {11, 1, R}, {13, 1, C}}, {}, {}},
      {10,
       {{2, 7, F}, {3, 4, K}, {5, 2, K}, {7, 2, K}, {13, 1, R}, {17, 1, C}, {23, 1, T}},
       {},
       {}},
      {11,
       {{2, 8, F}, {3, 4, K}, {5, 3, K}, {7, 2, K}, {11, 1, R}, {13, 1, R}, {17, 1, C},
        {19, 1, C}},
       {{31, 1, S}},
       {}},
      {12,
       {{2, 8, F}, {3, 4, K}, {5, 3, K}, {7, 2, K}, {11, 2, K}, {17, 1, C}, {19, 1, C}},
       {{29, 1, S}},
       {}},
      {13,
       {{2, 10, F}, {3, 5, K}, {5, 3, K}, {7, 2, K}, {11, 2, K}, {13, 1, R}, {17, 1, T},
        {19, 1, T}, {23, 1, T}},
       {{29, 1, S}, {31, 1, S}, {37, 1, S}, {41, 1, S}},
       {}},
      {14,
       {{2, 10, F}, {3, 5, K}, {5, 3, K}, {7, 2, K}, {11, 2, K}, {13, 2, K}, {17, 1, R},
        {19, 1, T}, {23, 1, T}},
       {{31, 1, S}, {37, 1, S}},
       {}},
      {15,
       {{2, 11, F}, {3, 5, K}, {5, 3, K}, {7, 3, K}, {11, 2, K}, {13, 2, K}, {17, 1, R},
        {19, 1, T}, {23, 1, T}},
       {{37, 1, S}, {41, 1, S}, {43, 1, S}, {47, 1, S}},
       {}},
      {16,
       {{2, 11, F}, {3, 6, K}, {5, 4, K}, {7, 3, K}, {11, 2, K}, {13, 2, K}, {19, 1, R},
        {23, 1, T}},
       {{29, 1, S}, {37, 1, S}, {41, 1, S}, {43, 1, S}, {53, 1, S}},
       {}},
      {17,
       {{2, 15, F}, {3, 6, K}, {5, 4, K}, {7, 3, K}, {11, 2, K}, {13, 2, K}, {17, 1, R},
        {19, 1, R}, {23, 1, T}, {29, 1, T}},
       {{31, 1, S}, {37, 1, S}, {41, 1, S}, {43, 1, S}, {47, 1, S}, {53, 1, S}},
       {71}},
      {18,
       {{2, 15, F}, {3, 6, K}, {5, 4, K}, {7, 3, K}, {11, 2, K}, {13, 2, K}, {17, 2, K},
        {23, 1, T}, {29, 1, T}},
       {{31, 1, S}, {41, 1, S}, {43, 1, S}, {47, 1, S}, {59, 1, S}},
       {}},
      {19,
       {{2, 16, F}, {3, 8, K}, {5, 4, K}, {7, 3, K}, {11, 2, K}, {13, 2, K}, {17, 2, K},
        {19, 1, R}, {23, 1, R}, {29, 1, T}, {31, 1, T}},
       {{41, 1, S}, {43, 1, S}, {47, 1, S}, {53, 1, S}, {59, 1, S}},
       {61, 67}},
      {20,
       {{2, 16, F}, {3, 8, K}, {5, 4, K}, {7, 3, K}, {11, 2, K}, {13, 2, K}, {17, 2, K},
        {19, 2, K}, {23, 1, R}, {29, 1, T}, {31, 1, T}},
       {{37, 1, S}, {43, 1, S}, {47, 1, S}, {53, 1, S}},
       {67, 71}},
  };
  return t;
}

const ZRow& z_row(int n) {
  for (const auto& r : z_table())
    if (r.n == n) return r;
  throw std::out_of_range("no divisor data for n=" + std::to_string(n));
}

// quadratic-ring rows, 5 <= n <= 20; {p, ramified, exp, symmetric_only}
struct QRow {
  int n;
  std::vector<QEntry> e;
};

const std::vector<QRow>& q_table(int d) {
  // ramified entries denote powers of a prime of norm p; plain entries are
  // rational prime powers (both conjugate factors when p splits)
  static const std::vector<QRow> t1 = {
      {5, {{2, true, 4, false}, {5, false, 1, false}}},
      {6, {{2, true, 3, false}, {5, false, 2, false}}},
      {7, {{2, true, 4, false}, {3, false, 1, false}, {5, false, 2, false}}},
      {8, {{2, true, 4, false}, {5, false, 2, false}, {13, false, 1, false}}},
      {9,
       {{2, true, 5, false}, {3, false, 2, false}, {5, false, 2, false}, {13, false, 1, false}}},
      {10,
       {{2, true, 5, false}, {5, false, 2, false}, {13, false, 1, false}, {17, false, 1, false}}},
      {11,
       {{2, true, 6, false}, {5, false, 3, false}, {13, false, 1, false}, {17, false, 1, false}}},
      {12,
       {{2, true, 6, false}, {5, false, 3, false}, {17, false, 1, false}, {29, false, 1, true}}},
      {13,
       {{2, true, 7, false},
        {5, false, 3, false},
        {13, false, 1, false},
        {17, false, 1, false},
        {29, false, 1, true},
        {37, false, 1, true},
        {41, false, 1, true}}},
      {14,
       {{2, true, 7, false},
        {5, false, 3, false},
        {13, false, 2, false},
        {17, false, 1, false},
        {37, false, 1, true}}},
      {15,
       {{2, true, 8, false},
        {5, false, 3, false},
        {13, false, 2, false},
        {17, false, 1, false},
        {37, false, 1, true},
        {41, false, 1, true}}},
      {16,
       {{2, true, 8, false},
        {5, false, 4, false},
        {13, false, 2, false},
        {29, false, 1, true},
        {37, false, 1, true},
        {41, false, 1, true},
        {53, false, 1, true}}},
      {17,
       {{2, true, 9, false},
        {5, false, 4, false},
        {13, false, 2, false},
        {17, false, 1, false},
        {29, false, 1, false},
        {37, false, 1, true},
        {41, false, 1, true},
        {53, false, 1, true}}},
      {18,
       {{2, true, 9, false},
        {5, false, 4, false},
        {13, false, 2, false},
        {17, false, 2, false},
        {29, false, 1, false},
        {41, false, 1, true}}},
      {19,
       {{2, true, 10, false},
        {5, false, 4, false},
        {13, false, 2, false},
        {17, false, 2, false},
        {29, false, 1, false},
        {41, false, 1, true},
        {53, false, 1, true}}},
      {20,
       {{2, true, 10, false},
        {5, false, 4, false},
        {13, false, 2, false},
        {17, false, 2, false},
        {29, false, 1, false},
        {37, false, 1, true},
        {53, false, 1, true}}},
  };
  static const std::vector<QRow> t2 = {
      {5, {{2, true, 4, false}, {3, false, 2, false}}},
      {6, {{2, true, 3, false}, {3, false, 2, false}}},
      {7,
       {{2, true, 3, false}, {3, false, 3, false}, {11, false, 1, false}, {19, false, 1, true}}},
      {8, {{3, false, 3, false}, {11, false, 1, false}}},
      {9, {{2, true, 5, false}, {3, false, 3, false}, {11, false, 1, false}}},
      {10, {{2, true, 5, false}, {3, false, 4, false}, {17, false, 1, false}}},
      {11,
       {{2, true, 6, false}, {3, false, 4, false}, {11, false, 1, false}, {17, false, 1, false}}},
      {12,
       {{2, true, 6, false},
        {3, false, 4, false},
        {11, false, 2, false},
        {17, false, 1, false},
        {19, false, 1, false}}},
      {13,
       {{2, true, 7, false},
        {3, false, 5, false},
        {11, false, 2, false},
        {17, false, 1, false},
        {41, false, 1, true}}},
      {14,
       {{2, true, 7, false},
        {3, false, 5, false},
        {11, false, 2, false},
        {17, false, 1, false},
        {19, false, 1, false}}},
      {15,
       {{2, true, 8, false},
        {3, false, 5, false},
        {11, false, 2, false},
        {19, false, 1, false},
        {41, false, 1, true},
        {43, false, 1, true}}},
      {16,
       {{3, false, 6, false},
        {11, false, 2, false},
        {19, false, 1, false},
        {41, false, 1, true},
        {43, false, 1, true}}},
      {17,
       {{2, true, 9, false},
        {3, false, 6, false},
        {11, false, 2, false},
        {17, false, 1, false},
        {19, false, 1, false},
        {41, false, 1, true},
        {43, false, 1, true}}},
      {18,
       {{2, true, 9, false},
        {3, false, 6, false},
        {11, false, 2, false},
        {17, false, 2, false},
        {41, false, 1, true},
        {43, false, 1, true},
        {59, false, 1, true}}},
      {19,
       {{2, true, 10, false},
        {3, false, 7, false},
        {11, false, 2, false},
        {17, false, 2, false},
        {19, false, 1, false},
        {41, false, 1, true},
        {43, false, 1, true},
        {59, false, 1, true}}},
      {20,
       {{2, true, 10, false},
        {3, false, 7, false},
        {11, false, 2, false},
        {17, false, 2, false},
        {19, false, 2, false},
        {43, false, 1, true}}},
  };
  static const std::vector<QRow> t3 = {
      {5, {{3, true, 2, false}, {7, false, 1, false}}},
      {6, {}},
      {7, {{3, true, 3, false}, {7, false, 1, false}, {19, false, 1, true}}},
      {8, {{3, true, 3, false}, {7, false, 2, false}, {13, false, 1, false}}},
      {9, {{7, false, 2, false}, {13, false, 1, false}}},
      {10, {{3, true, 4, false}, {7, false, 2, false}, {13, false, 1, false}}},
      {11,
       {{3, true, 4, false},
        {7, false, 2, false},
        {13, false, 1, false},
        {19, false, 1, false},
        {31, false, 1, true}}},
      {12, {{3, true, 4, false}, {7, false, 2, false}, {19, false, 1, false}}},
      {13,
       {{3, true, 5, false},
        {7, false, 2, false},
        {13, false, 1, false},
        {19, false, 1, false},
        {31, false, 1, true},
        {37, false, 1, true}}},
      {14,
       {{3, true, 5, false},
        {7, false, 2, false},
        {13, false, 2, false},
        {19, false, 1, false},
        {31, false, 1, true},
        {37, false, 1, true}}},
      {15,
       {{3, true, 5, false},
        {7, false, 3, false},
        {13, false, 2, false},
        {19, false, 1, false},
        {37, false, 1, true},
        {43, false, 1, true}}},
      {16,
       {{3, true, 6, false},
        {7, false, 3, false},
        {13, false, 2, false},
        {19, false, 1, false},
        {37, false, 1, true},
        {43, false, 1, true}}},
      {17,
       {{3, true, 6, false},
        {7, false, 3, false},
        {13, false, 2, false},
        {19, false, 1, false},
        {31, false, 1, true},
        {37, false, 1, true},
        {43, false, 1, true}}},
      {18,
       {{3, true, 7, false},
        {7, false, 3, false},
        {13, false, 2, false},
        {31, false, 1, true},
        {43, false, 1, true}}},
      {19,
       {{3, true, 7, false},
        {7, false, 3, false},
        {13, false, 2, false},
        {19, false, 1, false},
        {43, false, 1, true}}},
      {20,
       {{3, true, 7, false},
        {7, false, 3, false},
        {13, false, 2, false},
        {19, false, 2, false},
        {31, false, 1, false},
        {37, false, 1, true},
        {43, false, 1, true}}},
  };
  static const std::vector<QRow> t7 = {
      {5, {{2, false, 4, false}}},
      {6, {{2, false, 3, false}}},
      {7,
       {{2, false, 4, false}, {3, false, 1, false}, {7, true, 2, false}, {11, false, 1, false}}},
      {8, {{11, false, 1, false}}},
      {9, {{2, false, 5, false}, {3, false, 2, false}, {11, false, 1, false}}},
      {10, {{2, false, 5, false}, {23, false, 1, false}}},
      {11, {{2, false, 6, false}, {11, false, 1, false}}},
      {12, {{2, false, 6, false}, {11, false, 2, false}, {29, false, 1, true}}},
      {13,
       {{2, false, 7, false},
        {11, false, 2, false},
        {23, false, 1, false},
        {29, false, 1, true},
        {37, false, 1, true}}},
      {14,
       {{2, false, 7, false},
        {11, false, 2, false},
        {23, false, 1, false},
        {37, false, 1, true}}},
      {15,
       {{2, false, 8, false},
        {11, false, 2, false},
        {23, false, 1, false},
        {37, false, 1, true},
        {43, false, 1, true}}},
      {16,
       {{11, false, 2, false},
        {23, false, 1, false},
        {29, false, 1, true},
        {37, false, 1, true},
        {43, false, 1, true},
        {53, false, 1, true}}},
      {17,
       {{2, false, 9, false},
        {11, false, 2, false},
        {29, false, 1, false},
        {37, false, 1, true},
        {43, false, 1, true},
        {53, false, 1, true}}},
      {18, {{2, false, 9, false}, {11, false, 2, false}, {29, false, 1, false}, {43, false, 1, true}}},
      {19,
       {{2, false, 10, false},
        {11, false, 2, false},
        {23, false, 1, false},
        {29, false, 1, false},
        {43, false, 1, true},
        {53, false, 1, true}}},
      {20,
       {{2, false, 10, false},
        {11, false, 2, false},
        {23, false, 1, false},
        {29, false, 1, false},
        {37, false, 1, true},
        {43, false, 1, true},
        {53, false, 1, true}}},
  };
  switch (d) {
    case 1: return t1;
    case 2: return t2;
    case 3: return t3;
    case 7: return t7;
    default: throw std::invalid_argument("no tabulated quad divisor data for d=" + std::to_string(d));
  }
}

int ceil_div(int n, long p) { return (int)((n + p - 1) / p); }

}  // namespace

std::vector<ZEntry> required_z_entries(int n, bool symmetric) {
  const auto& r = z_row(n);
  auto out = r.base;
  if (symmetric) out.insert(out.end(), r.sym.begin(), r.sym.end());
  return out;
}

mpz_class required_z(int n, bool symmetric) {
  mpz_class prod = 1, pw;
  for (const auto& e : required_z_entries(n, symmetric)) {
    mpz_ui_pow_ui(pw.get_mpz_t(), e.p, e.exp);
    prod *= pw;
  }
  return prod;
}

std::vector<long> conjectural_z(int n) { return z_row(n).conjecture; }

bool quad_row_is_rule_derived(int d) { return d == 11 || d == 19; }

std::vector<QEntry> derive_quad(int n, int d, bool symmetric) {
  if (quad_row_is_rule_derived(d)) return rule_closure(n, d, symmetric);
  for (const auto& r : q_table(d)) {
    if (r.n != n) continue;
    std::vector<QEntry> out;
    for (const auto& e : r.e)
      if (symmetric || !e.symmetric_only) out.push_back(e);
    return out;
  }
  throw std::out_of_range("no quad divisor data for n=" + std::to_string(n));
}

std::vector<QEntry> rule_closure(int n, int d, bool symmetric) {
  // key (p, ramified) -> (exp, symmetric_only)
  std::map<std::pair<long, bool>, std::pair<int, bool>> acc;
  auto add = [&](long p, bool ram, int exp, bool symOnly) {
    auto& slot = acc[{p, ram}];
    if (slot.first == 0) slot.second = symOnly;
    slot.first = std::max(slot.first, exp);
    if (!symOnly) slot.second = false;
  };
  for (const auto& e : required_z_entries(n, false)) {
    auto f = quad::split_prime(e.p, d);
    if (f.behavior == Behavior::split) {
      // rational prime divides once either factor does, with the usual
      // multiplicity amplification for a prime of norm p
      int s = n / (int)e.p, l = 0;
      for (int m = n; m % e.p == 0; m /= (int)e.p) l++;
      if (e.p < n && s < l) continue;
      int exp = ceil_div(n, e.p);
      if (e.p == 2 && n == 5) exp = std::max(exp, 4);
      add(e.p, false, exp, false);
    } else if (f.behavior == Behavior::ramified) {
      int exp = ceil_div(n, e.p);
      if (e.p == n && e.p > 3) exp = std::max(exp, 2);  // p | C_p lifts to the square
      if (e.p == 2 && n == 5) exp = std::max(exp, 4);
      add(e.p, true, exp, false);
    }
  }
  // inert primes enter only with norm p^2 at n = p^2 or in the norm window
  for (long p : {2L, 3L, 5L}) {
    if (quad::split_prime(p, d).behavior != Behavior::inert) continue;
    long nq = p * p;
    if (nq == n) add(p, false, 2, false);
    else if (n + 2 <= nq && 6 * (nq - n - 2) < n - 3)
      add(p, false, ceil_div(n, nq), false);
  }
  if (symmetric) {
    // split primes required in the symmetric rational case transfer by
    // reduction modulo either conjugate factor
    for (const auto& e : z_row(n).sym)
      if (quad::split_prime(e.p, d).behavior == Behavior::split)
        add(e.p, false, ceil_div(n, e.p), true);
  }
  std::vector<QEntry> out;
  for (const auto& [k, v] : acc) out.push_back({k.first, k.second, v.first, v.second});
  return out;
}

std::vector<QuadInt> quad_filter_primes(int n, int d, long pmax) {
  std::vector<QuadInt> out;
  for (const auto& e : derive_quad(n, d, true)) {
    if (e.p >= pmax) continue;
    auto f = quad::split_prime(e.p, d);
    if (f.behavior == Behavior::ramified) {
      out.push_back(quad::unit_canonical(f.pi));
    } else if (f.behavior == Behavior::split) {
      out.push_back(quad::unit_canonical(f.pi));
      out.push_back(quad::unit_canonical(quad::conj(f.pi)));
    }
  }
  return out;
}

std::vector<AuditLine> audit(const PtePair& P, bool symmetric) {
  std::vector<AuditLine> out;
  if (!P.ideal()) {
    out.push_back({"ideal", 1, 0, false});
    return out;
  }
  mpz_class Cn = P.constant ? *P.constant : constant(P.A, P.B);
  for (const auto& e : required_z_entries(P.n, symmetric)) {
    AuditLine L;
    L.factor = std::to_string(e.p) + (e.exp > 1 ? "^" + std::to_string(e.exp) : "");
    L.required = e.exp;
    mpz_class rem, pz = e.p;
    L.found = (int)mpz_remove(rem.get_mpz_t(), Cn.get_mpz_t(), pz.get_mpz_t());
    L.ok = L.found >= L.required;
    out.push_back(L);
  }
  return out;
}

std::vector<AuditLine> audit_quad(const quad::QuadPair& P, bool symmetric) {
  std::vector<AuditLine> out;
  QuadInt Cn = quad::constant_quad(P);
  int n = (int)P.A.size();
  for (const auto& e : derive_quad(n, P.d, symmetric)) {
    AuditLine L;
    L.required = e.exp;
    if (e.ramified) {
      L.factor = "rho" + std::to_string(e.p) +
                 (e.exp > 1 ? "^" + std::to_string(e.exp) : "");
      QuadInt rho = quad::split_prime(e.p, P.d).pi;
      QuadInt z = Cn;
      while (L.found < 200) {
        auto q = quad::divexact(z, rho);
        if (!q) break;
        z = *q;
        L.found++;
      }
    } else {
      L.factor = std::to_string(e.p) + (e.exp > 1 ? "^" + std::to_string(e.exp) : "");
      mpz_class remx, remy, pz = e.p;
      unsigned long ex =
          Cn.x == 0 ? 1000 : mpz_remove(remx.get_mpz_t(), Cn.x.get_mpz_t(), pz.get_mpz_t());
      unsigned long ey =
          Cn.y == 0 ? 1000 : mpz_remove(remy.get_mpz_t(), Cn.y.get_mpz_t(), pz.get_mpz_t());
      L.found = (int)std::min(ex, ey);
    }
    L.ok = L.found >= L.required;
    out.push_back(L);
  }
  return out;
}

bool audit_ok(const std::vector<AuditLine>& lines) {
  for (const auto& L : lines)
    if (!L.ok) return false;
  return true;
}

std::string to_string(const std::vector<QEntry>& row) {
  std::string s;
  for (const auto& e : row) {
    if (!s.empty()) s += "*";
    if (e.ramified) s += "rho" + std::to_string(e.p);
    else s += std::to_string(e.p);
    if (e.exp > 1) s += "^" + std::to_string(e.exp);
  }
  return s.empty() ? "1" : s;
}

}  // namespace pte::divisors
