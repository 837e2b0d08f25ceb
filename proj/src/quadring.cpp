#include "pte/quadring.hpp"

#include <cmath>

#include <algorithm>
#include <stdexcept>

namespace pte::quad {

bool half_integral_basis(int d) { return d % 4 == 3; }

static void check_d(int d) {
  if (d != 1 && d != 2 && d != 3 && d != 7 && d != 11 && d != 19)
    throw std::invalid_argument("unsupported ring");
}

static void check_same(const QuadInt& a, const QuadInt& b) {
  if (a.d != b.d) throw std::invalid_argument("mixed-d operands");
}

QuadInt add(const QuadInt& a, const QuadInt& b) {
  check_same(a, b);
  return {a.d, a.x + b.x, a.y + b.y};
}

QuadInt sub(const QuadInt& a, const QuadInt& b) {
  check_same(a, b);
  return {a.d, a.x - b.x, a.y - b.y};
}

QuadInt mul(const QuadInt& a, const QuadInt& b) {
  check_same(a, b);
  if (half_integral_basis(a.d)) {
    // w^2 = w - (1+d)/4
    mpz_class c = (1 + a.d) / 4;
    return {a.d, a.x * b.x - c * a.y * b.y, a.x * b.y + a.y * b.x + a.y * b.y};
  }
  // w^2 = -d
  return {a.d, a.x * b.x - a.d * a.y * b.y, a.x * b.y + a.y * b.x};
}

QuadInt neg(const QuadInt& a) { return {a.d, -a.x, -a.y}; }

QuadInt conj(const QuadInt& a) {
  if (half_integral_basis(a.d)) return {a.d, a.x + a.y, -a.y};  // conj(w) = 1 - w
  return {a.d, a.x, -a.y};
}

mpz_class norm(const QuadInt& a) {
  if (half_integral_basis(a.d)) {
    mpz_class c = (1 + a.d) / 4;
    return a.x * a.x + a.x * a.y + c * a.y * a.y;
  }
  return a.x * a.x + a.d * a.y * a.y;
}

QuadInt pow(const QuadInt& a, int k) {
  QuadInt r{a.d, 1, 0};
  for (int i = 0; i < k; i++) r = mul(r, a);
  return r;
}

bool is_zero(const QuadInt& a) { return a.x == 0 && a.y == 0; }

QuadInt from_omega_basis(const mpz_class& a, const mpz_class& b) {
  // omega = w - 1 where w = zeta_6 = (1+i*sqrt(3))/2
  return {3, a - b, b};
}

std::vector<QuadInt> units(int d) {
  check_d(d);
  if (d == 1) return {{1, 1, 0}, {1, 0, 1}, {1, -1, 0}, {1, 0, -1}};
  if (d == 3) {
    // powers of zeta_6 = w
    std::vector<QuadInt> u;
    QuadInt z{3, 1, 0}, w{3, 0, 1};
    for (int i = 0; i < 6; i++) {
      u.push_back(z);
      z = mul(z, w);
    }
    return u;
  }
  return {{d, 1, 0}, {d, -1, 0}};
}

bool divides(const QuadInt& w, const QuadInt& z) { return divexact(z, w).has_value(); }

std::optional<QuadInt> divexact(const QuadInt& z, const QuadInt& w) {
  check_same(z, w);
  if (is_zero(w)) throw std::invalid_argument("division by zero");
  QuadInt num = mul(z, conj(w));
  mpz_class N = norm(w);
  if (num.x % N != 0 || num.y % N != 0) return std::nullopt;
  return QuadInt{z.d, num.x / N, num.y / N};
}

// doubled real part and im/(sqrt(d)/2) (consistent scale within a ring)
static void embed2(const QuadInt& z, mpz_class& re, mpz_class& im) {
  if (half_integral_basis(z.d)) {
    re = 2 * z.x + z.y;
    im = z.y;
  } else {
    re = 2 * z.x;
    im = 2 * z.y;
  }
}

QuadInt unit_canonical(const QuadInt& z) {
  if (is_zero(z)) throw std::invalid_argument("unit_canonical of zero");
  QuadInt best = z;
  bool have = false;
  mpz_class bre, bim, re, im;
  for (const auto& u : units(z.d)) {
    QuadInt c = mul(u, z);
    embed2(c, re, im);
    // sector [0, 2pi/|U|): upper half plane excluding the negative real axis,
    // then minimal angle; the unit orbit meets it exactly once
    if (im < 0 || (im == 0 && re < 0)) continue;
    if (!have) {
      best = c;
      bre = re;
      bim = im;
      have = true;
      continue;
    }
    // angle(c) < angle(best) iff cross(best, c) < 0: bre*im - re*bim < 0
    if (bre * im - re * bim < 0) {
      best = c;
      bre = re;
      bim = im;
    }
  }
  return best;
}

PrimeFactor split_prime(long p, int d) {
  check_d(d);
  auto solve_norm = [&](long target_p) -> std::optional<QuadInt> {
    if (!half_integral_basis(d)) {
      // x^2 + d y^2 = p
      for (long y = 0; d * y * y <= target_p; y++) {
        long r = target_p - d * y * y;
        long x = (long)(std::sqrt((double)r) + 0.5);
        while (x * x > r) x--;
        if (x * x == r) return QuadInt{d, x, y};
      }
      return std::nullopt;
    }
    // (2a+b)^2 + d b^2 = 4p with element a + b*w
    long fp = 4 * target_p;
    for (long b = 0; d * b * b <= fp; b++) {
      long r = fp - d * b * b;
      long t = (long)(std::sqrt((double)r) + 0.5);
      while (t * t > r) t--;
      if (t * t != r) continue;
      for (long sgn : {1L, -1L}) {
        long num = sgn * t - b;
        if (num % 2 == 0) {
          QuadInt z{d, num / 2, b};
          if (norm(z) == target_p) return z;
        }
      }
    }
    return std::nullopt;
  };

  PrimeFactor f;
  f.p = p;
  long disc_p = (d % 4 == 3) ? d : 4 * d;  // |disc|
  bool ram = (disc_p % p == 0) || (p == 2 && d <= 2);
  if (p == 2) ram = (d == 1 || d == 2);
  if (ram) {
    f.behavior = Behavior::ramified;
    f.pi = *solve_norm(p);
    return f;
  }
  if (p == 2) {
    // d odd here; 2 splits iff -d = 1 mod 8
    if (((8 - d % 8) % 8) == 1) {
      f.behavior = Behavior::split;
      f.pi = *solve_norm(2);
    } else {
      f.behavior = Behavior::inert;
    }
    return f;
  }
  // odd p not dividing disc: Euler's criterion on -d
  mpz_class base = -d, m = p, r;
  mpz_powm_ui(r.get_mpz_t(), mpz_class(((-d) % p + p) % p).get_mpz_t(),
              (unsigned long)((p - 1) / 2), m.get_mpz_t());
  if (r == 1) {
    f.behavior = Behavior::split;
    f.pi = *solve_norm(p);
  } else {
    f.behavior = Behavior::inert;
  }
  return f;
}

std::vector<QuadInt> enum_by_norm(long bound, int d, const QuadInt* pi, bool unitCanonical) {
  check_d(d);
  std::vector<QuadInt> out;
  auto consider = [&](long x, long y) {
    QuadInt z{d, x, y};
    if (is_zero(z) || norm(z) > bound) return;
    if (pi && !divides(*pi, z)) return;
    if (unitCanonical && !(unit_canonical(z) == z)) return;
    out.push_back(z);
  };
  if (half_integral_basis(d)) {
    long ymax = (long)std::sqrt(4.0 * bound / d) + 1;
    for (long y = -ymax; y <= ymax; y++) {
      long rem = 4 * bound - d * y * y;
      if (rem < 0) continue;
      long t = (long)std::sqrt((double)rem) + 2;
      for (long s = -t; s <= t; s++) {  // s = 2x + y
        if (((s - y) % 2 + 2) % 2 != 0) continue;
        consider((s - y) / 2, y);
      }
    }
  } else {
    long ymax = (long)std::sqrt((double)bound / d) + 1;
    for (long y = -ymax; y <= ymax; y++) {
      if (d * y * y > bound) continue;
      long t = (long)std::sqrt((double)(bound - d * y * y)) + 2;
      for (long x = -t; x <= t; x++) consider(x, y);
    }
  }
  std::sort(out.begin(), out.end(), [](const QuadInt& a, const QuadInt& b) {
    mpz_class na = norm(a), nb = norm(b);
    if (na != nb) return na < nb;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string to_string(const QuadInt& z) {
  std::string sym = z.d == 1 ? "i" : (z.d == 3 ? "w" : "w" + std::to_string(z.d));
  if (z.d == 2) sym = "r2";  // r2 = i*sqrt(2)
  if (z.y == 0) return z.x.get_str();
  std::string ys = z.y == 1 ? sym : (z.y == -1 ? "-" + sym : z.y.get_str() + sym);
  if (z.x == 0) return ys;
  return z.x.get_str() + (z.y > 0 ? "+" : "") + ys;
}

// ---- pairs ----

static QuadInt set_moment(const std::vector<QuadInt>& S, int k) {
  QuadInt sum{S.at(0).d, 0, 0};
  for (const auto& z : S) sum = add(sum, pow(z, k));
  return sum;
}

int verify_quad(const QuadPair& P) {
  if (P.A.size() != P.B.size()) throw std::invalid_argument("verify_quad: size mismatch");
  int n = (int)P.A.size(), m = 0;
  for (int k = 1; k <= n - 1; k++) {
    if (!(set_moment(P.A, k) == set_moment(P.B, k))) break;
    m = k;
  }
  return m;
}

static std::vector<QuadInt> poly_from_roots(const std::vector<QuadInt>& roots, int d) {
  std::vector<QuadInt> c{{d, 1, 0}};
  for (const auto& r : roots) {
    c.insert(c.begin(), QuadInt{d, 0, 0});
    for (size_t i = 0; i + 1 < c.size(); i++) c[i] = sub(c[i], mul(r, c[i + 1]));
  }
  return c;
}

QuadInt constant_quad(const QuadPair& P) {
  auto pa = poly_from_roots(P.A, P.d), pb = poly_from_roots(P.B, P.d);
  for (size_t i = 1; i < pa.size(); i++)
    if (!(pa[i] == pb[i])) throw std::runtime_error("constant_quad: not ideal");
  QuadInt C = sub(pa[0], pb[0]);
  for (const auto& b : P.B) {
    QuadInt prod{P.d, 1, 0};
    for (const auto& a : P.A) prod = mul(prod, sub(b, a));
    if (!(prod == C)) throw std::runtime_error("constant_quad: product form mismatch");
  }
  return C;
}

static void sort_set(std::vector<QuadInt>& s) {
  std::sort(s.begin(), s.end(), [](const QuadInt& a, const QuadInt& b) {
    mpz_class na = norm(a), nb = norm(b);
    if (na != nb) return na < nb;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
}

static std::vector<mpz_class> key_of(const QuadPair& P) {
  std::vector<mpz_class> k;
  for (const auto* s : {&P.A, &P.B})
    for (const auto& z : *s) {
      k.push_back(z.x);
      k.push_back(z.y);
    }
  return k;
}

QuadPair canonical_quad(const QuadPair& P) {
  QuadPair Q = P;
  // strip common prime factors (primitive form)
  mpz_class g = 0;
  for (const auto* s : {&Q.A, &Q.B})
    for (const auto& z : *s) g = gcd(g, norm(z));
  for (long p = 2; mpz_class(p * p) <= g; p++) {
    while (g % p == 0) {
      auto f = split_prime(p, Q.d);
      bool reduced = false;
      std::vector<QuadInt> divs;
      if (f.behavior == Behavior::inert)
        divs = {QuadInt{Q.d, p, 0}};
      else
        divs = {f.pi, conj(f.pi)};
      for (const auto& w : divs) {
        bool all = true;
        for (const auto* s : {&Q.A, &Q.B})
          for (const auto& z : *s)
            if (!divides(w, z)) all = false;
        if (all) {
          for (auto* s : {&Q.A, &Q.B})
            for (auto& z : *s) z = *divexact(z, w);
          reduced = true;
        }
      }
      g = 0;
      for (const auto* s : {&Q.A, &Q.B})
        for (const auto& z : *s) g = gcd(g, norm(z));
      if (!reduced) {
        // strip this prime from g so the loop advances
        mpz_class pp = p;
        while (g % pp == 0) g /= pp;
      }
    }
  }
  // large leftover prime in g handled by one more pass (rare; g small in practice)
  if (g > 1 && mpz_probab_prime_p(g.get_mpz_t(), 25)) {
    auto f = split_prime(g.get_si(), Q.d);
    std::vector<QuadInt> divs;
    if (f.behavior == Behavior::inert)
      divs = {QuadInt{Q.d, g, 0}};
    else
      divs = {f.pi, conj(f.pi)};
    for (const auto& w : divs) {
      bool all = true;
      for (const auto* s : {&Q.A, &Q.B})
        for (const auto& z : *s)
          if (!divides(w, z)) all = false;
      if (all)
        for (auto* s : {&Q.A, &Q.B})
          for (auto& z : *s) z = *divexact(z, w);
    }
  }

  // minimize over units x conjugation x swap
  QuadPair best;
  std::vector<mpz_class> bestKey;
  bool have = false;
  for (int cj = 0; cj < 2; cj++)
    for (int sw = 0; sw < 2; sw++)
      for (const auto& u : units(Q.d)) {
        QuadPair cand;
        cand.d = Q.d;
        const auto& SA = sw ? Q.B : Q.A;
        const auto& SB = sw ? Q.A : Q.B;
        for (const auto& z : SA) cand.A.push_back(mul(u, cj ? conj(z) : z));
        for (const auto& z : SB) cand.B.push_back(mul(u, cj ? conj(z) : z));
        sort_set(cand.A);
        sort_set(cand.B);
        auto k = key_of(cand);
        if (!have || k < bestKey) {
          best = cand;
          bestKey = k;
          have = true;
        }
      }
  return best;
}

bool quad_pair_equal(const QuadPair& a, const QuadPair& b) {
  QuadPair x = a, y = b;
  sort_set(x.A);
  sort_set(x.B);
  sort_set(y.A);
  sort_set(y.B);
  return x.d == y.d && x.A == y.A && x.B == y.B;
}

std::string to_string(const QuadPair& P) {
  std::string s = "A={";
  for (size_t i = 0; i < P.A.size(); i++) s += (i ? "," : "") + to_string(P.A[i]);
  s += "} B={";
  for (size_t i = 0; i < P.B.size(); i++) s += (i ? "," : "") + to_string(P.B[i]);
  return s + "}";
}

}  // namespace pte::quad
