#include "pte/modp.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace pte::modp {

FpElem fp(long v, long p) {
  long r = v % p;
  if (r < 0) r += p;
  return {r, p};
}

static void check_same(FpElem a, FpElem b) {
  if (a.p != b.p) throw std::invalid_argument("modulus mismatch");
}

FpElem add(FpElem a, FpElem b) {
  check_same(a, b);
  long r = a.v + b.v;
  if (r >= a.p) r -= a.p;
  return {r, a.p};
}

FpElem sub(FpElem a, FpElem b) {
  check_same(a, b);
  long r = a.v - b.v;
  if (r < 0) r += a.p;
  return {r, a.p};
}

FpElem mul(FpElem a, FpElem b) {
  check_same(a, b);
  return {(long)((__int128)a.v * b.v % a.p), a.p};
}

FpElem pow(FpElem a, long e) {
  if (e < 0) return pow(inv(a), -e);
  FpElem r{1 % a.p, a.p};
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

FpElem inv(FpElem a) {
  if (a.v == 0) throw std::invalid_argument("inverse of zero");
  return pow(a, a.p - 2);
}

long balanced(FpElem a) { return a.v > a.p / 2 ? a.v - a.p : a.v; }

long order(long a, long p) {
  a %= p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  long x = a % p, k = 1;
  while (x != 1) {
    x = (long)((__int128)x * a % p);
    k++;
  }
  return k;
}

// ---- polynomial helpers ----

long poly_eval(const std::vector<long>& coeffs, long x, long p) {
  long r = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
    r = (long)(((__int128)r * x + *it) % p);
  if (r < 0) r += p;
  return r;
}

std::vector<long> interpolate_values(const std::vector<long>& values, long p) {
  // Newton's forward differences at nodes 0..p-1
  size_t m = values.size();
  std::vector<long> diff(values);
  for (auto& v : diff) v = fp(v, p).v;
  std::vector<long> newton(m);  // divided differences d_k = delta^k v(0) / k!
  long fact = 1;
  for (size_t k = 0; k < m; k++) {
    newton[k] = mul(fp(diff[0], p), inv(fp(fact, p))).v;
    for (size_t i = 0; i + 1 < m - k; i++) diff[i] = fp(diff[i + 1] - diff[i], p).v;
    fact = (long)((__int128)fact * (long)(k + 1) % p);
  }
  // expand sum_k d_k * x(x-1)...(x-k+1)
  std::vector<long> out(m, 0), basis{1 % p};
  for (size_t k = 0; k < m; k++) {
    for (size_t i = 0; i < basis.size(); i++)
      out[i] = fp(out[i] + (long)((__int128)newton[k] * basis[i] % p), p).v;
    // basis *= (x - k)
    basis.push_back(0);
    for (size_t i = basis.size() - 1; i > 0; i--)
      basis[i] = fp(basis[i - 1] - (long)((__int128)basis[i] * (long)k % p), p).v;
    basis[0] = fp(-(long)((__int128)basis[0] * (long)k % p), p).v;
  }
  return out;
}

// ---- Dickson / Chebyshev ----

FpElem dickson(int n, FpElem x) {
  if (n < 0) throw std::invalid_argument("dickson: n >= 0");
  FpElem d0{2 % x.p, x.p}, d1 = x;
  if (n == 0) return d0;
  for (int k = 2; k <= n; k++) {
    FpElem d2 = sub(mul(x, d1), d0);
    d0 = d1;
    d1 = d2;
  }
  return d1;
}

FpElem dickson_binomial(int n, FpElem x) {
  if (n == 0) return {2 % x.p, x.p};
  // D_n(x) = sum_k (-1)^k n/(n-k) C(n-k,k) x^(n-2k), exact integer coefficients
  FpElem acc{0, x.p};
  for (int k = 0; 2 * k <= n; k++) {
    // n/(n-k) * C(n-k, k) is an integer: compute C(n-k,k) then scale
    long long binom = 1;
    for (int i = 0; i < k; i++) binom = binom * (n - k - i) / (i + 1);
    long long coef = binom * n / (n - k);
    FpElem term = mul(fp((k % 2 ? -coef : coef) % x.p, x.p), pow(x, n - 2 * k));
    acc = add(acc, term);
  }
  return acc;
}

FpElem chebyshev(int n, FpElem x) {
  FpElem t0{1 % x.p, x.p}, t1 = x, two{2 % x.p, x.p};
  if (n == 0) return t0;
  for (int k = 2; k <= n; k++) {
    FpElem t2 = sub(mul(mul(two, x), t1), t0);
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

static std::vector<long> chebyshev_coeffs(int n, long p) {
  std::vector<long> t0{1 % p}, t1{0, 1 % p};
  if (n == 0) return t0;
  for (int k = 2; k <= n; k++) {
    std::vector<long> t2(k + 1, 0);
    for (size_t i = 0; i < t1.size(); i++) t2[i + 1] = fp(2 * t1[i], p).v;
    for (size_t i = 0; i < t0.size(); i++) t2[i] = fp(t2[i] - t0[i], p).v;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  return t1;
}

std::vector<long> allowed_shifts(int n, long p) {
  if (p % n != 1 && p % n != n - 1)
    throw std::invalid_argument("allowed_shifts: p must be +-1 mod n");
  if (p <= n + 1) throw std::invalid_argument("allowed_shifts: p > n+1 required");
  std::set<long> cs;
  long inv2 = inv(fp(2, p)).v;
  if (p % n == 1) {
    for (long x0 = 1; x0 < p; x0++) {
      FpElem xn = pow(fp(x0, p), n);
      long c = mul(add(xn, inv(xn)), fp(inv2, p)).v;
      cs.insert(c);
    }
  } else {
    // norm-1 torus of F_{p^2}: z = u + v*sqrt(D) with u^2 - D v^2 = 1
    long D = 0;
    for (long t = 2; t < p; t++) {
      if (pow(fp(t, p), (p - 1) / 2).v == p - 1) {
        D = t;
        break;
      }
    }
    for (long u = 0; u < p; u++) {
      for (long v = 0; v < p; v++) {
        long lhs = fp(u * u - D * v * v, p).v;
        if (lhs != 1) continue;
        // z^n = un + vn*sqrt(D); z^(-n) = conj, so x0^n + x0^(-n) = 2*un
        long un = 1, vn = 0;
        for (int k = 0; k < n; k++) {
          long u2 = fp(un * u + D * vn % p * v, p).v;
          long v2 = fp(un * v + vn * u, p).v;
          un = u2;
          vn = v2;
        }
        cs.insert(un);
      }
    }
  }
  return {cs.begin(), cs.end()};
}

std::optional<std::vector<long>> chebyshev_shift_roots(int n, long p, long c) {
  auto ok = allowed_shifts(n, p);
  if (!std::binary_search(ok.begin(), ok.end(), fp(c, p).v)) return std::nullopt;
  auto f = chebyshev_coeffs(n, p);
  f[0] = fp(f[0] - c, p).v;
  // deflate roots with multiplicity
  std::vector<long> roots;
  std::vector<long> cur = f;
  for (long r = 0; r < p && cur.size() > 1;) {
    if (poly_eval(cur, r, p) == 0) {
      // synthetic division by (x - r)
      std::vector<long> q(cur.size() - 1);
      long carry = cur.back();
      for (int i = (int)cur.size() - 2; i >= 0; i--) {
        q[i] = carry;
        carry = fp(cur[i] + carry * r, p).v;
      }
      cur = std::move(q);
      roots.push_back(r);
    } else {
      r++;
    }
  }
  if ((int)roots.size() != n)
    throw std::runtime_error("shifted polynomial did not split despite admissible shift");
  std::sort(roots.begin(), roots.end());
  return roots;
}

// ---- local solutions ----

static std::vector<long> neg_sorted(const std::vector<long>& a, long p) {
  std::vector<long> r;
  r.reserve(a.size());
  for (long x : a) r.push_back(x ? p - x : 0);
  std::sort(r.begin(), r.end());
  return r;
}

static bool moments_vanish_odd(const std::vector<long>& A, int n, long p) {
  for (int k = 1; k <= n - 2; k += 2) {
    FpElem s{0, p};
    for (long a : A) s = add(s, pow(fp(a, p), k));
    if (s.v != 0) return false;
  }
  return true;
}

static bool moments_match_even(const std::vector<long>& A, const std::vector<long>& B, int n,
                               long p) {
  for (int k = 2; k <= n - 2; k += 2) {
    FpElem sa{0, p}, sb{0, p};
    for (long a : A) sa = add(sa, pow(fp(a, p), k));
    for (long b : B) sb = add(sb, pow(fp(b, p), k));
    if (sa.v != sb.v) return false;
  }
  return true;
}

bool local_ok(const LocalSolution& s) {
  if ((int)s.A.size() != s.n || (int)s.B.size() != s.n) return false;
  if (!std::is_sorted(s.A.begin(), s.A.end()) || !std::is_sorted(s.B.begin(), s.B.end()))
    return false;
  for (long x : s.A)
    if (x < 0 || x >= s.p) return false;
  if (s.kind == LocalKind::odd_symmetric) {
    if (s.n % 2 == 0) return false;
    if (s.B != neg_sorted(s.A, s.p)) return false;
    if (s.A == s.B) return false;  // A = -A excluded
    return moments_vanish_odd(s.A, s.n, s.p);
  }
  if (s.n % 2 != 0) return false;
  if (s.A != neg_sorted(s.A, s.p) || s.B != neg_sorted(s.B, s.p)) return false;
  if (s.A == s.B) return false;
  return moments_match_even(s.A, s.B, s.n, s.p);
}

std::string to_string(const LocalSolution& s) {
  auto j = [](const std::vector<long>& v) {
    std::string out = "{";
    for (size_t i = 0; i < v.size(); i++) {
      if (i) out += ",";
      out += std::to_string(v[i]);
    }
    return out + "}";
  };
  return "n=" + std::to_string(s.n) + " p=" + std::to_string(s.p) + " A=" + j(s.A) +
         " B=" + j(s.B);
}

static LocalSolution make_odd(int n, long p, std::vector<long> A) {
  std::sort(A.begin(), A.end());
  LocalSolution s;
  s.n = n;
  s.p = p;
  s.B = neg_sorted(A, p);
  s.A = std::move(A);
  s.kind = LocalKind::odd_symmetric;
  return s;
}

std::vector<LocalSolution> construct_odd_local(int n, long p) {
  if (n % 2 == 0) throw std::invalid_argument("construct_odd_local: n must be odd");
  if (p % n != 1 && p % n != n - 1)
    throw std::invalid_argument("construct_odd_local: p must be +-1 mod n");
  std::vector<LocalSolution> out;
  if (p % n == 1) {
    // the order-n subgroup of the multiplicative group
    for (long a = 2; a < p; a++) {
      if (order(a, p) != n) continue;
      std::vector<long> A;
      FpElem x{1 % p, p};
      for (int i = 0; i < n; i++) {
        A.push_back(x.v);
        x = mul(x, fp(a, p));
      }
      auto s = make_odd(n, p, std::move(A));
      if (local_ok(s)) out.push_back(s);
      break;  // all order-n elements generate the same subgroup
    }
  }
  if (p > n + 1) {
    auto roots = chebyshev_shift_roots(n, p, 1);
    if (roots) {
      auto s = make_odd(n, p, *roots);
      if (local_ok(s)) out.push_back(s);
    }
  }
  return out;
}

std::vector<LocalSolution> construct_even_local(int n, long p) {
  if (n % 2 != 0) throw std::invalid_argument("construct_even_local: n must be even");
  std::vector<LocalSolution> out;
  if ((p % n == 1 || p % n == n - 1) && p > n + 1) {
    auto cs = allowed_shifts(n, p);
    for (size_t i = 0; i < cs.size(); i++) {
      for (size_t j = i + 1; j < cs.size(); j++) {
        auto ra = chebyshev_shift_roots(n, p, cs[i]);
        auto rb = chebyshev_shift_roots(n, p, cs[j]);
        if (!ra || !rb) continue;
        LocalSolution s;
        s.n = n;
        s.p = p;
        s.A = *ra;
        s.B = *rb;
        s.kind = LocalKind::even_symmetric;
        if (s.B < s.A) std::swap(s.A, s.B);
        if (local_ok(s)) out.push_back(s);
      }
    }
  }
  if (p % n == 1) {
    long a = 0;
    for (long t = 2; t < p; t++)
      if (order(t, p) == n) {
        a = t;
        break;
      }
    if (a) {
      std::vector<long> A;
      FpElem x{1 % p, p};
      std::set<long> subgroup;
      for (int i = 0; i < n; i++) {
        A.push_back(x.v);
        subgroup.insert(x.v);
        x = mul(x, fp(a, p));
      }
      std::sort(A.begin(), A.end());
      // scale factors: 0, plus the smallest representative of each coset
      // other than the subgroup itself
      std::vector<long> svals{0};
      std::set<long> seen(subgroup);
      for (long s = 2; s < p; s++) {
        if (seen.count(s)) continue;
        svals.push_back(s);
        for (long g : subgroup) seen.insert(mul(fp(s, p), fp(g, p)).v);
      }
      for (long s : svals) {
        LocalSolution L;
        L.n = n;
        L.p = p;
        L.A = A;
        L.kind = LocalKind::even_symmetric;
        for (long g : A) L.B.push_back(mul(fp(s, p), fp(g, p)).v);
        std::sort(L.B.begin(), L.B.end());
        if (local_ok(L)) out.push_back(L);
      }
    }
  }
  return out;
}

// ---- enumeration ----

static std::vector<long> scaled_sorted(const std::vector<long>& A, long s, long p) {
  std::vector<long> r;
  r.reserve(A.size());
  for (long a : A) r.push_back(mul(fp(a, p), fp(s, p)).v);
  std::sort(r.begin(), r.end());
  return r;
}

static std::vector<long> canonical_odd_class(const std::vector<long>& A, long p) {
  std::vector<long> best;
  for (long a : A) {
    if (a == 0) continue;
    auto cand = scaled_sorted(A, inv(fp(a, p)).v, p);
    if (best.empty() || cand < best) best = cand;
  }
  return best;
}

static std::pair<std::vector<long>, std::vector<long>> canonical_even_class(
    const std::vector<long>& A, const std::vector<long>& B, long p) {
  std::pair<std::vector<long>, std::vector<long>> best;
  bool have = false;
  auto consider = [&](const std::vector<long>& X, const std::vector<long>& Y) {
    bool xzero = std::all_of(X.begin(), X.end(), [](long v) { return v == 0; });
    for (long e : (xzero ? Y : X)) {
      if (e == 0) continue;
      long s = inv(fp(e, p)).v;
      std::pair<std::vector<long>, std::vector<long>> cand{scaled_sorted(X, s, p),
                                                           scaled_sorted(Y, s, p)};
      if (!have || cand < best) {
        best = cand;
        have = true;
      }
    }
  };
  consider(A, B);
  consider(B, A);
  return best;
}

namespace {

struct OddEnumCtx {
  int n;
  long p;
  std::vector<std::vector<long>> powtab;  // powtab[x][j] = x^(2j+1) mod p
  std::set<std::vector<long>> found;
};

void odd_note(OddEnumCtx& c, const std::vector<long>& A) {
  // verify the non-moment constraints, then canonicalize the scaling class
  std::vector<int> cnt(c.p, 0);
  for (long a : A) cnt[a]++;
  for (long a : A)
    if (cnt[a ? c.p - a : 0]) return;
  c.found.insert(canonical_odd_class(A, c.p));
}

// exhaustive DFS over sorted multisets containing 1
void odd_dfs(OddEnumCtx& c, std::vector<long>& A, std::vector<long>& msum,
             std::vector<int>& cnt, long lo) {
  if ((int)A.size() == c.n) {
    for (long m : msum)
      if (m % c.p != 0) return;
    odd_note(c, A);
    return;
  }
  for (long x = lo; x < c.p; x++) {
    if (cnt[c.p - x]) continue;  // keep A and -A disjoint
    cnt[x]++;
    A.push_back(x);
    for (size_t j = 0; j < msum.size(); j++) msum[j] += c.powtab[x][j];
    odd_dfs(c, A, msum, cnt, x);
    for (size_t j = 0; j < msum.size(); j++) msum[j] -= c.powtab[x][j];
    A.pop_back();
    cnt[x]--;
  }
}

// enumerate sorted multisets of given size over values in [lo, hi] avoiding
// negation pairs internally, reporting each with its odd-moment vector
void half_dfs(const OddEnumCtx& c, long lo, long hi, int size, std::vector<long>& cur,
              std::vector<long>& msum, std::vector<int>& cnt,
              const std::function<void(const std::vector<long>&, const std::vector<long>&)>& emit) {
  if ((int)cur.size() == size) {
    emit(cur, msum);
    return;
  }
  long start = cur.empty() ? lo : std::max(lo, cur.back());
  for (long x = start; x <= hi; x++) {
    if (x == 0 || cnt[c.p - x]) continue;
    cnt[x]++;
    cur.push_back(x);
    for (size_t j = 0; j < msum.size(); j++) msum[j] = fp(msum[j] + c.powtab[x][j], c.p).v;
    half_dfs(c, lo, hi, size, cur, msum, cnt, emit);
    for (size_t j = 0; j < msum.size(); j++) msum[j] = fp(msum[j] - c.powtab[x][j], c.p).v;
    cur.pop_back();
    cnt[x]--;
  }
}

}  // namespace

static std::vector<LocalSolution> enumerate_local_odd(int n, long p, EnumMethod method,
                                                      std::optional<EnumBounds> bounds) {
  OddEnumCtx c;
  c.n = n;
  c.p = p;
  long ord2 = order(2 % p, p);
  int nm = (n - 1) / 2;  // number of odd moments 1,3,...,n-2
  c.powtab.assign(p, std::vector<long>(nm, 0));
  for (long x = 0; x < p; x++)
    for (int j = 0; j < nm; j++) c.powtab[x][j] = pow(fp(x, p), 2 * j + 1).v;

  // seeded test with the powers of 2 when ord_p(2) divides n
  if (n % ord2 == 0) {
    std::vector<long> A;
    FpElem x{1 % p, p};
    for (int i = 0; i < n; i++) {
      A.push_back(x.v);
      x = mul(x, fp(2, p));
    }
    std::sort(A.begin(), A.end());
    if (moments_vanish_odd(A, n, p)) odd_note(c, A);
  }

  if (method == EnumMethod::exhaustive) {
    std::vector<long> A{1}, msum(nm, 0);
    std::vector<int> cnt(p, 0);
    cnt[1] = 1;
    for (int j = 0; j < nm; j++) msum[j] = c.powtab[1][j];
    odd_dfs(c, A, msum, cnt, 1);
  } else {
    int szC = n / 2, szD = n - szC;
    long hiC = bounds ? bounds->maxC : p - 1;
    long loD = bounds ? bounds->minD : 1;
    std::map<std::vector<long>, std::vector<std::vector<long>>> table;
    {
      std::vector<long> cur, msum(nm, 0);
      std::vector<int> cnt(p, 0);
      half_dfs(c, 1, hiC, szC, cur, msum, cnt,
               [&](const std::vector<long>& C, const std::vector<long>& m) {
                 table[m].push_back(C);
               });
    }
    std::vector<long> cur, msum(nm, 0);
    std::vector<int> cnt(p, 0);
    half_dfs(c, loD, p - 1, szD, cur, msum, cnt,
             [&](const std::vector<long>& D, const std::vector<long>& m) {
               auto it = table.find(m);
               if (it == table.end()) return;
               for (const auto& C : it->second) {
                 // A = C u -D must avoid internal negation pairs
                 std::vector<long> A = C;
                 for (long d : D) A.push_back(d ? p - d : 0);
                 std::sort(A.begin(), A.end());
                 if (moments_vanish_odd(A, n, p)) odd_note(c, A);
               }
             });
  }

  std::vector<LocalSolution> out;
  for (const auto& A : c.found) {
    auto s = make_odd(n, p, A);
    if (local_ok(s)) out.push_back(s);
  }
  return out;
}

namespace {

// halves for even n: representatives in [0, (p-1)/2], A = reps u -reps
void even_half_dfs(int size, long p, int nm, const std::vector<std::vector<long>>& powtab,
                   std::vector<long>& cur, std::vector<long>& msum,
                   const std::function<void(const std::vector<long>&, const std::vector<long>&)>& emit,
                   long lo, long hi) {
  if ((int)cur.size() == size) {
    emit(cur, msum);
    return;
  }
  long start = cur.empty() ? lo : std::max(lo, cur.back());
  for (long x = start; x <= hi; x++) {
    cur.push_back(x);
    for (int j = 0; j < nm; j++) msum[j] = fp(msum[j] + powtab[x][j], p).v;
    even_half_dfs(size, p, nm, powtab, cur, msum, emit, lo, hi);
    for (int j = 0; j < nm; j++) msum[j] = fp(msum[j] - powtab[x][j], p).v;
    cur.pop_back();
  }
}

std::vector<long> pm_expand(const std::vector<long>& reps, long p) {
  std::vector<long> out;
  for (long r : reps) {
    out.push_back(r);
    out.push_back(r ? p - r : 0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

static std::vector<LocalSolution> enumerate_local_even(int n, long p, EnumMethod method,
                                                       std::optional<EnumBounds> bounds) {
  int h = n / 2;
  int nm = (n - 2) / 2;  // even moments 2,4,...,n-2
  std::vector<std::vector<long>> powtab(p, std::vector<long>(nm, 0));
  for (long x = 0; x < p; x++)
    for (int j = 0; j < nm; j++) powtab[x][j] = pow(fp(x, p), 2 * (j + 1)).v;
  long half = (p - 1) / 2;
  long hiC = bounds ? std::min(bounds->maxC, half) : half;
  long loD = bounds ? bounds->minD : 0;

  std::set<std::pair<std::vector<long>, std::vector<long>>> found;
  auto note = [&](const std::vector<long>& C, const std::vector<long>& D) {
    // disjoint representative multisets
    size_t i = 0, j = 0;
    while (i < C.size() && j < D.size()) {
      if (C[i] == D[j]) return;
      C[i] < D[j] ? i++ : j++;
    }
    found.insert(canonical_even_class(pm_expand(C, p), pm_expand(D, p), p));
  };

  if (method == EnumMethod::exhaustive) {
    std::vector<std::vector<long>> all;
    std::vector<std::vector<long>> moms;
    std::vector<long> cur, msum(nm, 0);
    even_half_dfs(h, p, nm, powtab, cur, msum,
                  [&](const std::vector<long>& C, const std::vector<long>& m) {
                    all.push_back(C);
                    moms.push_back(m);
                  },
                  0, half);
    for (size_t i = 0; i < all.size(); i++)
      for (size_t j = i + 1; j < all.size(); j++)
        if (moms[i] == moms[j]) note(all[i], all[j]);
  } else {
    std::map<std::vector<long>, std::vector<std::vector<long>>> table;
    std::vector<long> cur, msum(nm, 0);
    even_half_dfs(h, p, nm, powtab, cur, msum,
                  [&](const std::vector<long>& C, const std::vector<long>& m) {
                    table[m].push_back(C);
                  },
                  0, hiC);
    std::vector<long> cur2, msum2(nm, 0);
    even_half_dfs(h, p, nm, powtab, cur2, msum2,
                  [&](const std::vector<long>& D, const std::vector<long>& m) {
                    auto it = table.find(m);
                    if (it == table.end()) return;
                    for (const auto& C : it->second)
                      if (C != D) note(C, D);
                  },
                  loD, half);
  }

  std::vector<LocalSolution> out;
  for (const auto& [A, B] : found) {
    LocalSolution s;
    s.n = n;
    s.p = p;
    s.A = A;
    s.B = B;
    s.kind = LocalKind::even_symmetric;
    if (local_ok(s)) out.push_back(s);
  }
  return out;
}

std::vector<LocalSolution> enumerate_local(int n, long p, EnumMethod method,
                                           std::optional<EnumBounds> bounds) {
  auto out = n % 2 ? enumerate_local_odd(n, p, method, bounds)
                   : enumerate_local_even(n, p, method, bounds);
  std::sort(out.begin(), out.end(), [](const LocalSolution& a, const LocalSolution& b) {
    return std::tie(a.A, a.B) < std::tie(b.A, b.B);
  });
  return out;
}

// ---- multiplicity certificates ----

namespace {

struct MSearch {
  int n;
  long p;
  int W;        // free window size = p - n
  long budget;  // total L1 allowed
  long winBudget;
  std::vector<long> step;               // v(a+W) = sum step[i] * v(a+i), reduced
  std::vector<long> win;                // balanced window values
  std::vector<std::vector<long>> psum;  // per-depth partial sums for forced values
  std::vector<std::vector<int8_t>>* out;
  long bestSeen;

  void leaf(long winL1) {
    int forced = (int)p - W;
    std::vector<long> v(p);
    for (int i = 0; i < W; i++) v[i] = win[i];
    long total = winL1;
    const auto& P = psum[W];
    for (int k = 0; k < forced; k++) {
      long s = P[k];
      for (int m = std::max(0, k - W); m < k; m++) s += step[m - k + W] * v[W + m];
      long b = balanced(fp(s, p));
      v[W + k] = b;
      total += std::abs(b);
      if (total > budget) return;
    }
    std::vector<int8_t> sol(p);
    for (int i = 0; i < (int)p; i++) sol[i] = (int8_t)v[i];
    out->push_back(std::move(sol));
    bestSeen = std::min(bestSeen, total);
  }

  void dfs(int depth, long winL1) {
    if (depth == W) {
      leaf(winL1);
      return;
    }
    int forced = (int)p - W;
    long rem = winBudget - winL1;
    for (long a = -rem; a <= rem; a++) {
      win[depth] = a;
      auto& nxt = psum[depth + 1];
      nxt = psum[depth];
      for (int k = 0; k <= std::min(depth, forced - 1); k++)
        nxt[k] += step[depth - k] * a;
      dfs(depth + 1, winL1 + std::abs(a));
    }
  }
};

}  // namespace

MultiplicityCertificate multiplicity_search(int n, long p) {
  if (p <= n) throw std::invalid_argument("multiplicity_search: p > n required");
  if (p - n > 16) throw std::runtime_error("multiplicity_search: window too large for search");
  int D = (int)p - n - 1;  // required degree of h
  int W = D + 1;
  int forced = (int)p - W;
  // v(a+W) determined by vanishing of the W-th finite difference:
  // coefficient of v(a+i) is -(-1)^(W-i) C(W,i)
  std::vector<long> step(W);
  {
    // C(W, i) mod p
    std::vector<long> binom(W + 1, 0);
    binom[0] = 1;
    for (int r = 1; r <= W; r++)
      for (int i = r; i > 0; i--) binom[i] = fp(binom[i] + binom[i - 1], p).v;
    for (int i = 0; i < W; i++) {
      long c = binom[i];
      step[i] = fp(((W - i) % 2 == 0) ? -c : c, p).v;  // -(-1)^(W-i) C(W,i)
    }
  }

  for (long budget = 2L * n; budget <= 4L * n + 8; budget++) {
    std::vector<std::vector<int8_t>> raw;
    MSearch ms;
    ms.n = n;
    ms.p = p;
    ms.W = W;
    ms.budget = budget;
    ms.winBudget = (long)(W * budget / p);
    ms.step = step;
    ms.win.assign(W, 0);
    ms.psum.assign(W + 1, std::vector<long>(forced, 0));
    ms.out = &raw;
    ms.bestSeen = budget + 1;
    ms.dfs(0, 0);

    // close under the substitutions x -> x + t, which rotate the value
    // vector, then keep only functions of degree exactly D
    std::set<std::vector<long>> candidates;
    for (const auto& sol : raw) {
      for (long t = 0; t < p; t++) {
        std::vector<long> vals(p);
        for (long a = 0; a < p; a++) vals[a] = fp(sol[(a + t) % p], p).v;
        candidates.insert(std::move(vals));
      }
    }
    long minL1 = budget + 1;
    std::vector<std::pair<std::vector<long>, long>> graded;  // (coeffs, L1)
    for (const auto& vals : candidates) {
      long L1 = 0;
      for (long v : vals) L1 += std::abs(balanced(fp(v, p)));
      if (L1 > budget) continue;
      auto coeffs = interpolate_values(vals, p);
      int deg = -1;
      for (int i = (int)coeffs.size() - 1; i >= 0; i--)
        if (coeffs[i] != 0) {
          deg = i;
          break;
        }
      if (deg != D) continue;
      graded.push_back({coeffs, L1});
      minL1 = std::min(minL1, L1);
    }
    if (graded.empty()) continue;

    MultiplicityCertificate cert;
    cert.n = n;
    cert.p = p;
    cert.minL1 = minL1;
    for (const auto& [coeffs, L1] : graded) {
      if (L1 != minL1) continue;
      // translations fix the next-to-leading coefficient to zero; scaling
      // and negation fix the linear coefficient to 0 or 1
      if (D >= 1 && coeffs[D - 1] != 0) continue;
      if (coeffs.size() > 1 && coeffs[1] != 0 && coeffs[1] != 1) continue;
      std::vector<long> bal;
      for (long cv : coeffs) bal.push_back(balanced(fp(cv, p)));
      while (bal.size() > 1 && bal.back() == 0) bal.pop_back();
      cert.minimizers.push_back(bal);
    }
    if (cert.minimizers.empty()) {
      // fall back to unnormalized minimizers if none hits the normalization
      for (const auto& [coeffs, L1] : graded) {
        if (L1 != minL1) continue;
        std::vector<long> bal;
        for (long cv : coeffs) bal.push_back(balanced(fp(cv, p)));
        while (bal.size() > 1 && bal.back() == 0) bal.pop_back();
        cert.minimizers.push_back(bal);
      }
    }
    std::sort(cert.minimizers.begin(), cert.minimizers.end());
    cert.minimizerCount = (long)cert.minimizers.size();
    cert.witness = cert.minimizers.front();
    cert.provesDivisibility = minL1 > 2L * n;
    return cert;
  }
  throw std::runtime_error("multiplicity_search: no certificate within budget cap");
}

}  // namespace pte::modp
