#include "pte/zsearch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "pte/divisors.hpp"
#include "pte/fnpoly.hpp"

namespace pte::zsearch {

namespace {

long imod(long v, long m) {
  long x = v % m;
  return x < 0 ? x + m : x;
}

int total_selections(int n, Mode mode) {
  return mode == Mode::odd ? (n + 3) / 2 : n / 2 + 2;
}

int moment_dim(int n, Mode mode) { return mode == Mode::odd ? (n - 1) / 2 : n / 2 - 1; }

int weight(int i, Mode mode) { return mode == Mode::odd ? 2 * i + 1 : 2 * i + 2; }

// selection type in even mode: position 0,2,4,... picks an a, odd positions a b
bool is_b_selection(int pos) { return pos % 2 == 1; }

std::string serialize_config(const SearchConfigZ& c) {
  std::string s = "n=" + std::to_string(c.n) + ";H=" + std::to_string(c.H) +
                  ";p1=" + std::to_string(c.p1) + ";p2=" + std::to_string(c.p2) + ";q=";
  for (long q : c.qList) s += std::to_string(q) + ",";
  s += ";r=" + std::to_string(c.r) + ";M1=" + std::to_string(c.M1) +
       ";M2=" + std::to_string(c.M2) + ";mode=" + (c.mode == Mode::odd ? "odd" : "even");
  if (c.poolPrime) {
    s += ";pool=" + std::to_string(c.poolPrime) + ":";
    for (long v : c.poolA) s += std::to_string(v) + ",";
    s += "/";
    for (long v : c.poolB) s += std::to_string(v) + ",";
  }
  return s;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// polynomial helpers (dense, ascending coefficients)

mpz_class poly_eval_z(const std::vector<mpz_class>& p, const mpz_class& x) {
  mpz_class acc = 0;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

// divide p by (x - root) assuming exact divisibility
std::vector<mpz_class> deflate(const std::vector<mpz_class>& p, const mpz_class& root) {
  std::vector<mpz_class> q(p.size() - 1);
  mpz_class carry = p.back();
  for (size_t i = p.size() - 1; i-- > 0;) {
    q[i] = carry;
    carry = p[i] + carry * root;
  }
  if (carry != 0) throw std::logic_error("deflate: not a root");
  return q;
}

void make_primitive(std::vector<mpz_class>& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
  mpz_class g = 0;
  for (const auto& c : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g > 1)
    for (auto& c : p) c /= g;
  if (p.back() < 0)
    for (auto& c : p) c = -c;
}

std::vector<mpz_class> derivative(const std::vector<mpz_class>& p) {
  std::vector<mpz_class> d;
  for (size_t i = 1; i < p.size(); i++) d.push_back(p[i] * (long)i);
  if (d.empty()) d.push_back(0);
  return d;
}

bool square_free(const std::vector<mpz_class>& p) {
  // gcd(p, p') has degree 0 iff p is square-free; pseudo-remainder sequence
  std::vector<mpq_class> a(p.begin(), p.end());
  auto d = derivative(p);
  std::vector<mpq_class> b(d.begin(), d.end());
  while (true) {
    while (b.size() > 1 && b.back() == 0) b.pop_back();
    if (b.size() == 1) return b[0] != 0;
    // a mod b
    std::vector<mpq_class> rem = a;
    while (rem.size() >= b.size()) {
      while (rem.size() > 1 && rem.back() == 0) rem.pop_back();
      if (rem.size() < b.size()) break;
      mpq_class f = rem.back() / b.back();
      size_t off = rem.size() - b.size();
      for (size_t i = 0; i < b.size(); i++) rem[off + i] -= f * b[i];
      rem.pop_back();
    }
    if (rem.empty()) rem.push_back(0);
    a = b;
    b = rem;
  }
}

// exact interpolation through (nodes[j], values[j]); ascending coefficients
std::vector<mpq_class> interpolate_q(const std::vector<mpz_class>& nodes,
                                     const std::vector<mpq_class>& values) {
  size_t m = nodes.size();
  std::vector<mpq_class> coef(m, 0);
  for (size_t j = 0; j < m; j++) {
    // Lagrange basis numerator prod_{i != j} (x - nodes[i]) and denominator
    std::vector<mpz_class> nj{1};
    mpz_class den = 1;
    for (size_t i = 0; i < m; i++) {
      if (i == j) continue;
      den *= nodes[j] - nodes[i];
      std::vector<mpz_class> next(nj.size() + 1, 0);
      for (size_t t = 0; t < nj.size(); t++) {
        next[t + 1] += nj[t];
        next[t] -= nj[t] * nodes[i];
      }
      nj = next;
    }
    mpq_class scale = values[j] / mpq_class(den);
    for (size_t t = 0; t < nj.size(); t++) coef[t] += scale * mpq_class(nj[t]);
  }
  return coef;
}

// clear denominators and normalize to a primitive polynomial with positive
// leading coefficient
std::vector<mpz_class> to_primitive_z(const std::vector<mpq_class>& coef) {
  mpz_class l = 1;
  for (auto c0 : coef) {
    mpq_class c = c0;
    c.canonicalize();
    mpz_class den = c.get_den();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
    l = l / g * den;
  }
  std::vector<mpz_class> out(coef.size());
  for (size_t i = 0; i < coef.size(); i++) {
    mpq_class c = coef[i] * mpq_class(l);
    c.canonicalize();
    out[i] = c.get_num();
  }
  make_primitive(out);
  return out;
}

// substitute x -> x + t
std::vector<mpz_class> shift_poly(const std::vector<mpz_class>& p, long t) {
  std::vector<mpz_class> out(p.size(), 0);
  for (size_t i = p.size(); i-- > 0;) {
    // out = out * (x + t) + p[i]
    for (size_t j = out.size(); j-- > 1;) out[j] = out[j - 1] + out[j] * t;
    out[0] = out[0] * t + p[i];
  }
  return out;
}

// substitute x -> -x and normalize the leading sign
std::vector<mpz_class> negate_variable(const std::vector<mpz_class>& p) {
  std::vector<mpz_class> out = p;
  for (size_t i = 1; i < out.size(); i += 2) out[i] = -out[i];
  if (out.back() < 0)
    for (auto& c : out) c = -c;
  return out;
}

// all real roots of p (doubles), found by recursive derivative subdivision
std::vector<double> real_roots(const std::vector<double>& p) {
  auto eval = [&](const std::vector<double>& f, double x) {
    double acc = 0;
    for (size_t i = f.size(); i-- > 0;) acc = acc * x + f[i];
    return acc;
  };
  std::vector<double> f = p;
  while (f.size() > 1 && f.back() == 0) f.pop_back();
  if (f.size() <= 1) return {};
  if (f.size() == 2) return {-f[0] / f[1]};
  std::vector<double> d;
  for (size_t i = 1; i < f.size(); i++) d.push_back(f[i] * (double)i);
  auto crit = real_roots(d);
  double bound = 1;
  for (size_t i = 0; i + 1 < f.size(); i++)
    bound = std::max(bound, 1 + std::fabs(f[i] / f.back()));
  std::vector<double> pts{-bound - 1};
  for (double c : crit)
    if (c > pts.back()) pts.push_back(c);
  pts.push_back(bound + 1);
  std::vector<double> roots;
  for (size_t i = 0; i + 1 < pts.size(); i++) {
    double a = pts[i], b = pts[i + 1];
    double fa = eval(f, a), fb = eval(f, b);
    if (fa == 0) roots.push_back(a);
    if (fa * fb > 0) continue;
    for (int it = 0; it < 200; it++) {
      double mid = (a + b) / 2;
      double fm = eval(f, mid);
      if (fm == 0) break;
      if ((fa < 0) == (fm < 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    roots.push_back((a + b) / 2);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) { return std::fabs(x - y) < 1e-12 * (1 + std::fabs(x)); }),
              roots.end());
  return roots;
}

}  // namespace

// ---------------------------------------------------------------------------

void StageStats::add(const StageStats& o) {
  chainPrefixes += o.chainPrefixes;
  rPassed += o.rPassed;
  qPassed += o.qPassed;
  m1Passed += o.m1Passed;
  m2Passed += o.m2Passed;
  exactPassed += o.exactPassed;
  solutionsFound += o.solutionsFound;
  nearMissesFound += o.nearMissesFound;
}

SearchConfigZ default_config(int n, long H) {
  struct Row {
    int n;
    long p1, p2;
    std::vector<long> q;
    long r;
  };
  static const std::vector<Row> rows = {
      {9, 23, 19, {13, 11}, 31},  {10, 29, 23, {17, 13}, 31},
      {11, 31, 29, {19, 17, 13}, 23}, {12, 31, 29, {19, 17, 11}, 23},
      {13, 41, 37, {31, 29, 23}, 19}, {14, 37, 31, {23, 19, 17}, 29},
      {15, 47, 43, {41, 37, 23}, 19}, {16, 53, 43, {41, 37, 29}, 23},
  };
  for (const auto& row : rows) {
    if (row.n != n) continue;
    SearchConfigZ c;
    c.n = n;
    c.H = H;
    c.p1 = row.p1;
    c.p2 = row.p2;
    c.qList = row.q;
    c.r = row.r;
    c.mode = n % 2 ? Mode::odd : Mode::even;
    return c;
  }
  throw std::invalid_argument("no default parameters for n=" + std::to_string(n));
}

std::string config_hash(const SearchConfigZ& cfg) {
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(serialize_config(cfg)));
  return buf;
}

// ---------------------------------------------------------------------------
// chain iterators (reference versions; the engine below uses precomputed lists)

std::vector<long> sieve_chain_odd(const std::vector<long>& prefix, const SearchConfigZ& cfg) {
  std::vector<long> out;
  std::set<long> used;
  for (long v : prefix) used.insert(std::labs(v));
  auto push = [&](long v) {
    if (v != 0 && std::labs(v) <= cfg.H && !used.count(std::labs(v))) out.push_back(v);
  };
  if (prefix.empty()) {
    for (long v = cfg.p1; v <= cfg.H; v += cfg.p1) out.push_back(v);
    return out;
  }
  size_t k = prefix.size();
  long pp = (k % 2 == 1) ? cfg.p2 : cfg.p1;
  long sum = 0;
  for (long v : prefix) sum += v;
  if (imod(sum, pp) == 0) {
    for (long v = -cfg.H; v <= cfg.H; v++) push(v);
  } else {
    long cls = imod(-prefix.back(), pp);
    long start = -cfg.H + imod(cls - (-cfg.H), pp);
    for (long v = start; v <= cfg.H; v += pp) push(v);
  }
  return out;
}

std::vector<long> sieve_chain_even(const std::vector<long>& aSel, const std::vector<long>& bSel,
                                   const SearchConfigZ& cfg) {
  std::vector<long> out;
  std::set<long> used(aSel.begin(), aSel.end());
  used.insert(bSel.begin(), bSel.end());
  auto push_classes = [&](long base, long p) {
    std::set<long> classes{imod(base, p), imod(-base, p)};
    for (long v = 1; v <= cfg.H; v++)
      if (classes.count(v % p) && !used.count(v)) out.push_back(v);
  };
  if (aSel.size() == bSel.size()) {  // next is an a
    if (aSel.empty()) {
      for (long v = 1; v <= cfg.H; v++) out.push_back(v);
      return out;
    }
    long sum = 0;
    for (size_t j = 0; j < bSel.size(); j++)
      sum = imod(sum + aSel[j] * aSel[j] - bSel[j] * bSel[j], cfg.p2);
    if (sum == 0) {
      for (long v = 1; v <= cfg.H; v++)
        if (!used.count(v)) out.push_back(v);
    } else {
      push_classes(bSel.back(), cfg.p2);
    }
  } else {  // next is the b paired with the last a
    push_classes(aSel.back(), cfg.p1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// local completability filters

bool local_filter(const std::vector<long>& prefix, long q, int n) {
  std::vector<int> cnt(q, 0);
  for (long v : prefix) cnt[imod(v, q)]++;
  long deficiency = 0;
  for (long x = 1; 2 * x < q; x++) deficiency += std::labs(cnt[x] - cnt[q - x]);
  return deficiency <= n - (long)prefix.size();
}

bool local_filter_even(const std::vector<long>& aSel, const std::vector<long>& bSel, long q,
                       int n) {
  std::vector<int> ca(q, 0), cb(q, 0);
  for (long v : aSel) ca[std::min(imod(v, q), imod(-v, q))]++;
  for (long v : bSel) cb[std::min(imod(v, q), imod(-v, q))]++;
  long surplusA = 0, surplusB = 0;
  for (long x = 0; 2 * x <= q; x++) {
    surplusA += std::max(0, ca[x] - cb[x]);
    surplusB += std::max(0, cb[x] - ca[x]);
  }
  long slotsA = n / 2 - (long)aSel.size(), slotsB = n / 2 - (long)bSel.size();
  return surplusB <= slotsA && surplusA <= slotsB && slotsA - surplusB == slotsB - surplusA;
}

// ---------------------------------------------------------------------------
// residue table

std::uint64_t ResidueTable::index(const std::vector<long>& m) const {
  std::uint64_t idx = 0;
  for (int i = dim; i-- > 0;) idx = idx * r + (std::uint64_t)imod(m[i], r);
  return idx;
}

bool ResidueTable::contains(const std::vector<long>& m) const {
  std::uint64_t idx = index(m);
  if (hashed) return set.count(idx) != 0;
  return (bits[idx >> 6] >> (idx & 63)) & 1;
}

namespace {

// enumerate all multisets of the given arity over Z/r and hand their moment
// vectors (powers per the mode's weights) to sink
void enum_multiset_moments(long r, int arity, int dim, Mode mode,
                           const std::function<void(const std::vector<long>&)>& sink) {
  std::vector<long> mom(dim, 0);
  std::function<void(int, long)> rec = [&](int left, long minv) {
    if (left == 0) {
      sink(mom);
      return;
    }
    for (long c = minv; c < r; c++) {
      for (int i = 0; i < dim; i++) {
        long pw = 1;
        for (int e = 0; e < weight(i, mode); e++) pw = pw * c % r;
        mom[i] = (mom[i] + pw) % r;
      }
      rec(left - 1, c);
      for (int i = 0; i < dim; i++) {
        long pw = 1;
        for (int e = 0; e < weight(i, mode); e++) pw = pw * c % r;
        mom[i] = imod(mom[i] - pw, r);
      }
    }
  };
  rec(arity, 0);
}

}  // namespace

ResidueTable residue_table(int n, long r) {
  Mode mode = n % 2 ? Mode::odd : Mode::even;
  ResidueTable T;
  T.r = r;
  T.dim = moment_dim(n, mode);
  std::uint64_t size = 1;
  for (int i = 0; i < T.dim; i++) size *= (std::uint64_t)r;
  T.hashed = size > (1ull << 33);
  if (!T.hashed) T.bits.assign((size + 63) / 64, 0);
  auto mark = [&](const std::vector<long>& m) {
    std::uint64_t idx = T.index(m);
    if (T.hashed)
      T.set.insert(idx);
    else
      T.bits[idx >> 6] |= 1ull << (idx & 63);
  };
  int L = total_selections(n, mode);
  if (mode == Mode::odd) {
    // remaining elements: (n-3)/2 of them; record the negated moment vectors
    int rest = n - L;
    enum_multiset_moments(r, rest, T.dim, mode, [&](const std::vector<long>& m) {
      std::vector<long> neg(T.dim);
      for (int i = 0; i < T.dim; i++) neg[i] = imod(-m[i], r);
      mark(neg);
    });
  } else {
    // remaining a's and b's; record the achievable b-rest minus a-rest vectors
    int s = (L + 1) / 2, t = L / 2;
    int restA = n / 2 - s, restB = n / 2 - t;
    std::vector<std::vector<long>> avecs, bvecs;
    enum_multiset_moments(r, restA, T.dim, mode,
                          [&](const std::vector<long>& m) { avecs.push_back(m); });
    enum_multiset_moments(r, restB, T.dim, mode,
                          [&](const std::vector<long>& m) { bvecs.push_back(m); });
    std::vector<long> d(T.dim);
    for (const auto& bv : bvecs)
      for (const auto& av : avecs) {
        for (int i = 0; i < T.dim; i++) d[i] = imod(bv[i] - av[i], r);
        mark(d);
      }
  }
  return T;
}

// ---------------------------------------------------------------------------
// finalization

namespace {

NearMiss build_near_miss(int n, Mode mode, std::vector<long> integers,
                         std::vector<std::vector<mpz_class>> residuals,
                         std::vector<int> sides, std::vector<long> aPart,
                         std::vector<long> bPart) {
  NearMiss nm;
  nm.n = n;
  nm.mode = mode;
  std::sort(integers.begin(), integers.end());
  std::sort(aPart.begin(), aPart.end());
  std::sort(bPart.begin(), bPart.end());
  nm.integerPart = std::move(integers);
  nm.residualPolys = std::move(residuals);
  nm.residualSides = std::move(sides);
  nm.aPart = std::move(aPart);
  nm.bPart = std::move(bPart);
  std::string note;
  for (const auto& E : nm.residualPolys) {
    size_t deg = E.size() - 1;
    if (!note.empty()) note += "; ";
    if (deg == 2) {
      mpz_class disc = E[1] * E[1] - 4 * E[2] * E[0];
      note += (disc < 0 ? "imaginary" : "real");
      note += " quadratic, discriminant " + disc.get_str();
      if (mode == Mode::odd && disc > 0 && mpz_perfect_square_p(disc.get_mpz_t()) == 0) {
        // the printed form: shift by the floor of whichever root has the
        // smaller fractional part, so the shifted root lies near zero
        double e2 = E[2].get_d(), e1 = E[1].get_d(), e0 = E[0].get_d();
        double sq = std::sqrt(e1 * e1 - 4 * e2 * e0);
        double g1 = (-e1 + sq) / (2 * e2), g2 = (-e1 - sq) / (2 * e2);
        double g = (g1 - std::floor(g1) <= g2 - std::floor(g2)) ? g1 : g2;
        nm.alphaForms.push_back(shift_poly(E, (long)std::floor(g)));
      }
    } else {
      note += "degree " + std::to_string(deg) + " residual, " +
              (square_free(E) ? "square-free" : "not square-free");
    }
  }
  nm.fieldNote = note;
  return nm;
}

// extract integer roots with multiplicity; roots are searched among the
// divisor-bounded window [-bound, bound]
std::pair<std::vector<long>, std::vector<mpz_class>> integer_roots(
    std::vector<mpz_class> p, long bound) {
  std::vector<long> roots;
  for (long x = -bound; x <= bound && p.size() > 1; x++) {
    while (p.size() > 1 && poly_eval_z(p, x) == 0) {
      roots.push_back(x);
      p = deflate(p, x);
    }
  }
  make_primitive(p);
  return {roots, p};
}

}  // namespace

FinalizeResult finalize_odd(const std::vector<long>& prefix, int n, long H) {
  int m = (n + 1) / 2;
  if ((int)prefix.size() != m + 1) throw std::invalid_argument("finalize_odd: prefix size");
  FinalizeResult res;
  std::vector<mpz_class> nodes(prefix.begin(), prefix.begin() + m);
  std::vector<mpq_class> values(m);
  for (int j = 0; j < m; j++) {
    mpz_class prod = 1;
    for (int i = 0; i < m; i++) prod *= mpz_class(prefix[i] + prefix[j]);
    if (prod == 0) throw std::logic_error("finalize_odd: degenerate nodes");
    values[j] = mpq_class(1) / mpq_class(prod);
  }
  auto G = to_primitive_z(interpolate_q(nodes, values));
  if ((int)G.size() != m) return res;  // degenerate interpolant
  auto [roots, residual] = integer_roots(G, 4 * H);
  std::vector<long> completions;
  for (long x : roots) completions.push_back(-x);
  long extra = prefix[m];
  if (std::count(completions.begin(), completions.end(), extra) == 0) return res;
  if (residual.size() == 1) {
    // fully integral candidate
    std::vector<long> elems(prefix.begin(), prefix.begin() + m);
    elems.insert(elems.end(), completions.begin(), completions.end());
    std::set<long> absSeen;
    for (long v : elems) {
      if (v == 0 || std::labs(v) > H || !absSeen.insert(std::labs(v)).second) return res;
    }
    MultisetZ A = make_multiset(elems);
    PtePair P = make_pte_pair(A, negated(A));
    if (!P.ideal() || P.symmetry != Symmetry::odd_symmetric) return res;
    res.kind = FinalizeResult::Kind::solution;
    res.solution = canonicalize(P);
    return res;
  }
  if (residual.size() == 2) return res;  // non-integer rational root: dead end
  std::vector<long> integers(prefix.begin(), prefix.begin() + m);
  for (long v : completions)
    if (std::count(integers.begin(), integers.end(), v) == 0) integers.push_back(v);
  res.kind = FinalizeResult::Kind::nearMiss;
  res.nm = build_near_miss(n, Mode::odd, integers, {negate_variable(residual)}, {0},
                           integers, {});
  return res;
}

FinalizeResult finalize_even(const std::vector<long>& aSel, const std::vector<long>& bSel,
                             int n, long H) {
  int s = n / 2 - (n / 4) + 1;        // = ceil(n/4) + 1
  int t = n / 4 + 1;
  if ((int)aSel.size() != s || (int)bSel.size() != t)
    throw std::invalid_argument("finalize_even: selection sizes");
  FinalizeResult res;
  auto side = [&](const std::vector<long>& own, const std::vector<long>& other,
                  int nodesWanted) -> std::pair<std::vector<long>, std::vector<mpz_class>> {
    // interpolate in the squared variable over nodesWanted nodes other[j]^2;
    // roots are the squares of the missing elements on the own side
    std::vector<mpz_class> nodes(nodesWanted);
    std::vector<mpq_class> values(nodesWanted);
    for (int j = 0; j < nodesWanted; j++) {
      mpz_class nj = mpz_class(other[j]) * other[j];
      nodes[j] = nj;
      mpz_class prod = 1;
      for (long a : own) prod *= nj - mpz_class(a) * a;
      if (prod == 0) throw std::logic_error("finalize_even: degenerate nodes");
      values[j] = mpq_class(1) / mpq_class(prod);
    }
    auto G = to_primitive_z(interpolate_q(nodes, values));
    if ((int)G.size() != nodesWanted) return {{}, {mpz_class(0)}};
    // extract perfect-square roots z^2 with z a positive integer
    std::vector<long> found;
    for (long z = 1; z <= 4 * H && G.size() > 1; z++) {
      mpz_class y = mpz_class(z) * z;
      while (G.size() > 1 && poly_eval_z(G, y) == 0) {
        found.push_back(z);
        G = deflate(G, y);
      }
    }
    make_primitive(G);
    return {found, G};
  };
  int ka = n / 2 - s + 1;  // nodes on the b side recover the missing a's
  int kb = n / 2 - t + 1;
  auto [za, Ra] = side(aSel, bSel, ka);
  auto [zb, Rb] = side(bSel, aSel, kb);
  if (Ra.size() == 1 && Ra[0] == 0) return res;  // degenerate interpolant
  if (Rb.size() == 1 && Rb[0] == 0) return res;
  if (Ra.size() == 1 && Rb.size() == 1) {
    std::vector<long> aAll = aSel, bAll = bSel;
    aAll.insert(aAll.end(), za.begin(), za.end());
    bAll.insert(bAll.end(), zb.begin(), zb.end());
    if ((int)aAll.size() != n / 2 || (int)bAll.size() != n / 2) return res;
    std::set<long> seen;
    for (long v : aAll)
      if (v < 1 || v > H || !seen.insert(v).second) return res;
    for (long v : bAll)
      if (v < 1 || v > H || !seen.insert(v).second) return res;
    PtePair P = make_pte_pair(plus_minus(aAll), plus_minus(bAll));
    if (!P.ideal() || P.symmetry != Symmetry::even_symmetric) return res;
    res.kind = FinalizeResult::Kind::solution;
    res.solution = canonicalize(P);
    return res;
  }
  // near miss: residuals live in the squared variable
  std::vector<std::vector<mpz_class>> residuals;
  std::vector<int> sides;
  int sideIdx = 0;
  for (const auto& R : {Ra, Rb}) {
    if (R.size() > 1) {
      std::vector<mpz_class> X(2 * (R.size() - 1) + 1, 0);
      for (size_t i = 0; i < R.size(); i++) X[2 * i] = R[i];
      residuals.push_back(X);
      sides.push_back(sideIdx);
    }
    sideIdx++;
  }
  std::vector<long> integers, aPart = aSel, bPart = bSel;
  aPart.insert(aPart.end(), za.begin(), za.end());
  bPart.insert(bPart.end(), zb.begin(), zb.end());
  for (long v : aPart) {
    integers.push_back(v);
    integers.push_back(-v);
  }
  for (long v : bPart) {
    integers.push_back(v);
    integers.push_back(-v);
  }
  res.kind = FinalizeResult::Kind::nearMiss;
  res.nm = build_near_miss(n, Mode::even, integers, residuals, sides, aPart, bPart);
  return res;
}

// ---------------------------------------------------------------------------
// serialization

nlohmann::json to_json(const NearMiss& nm) {
  nlohmann::json j;
  j["n"] = nm.n;
  j["mode"] = nm.mode == Mode::odd ? "odd" : "even";
  j["integerPart"] = nm.integerPart;
  auto polys = nlohmann::json::array();
  for (const auto& p : nm.residualPolys) {
    auto a = nlohmann::json::array();
    for (const auto& c : p) a.push_back(c.get_str());
    polys.push_back(a);
  }
  j["residualPolys"] = polys;
  auto alphas = nlohmann::json::array();
  for (const auto& p : nm.alphaForms) {
    auto a = nlohmann::json::array();
    for (const auto& c : p) a.push_back(c.get_str());
    alphas.push_back(a);
  }
  j["alphaForms"] = alphas;
  j["fieldNote"] = nm.fieldNote;
  j["aPart"] = nm.aPart;
  j["bPart"] = nm.bPart;
  j["residualSides"] = nm.residualSides;
  return j;
}

NearMiss nearmiss_from_json(const nlohmann::json& j) {
  NearMiss nm;
  nm.n = j["n"];
  nm.mode = j["mode"] == "odd" ? Mode::odd : Mode::even;
  nm.integerPart = j["integerPart"].get<std::vector<long>>();
  for (const auto& a : j["residualPolys"]) {
    std::vector<mpz_class> p;
    for (const auto& c : a) p.push_back(mpz_class(c.get<std::string>()));
    nm.residualPolys.push_back(p);
  }
  for (const auto& a : j["alphaForms"]) {
    std::vector<mpz_class> p;
    for (const auto& c : a) p.push_back(mpz_class(c.get<std::string>()));
    nm.alphaForms.push_back(p);
  }
  nm.fieldNote = j["fieldNote"];
  nm.aPart = j["aPart"].get<std::vector<long>>();
  nm.bPart = j["bPart"].get<std::vector<long>>();
  nm.residualSides = j["residualSides"].get<std::vector<int>>();
  return nm;
}

nlohmann::json to_json(const Checkpoint& c) {
  nlohmann::json j;
  j["configHash"] = c.configHash;
  j["outerIndex"] = c.outerIndex;
  j["done"] = c.done;
  j["stats"] = {{"chainPrefixes", c.stats.chainPrefixes}, {"rPassed", c.stats.rPassed},
                {"qPassed", c.stats.qPassed},             {"m1Passed", c.stats.m1Passed},
                {"m2Passed", c.stats.m2Passed},           {"exactPassed", c.stats.exactPassed},
                {"solutionsFound", c.stats.solutionsFound},
                {"nearMissesFound", c.stats.nearMissesFound}};
  j["solutions"] = c.solutions;
  j["nearMisses"] = c.nearMisses;
  return j;
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  Checkpoint c;
  c.configHash = j["configHash"];
  c.outerIndex = j["outerIndex"];
  c.done = j["done"];
  const auto& s = j["stats"];
  c.stats.chainPrefixes = s["chainPrefixes"];
  c.stats.rPassed = s["rPassed"];
  c.stats.qPassed = s["qPassed"];
  c.stats.m1Passed = s["m1Passed"];
  c.stats.m2Passed = s["m2Passed"];
  c.stats.exactPassed = s["exactPassed"];
  c.stats.solutionsFound = s["solutionsFound"];
  c.stats.nearMissesFound = s["nearMissesFound"];
  c.solutions = j["solutions"].get<std::vector<std::string>>();
  c.nearMisses = j["nearMisses"].get<std::vector<std::string>>();
  return c;
}

// ---------------------------------------------------------------------------
// the search engine

namespace {

std::string pair_key(const PtePair& P) { return to_string(P.A) + "|" + to_string(P.B); }

}  // namespace

nlohmann::json pair_to_json(const PtePair& P) {
  auto enc = [](const MultisetZ& S) {
    auto a = nlohmann::json::array();
    for (const auto& v : S) a.push_back(v.get_str());
    return a;
  };
  return nlohmann::json{{"A", enc(P.A)}, {"B", enc(P.B)}};
}

PtePair pair_from_json(const nlohmann::json& j) {
  auto dec = [](const nlohmann::json& a) {
    MultisetZ S;
    for (const auto& v : a)
      S.push_back(v.is_string() ? mpz_class(v.get<std::string>())
                                : mpz_class(v.get<long>()));
    return S;
  };
  return make_pte_pair(dec(j["A"]), dec(j["B"]));
}

namespace {

struct Engine {
  SearchConfigZ cfg;
  int n, dim, L;
  Mode mode;
  long H, r;
  fnpoly::SparsePoly F;

  // per-value tables (value index: odd mode v+H, even mode v)
  std::vector<std::array<std::uint8_t, 8>> powR;
  std::vector<std::array<std::uint64_t, 8>> pow64;

  ResidueTable finalTable;
  // reachability tables: S[k] holds the moment vectors (mod r) after k
  // selections from which the remaining pipeline can still succeed
  std::vector<std::vector<std::uint64_t>> S;
  std::vector<char> Sbuilt;
  std::vector<std::uint64_t> idxMul;

  // candidate value lists per sieve prime and residue class
  std::vector<std::vector<long>> byP1, byP2;
  std::vector<long> fullList;

  std::vector<char> usedAbs;
  std::vector<long> poolCountA, poolCountB;  // active when cfg.poolPrime != 0

  // incrementally maintained completability state per auxiliary prime q
  struct QState {
    long q = 0;
    std::vector<int> cntA, cntB;  // odd mode uses cntA only (residue counts)
    long def = 0;                 // odd: unmatched +/- residue pairs
    long surA = 0, surB = 0;      // even: per-side +/- class surpluses
  };
  std::vector<QState> qStates;

  // per-depth state
  std::vector<long> vals;
  std::vector<std::array<std::uint8_t, 8>> mom;
  std::vector<std::array<std::uint64_t, 8>> mom64;
  std::vector<long> sum1, sum2;  // chain running sums mod p1 / p2

  StageStats stats;
  std::map<std::string, PtePair>* solutions = nullptr;
  std::map<std::string, NearMiss>* nearMisses = nullptr;

  explicit Engine(const SearchConfigZ& c) : cfg(c) {
    n = cfg.n;
    mode = cfg.mode;
    H = cfg.H;
    r = cfg.r;
    dim = moment_dim(n, mode);
    L = total_selections(n, mode);
    auto built = fnpoly::build_fn(n);
    F = built.second;
    long lo = mode == Mode::odd ? -H : 1;
    auto vindex = [&](long v) { return mode == Mode::odd ? v + H : v; };
    powR.resize(mode == Mode::odd ? 2 * H + 1 : H + 1);
    pow64.resize(powR.size());
    for (long v = lo; v <= H; v++) {
      long c = imod(v, r);
      for (int i = 0; i < dim; i++) {
        long pw = 1;
        std::uint64_t p64 = 1;
        for (int e = 0; e < weight(i, mode); e++) {
          pw = pw * c % r;
          p64 *= (std::uint64_t)(std::int64_t)v;
        }
        powR[vindex(v)][i] = (std::uint8_t)pw;
        pow64[vindex(v)][i] = p64;
      }
    }
    finalTable = residue_table(n, r);
    idxMul.resize(dim);
    std::uint64_t mul = 1;
    for (int i = 0; i < dim; i++) {
      idxMul[i] = mul;
      mul *= (std::uint64_t)r;
    }
    build_reach_tables(mul);
    build_candidates();
    usedAbs.assign(H + 1, 0);
    if (cfg.poolPrime) {
      poolCountA.assign(cfg.poolPrime, 0);
      poolCountB.assign(cfg.poolPrime, 0);
      if (mode == Mode::odd) {
        for (long v : cfg.poolA) poolCountA[v]++;
      } else {
        // capacity per +/- class of the half sets
        std::vector<long> ca(cfg.poolPrime, 0), cb(cfg.poolPrime, 0);
        for (long v : cfg.poolA) ca[v]++;
        for (long v : cfg.poolB) cb[v]++;
        for (long x = 0; 2 * x <= cfg.poolPrime; x++) {
          long y = x == 0 ? 0 : cfg.poolPrime - x;
          poolCountA[x] = x == 0 ? ca[0] / 2 : ca[x];
          poolCountB[x] = x == 0 ? cb[0] / 2 : cb[x];
          (void)y;
        }
      }
    }
    for (long q : cfg.qList) {
      QState qs;
      qs.q = q;
      qs.cntA.assign(q, 0);
      if (mode == Mode::even) qs.cntB.assign(q, 0);
      qStates.push_back(std::move(qs));
    }
    vals.assign(L, 0);
    mom.assign(L + 1, {});
    mom64.assign(L + 1, {});
    sum1.assign(L + 1, 0);
    sum2.assign(L + 1, 0);
  }

  void build_reach_tables(std::uint64_t tableSize) {
    S.assign(L + 1, {});
    Sbuilt.assign(L + 1, 0);
    if (finalTable.hashed) return;  // fall back to direct set queries
    S[L] = finalTable.bits;
    Sbuilt[L] = 1;
    std::uint64_t words = S[L].size();
    for (int k = L - 1; k >= 1; k--) {
      // stop once the deeper table no longer discriminates
      std::uint64_t pop = 0;
      for (std::uint64_t w : S[k + 1]) pop += (std::uint64_t)__builtin_popcountll(w);
      if (pop * 2 > tableSize) break;
      S[k].assign(words, 0);
      bool minus = mode == Mode::even && is_b_selection(k);
      std::vector<long> mvec(dim);
      // precompute the per-residue weight powers
      std::vector<std::array<long, 8>> delta(r);
      for (long c = 0; c < r; c++)
        for (int i = 0; i < dim; i++) {
          long pw = 1;
          for (int e = 0; e < weight(i, mode); e++) pw = pw * c % r;
          delta[c][i] = pw;
        }
      for (std::uint64_t w = 0; w < words; w++) {
        std::uint64_t bitsw = S[k + 1][w];
        while (bitsw) {
          int b = __builtin_ctzll(bitsw);
          bitsw &= bitsw - 1;
          std::uint64_t idx = (w << 6) | (std::uint64_t)b;
          std::uint64_t tmp = idx;
          for (int i = 0; i < dim; i++) {
            mvec[i] = (long)(tmp % (std::uint64_t)r);
            tmp /= (std::uint64_t)r;
          }
          for (long c = 0; c < r; c++) {
            std::uint64_t prev = 0;
            for (int i = 0; i < dim; i++) {
              long x = minus ? imod(mvec[i] + delta[c][i], r) : imod(mvec[i] - delta[c][i], r);
              prev += (std::uint64_t)x * idxMul[i];
            }
            S[k][prev >> 6] |= 1ull << (prev & 63);
          }
        }
      }
      Sbuilt[k] = 1;
    }
  }

  void build_candidates() {
    byP1.assign(cfg.p1, {});
    byP2.assign(cfg.p2, {});
    long lo = mode == Mode::odd ? -H : 1;
    for (long v = lo; v <= H; v++) {
      if (mode == Mode::odd && v == 0) continue;
      byP1[imod(v, cfg.p1)].push_back(v);
      byP2[imod(v, cfg.p2)].push_back(v);
      fullList.push_back(v);
    }
  }

  bool reach_ok(int k, std::uint64_t idx) const {
    if (!Sbuilt[k]) return true;
    return (S[k][idx >> 6] >> (idx & 63)) & 1;
  }

  std::uint64_t moment_index(const std::array<std::uint8_t, 8>& m) const {
    std::uint64_t idx = 0;
    for (int i = 0; i < dim; i++) idx += (std::uint64_t)m[i] * idxMul[i];
    return idx;
  }

  long vindex(long v) const { return mode == Mode::odd ? v + H : v; }

  // pool bookkeeping; returns false if the candidate does not fit
  bool pool_take(int pos, long v) {
    if (!cfg.poolPrime) return true;
    long p = cfg.poolPrime;
    if (mode == Mode::odd) {
      long c = imod(v, p);
      if (poolCountA[c] == 0) return false;
      poolCountA[c]--;
      return true;
    }
    long cls = std::min(imod(v, p), imod(-v, p));
    auto& cnt = is_b_selection(pos) ? poolCountB : poolCountA;
    if (cnt[cls] == 0) return false;
    cnt[cls]--;
    return true;
  }

  void pool_put(int pos, long v) {
    if (!cfg.poolPrime) return;
    long p = cfg.poolPrime;
    if (mode == Mode::odd) {
      poolCountA[imod(v, p)]++;
      return;
    }
    long cls = std::min(imod(v, p), imod(-v, p));
    (is_b_selection(pos) ? poolCountB : poolCountA)[cls]++;
  }

  const std::vector<long>& candidates_odd(int k) const {
    // selections 0..k-1 made; admissible values for position k
    long pp = (k % 2 == 1) ? cfg.p2 : cfg.p1;
    long sum = (pp == cfg.p1) ? sum1[k] : sum2[k];
    if (sum == 0) return fullList;
    long cls = imod(-vals[k - 1], pp);
    return pp == cfg.p1 ? byP1[cls] : byP2[cls];
  }

  void qs_add(int pos, long v) {
    for (auto& qs : qStates) {
      long q = qs.q;
      if (mode == Mode::odd) {
        long c = imod(v, q);
        if (c == 0) {
          qs.cntA[0]++;
          continue;
        }
        long x = std::min(c, q - c), y = q - x;
        qs.def -= std::labs(qs.cntA[x] - qs.cntA[y]);
        qs.cntA[c]++;
        qs.def += std::labs(qs.cntA[x] - qs.cntA[y]);
      } else {
        long cls = std::min(imod(v, q), imod(-v, q));
        bool bsel = is_b_selection(pos);
        auto& mine = bsel ? qs.cntB : qs.cntA;
        auto& other = bsel ? qs.cntA : qs.cntB;
        if (mine[cls] >= other[cls])
          (bsel ? qs.surB : qs.surA)++;
        else
          (bsel ? qs.surA : qs.surB)--;
        mine[cls]++;
      }
    }
  }

  void qs_remove(int pos, long v) {
    for (auto& qs : qStates) {
      long q = qs.q;
      if (mode == Mode::odd) {
        long c = imod(v, q);
        if (c == 0) {
          qs.cntA[0]--;
          continue;
        }
        long x = std::min(c, q - c), y = q - x;
        qs.def -= std::labs(qs.cntA[x] - qs.cntA[y]);
        qs.cntA[c]--;
        qs.def += std::labs(qs.cntA[x] - qs.cntA[y]);
      } else {
        long cls = std::min(imod(v, q), imod(-v, q));
        bool bsel = is_b_selection(pos);
        auto& mine = bsel ? qs.cntB : qs.cntA;
        auto& other = bsel ? qs.cntA : qs.cntB;
        mine[cls]--;
        if (mine[cls] >= other[cls])
          (bsel ? qs.surB : qs.surA)--;
        else
          (bsel ? qs.surA : qs.surB)++;
      }
    }
  }

  bool q_ok(int count) const {
    if (mode == Mode::odd) {
      for (const auto& qs : qStates)
        if (qs.def > n - count) return false;
      return true;
    }
    long slotsA = n / 2 - (count + 1) / 2, slotsB = n / 2 - count / 2;
    for (const auto& qs : qStates)
      if (qs.surB > slotsA || qs.surA > slotsB) return false;
    return true;
  }

  void descend(int k, long v) {
    vals[k] = v;
    usedAbs[std::labs(v)] = 1;
    qs_add(k, v);
    const auto& pr = powR[vindex(v)];
    const auto& p6 = pow64[vindex(v)];
    bool minus = mode == Mode::even && is_b_selection(k);
    for (int i = 0; i < dim; i++) {
      long x = mom[k][i] + (minus ? r - pr[i] : pr[i]);
      if (x >= r) x -= r;
      mom[k + 1][i] = (std::uint8_t)x;
      mom64[k + 1][i] = minus ? mom64[k][i] - p6[i] : mom64[k][i] + p6[i];
    }
    if (mode == Mode::odd) {
      sum1[k + 1] = imod(sum1[k] + v, cfg.p1);
      sum2[k + 1] = imod(sum2[k] + v, cfg.p2);
    } else {
      long d = minus ? -v * v : v * v;
      sum1[k + 1] = imod(sum1[k] + d, cfg.p1);
      sum2[k + 1] = imod(sum2[k] + d, cfg.p2);
    }
  }

  void ascend(int k) {
    usedAbs[std::labs(vals[k])] = 0;
    qs_remove(k, vals[k]);
  }

  void record(const FinalizeResult& f) {
    if (f.kind == FinalizeResult::Kind::solution) {
      std::string key = pair_key(f.solution);
      if (solutions->emplace(key, f.solution).second) stats.solutionsFound++;
    } else if (f.kind == FinalizeResult::Kind::nearMiss) {
      std::string key = to_json(f.nm).dump();
      if (nearMisses->emplace(key, f.nm).second) stats.nearMissesFound++;
    }
  }

  void final_candidate(long v) {
    stats.chainPrefixes++;
    int k = L - 1;
    const auto& pr = powR[vindex(v)];
    bool minus = mode == Mode::even && is_b_selection(k);
    std::array<std::uint8_t, 8> mfin{};
    std::uint64_t idx = 0;
    for (int i = 0; i < dim; i++) {
      long x = mom[k][i] + (minus ? r - pr[i] : pr[i]);
      if (x >= r) x -= r;
      mfin[i] = (std::uint8_t)x;
      idx += (std::uint64_t)x * idxMul[i];
    }
    if (finalTable.hashed ? !finalTable.set.count(idx)
                          : !((finalTable.bits[idx >> 6] >> (idx & 63)) & 1))
      return;
    stats.rPassed++;
    vals[k] = v;
    qs_add(k, v);
    bool qok = q_ok(L);
    qs_remove(k, v);
    if (!qok) return;
    stats.qPassed++;
    // filter polynomial mod 2^50
    const auto& p6 = pow64[vindex(v)];
    std::vector<std::int64_t> x64(dim);
    for (int i = 0; i < dim; i++)
      x64[i] = (std::int64_t)(minus ? mom64[k][i] - p6[i] : mom64[k][i] + p6[i]);
    if (fnpoly::eval_fn_mod2_50(F, x64) != 0) return;
    stats.m1Passed++;
    // ... mod M2
    std::vector<std::int64_t> xm(dim, 0);
    long M2 = (long)cfg.M2;
    for (int i = 0; i < dim; i++) {
      long acc = 0;
      for (int t = 0; t < L; t++) {
        long c = imod(vals[t], M2);
        long pw = 1;
        for (int e = 0; e < weight(i, mode); e++) pw = (long)((__int128)pw * c % M2);
        bool neg = mode == Mode::even && is_b_selection(t);
        acc = imod(acc + (neg ? -pw : pw), M2);
      }
      xm[i] = acc;
    }
    if (fnpoly::eval_fn_mod(F, xm, cfg.M2) != 0) return;
    stats.m2Passed++;
    // ... exactly
    std::vector<mpz_class> xz(dim, 0);
    for (int i = 0; i < dim; i++) {
      mpz_class acc = 0;
      for (int t = 0; t < L; t++) {
        mpz_class pw = 1;
        for (int e = 0; e < weight(i, mode); e++) pw *= vals[t];
        bool neg = mode == Mode::even && is_b_selection(t);
        acc += neg ? -pw : pw;
      }
      xz[i] = acc;
    }
    if (fnpoly::eval_fn(F, xz) != 0) return;
    stats.exactPassed++;
    if (mode == Mode::odd) {
      record(finalize_odd(std::vector<long>(vals.begin(), vals.end()), n, H));
    } else {
      std::vector<long> a, b;
      for (int i = 0; i < L; i++) (is_b_selection(i) ? b : a).push_back(vals[i]);
      record(finalize_even(a, b, n, H));
    }
  }

  void run_level(int k, const std::vector<long>& list) {
    for (long v : list) {
      if (usedAbs[std::labs(v)]) continue;
      if (!pool_take(k, v)) continue;
      if (k == L - 1) {
        final_candidate(v);
        pool_put(k, v);
        continue;
      }
      const auto& pr = powR[vindex(v)];
      bool minus = mode == Mode::even && is_b_selection(k);
      std::uint64_t idx = 0;
      for (int i = 0; i < dim; i++) {
        long x = mom[k][i] + (minus ? r - pr[i] : pr[i]);
        if (x >= r) x -= r;
        idx += (std::uint64_t)x * idxMul[i];
      }
      if (!reach_ok(k + 1, idx)) {
        pool_put(k, v);
        continue;
      }
      descend(k, v);
      if (q_ok(k + 1))
        dfs(k + 1);
      ascend(k);
      pool_put(k, v);
    }
  }

  void dfs(int k) {
    if (mode == Mode::odd) {
      run_level(k, candidates_odd(k));
      return;
    }
    if (is_b_selection(k)) {
      long c1 = imod(vals[k - 1], cfg.p1), c2 = imod(-vals[k - 1], cfg.p1);
      run_level(k, byP1[c1]);
      if (c2 != c1) run_level(k, byP1[c2]);
    } else if (sum2[k] == 0) {
      run_level(k, fullList);
    } else {
      long c1 = imod(vals[k - 1], cfg.p2), c2 = imod(-vals[k - 1], cfg.p2);
      run_level(k, byP2[c1]);
      if (c2 != c1) run_level(k, byP2[c2]);
    }
  }

  std::vector<long> outer_blocks() const {
    std::vector<long> out;
    if (mode == Mode::odd) {
      for (long v = cfg.p1; v <= H; v += cfg.p1) out.push_back(v);
    } else {
      for (long v = 1; v <= H; v++) out.push_back(v);
    }
    return out;
  }

  void run_block(long a1) {
    if (!pool_take(0, a1)) return;
    descend(0, a1);
    dfs(1);
    ascend(0);
    pool_put(0, a1);
  }
};

}  // namespace

SearchResult search(const SearchConfigZ& cfg, const Checkpoint* resume, long stopAfterOuter) {
  if (cfg.n < 9 || cfg.n > 16) throw std::invalid_argument("search: n out of range");
  if ((cfg.mode == Mode::odd) != (cfg.n % 2 == 1))
    throw std::invalid_argument("search: mode does not match n");
  std::string hash = config_hash(cfg);
  std::map<std::string, PtePair> solutions;
  std::map<std::string, NearMiss> nearMisses;
  Engine eng(cfg);
  eng.solutions = &solutions;
  eng.nearMisses = &nearMisses;
  long start = 0;
  if (resume) {
    if (resume->configHash != hash)
      throw std::invalid_argument("search: checkpoint belongs to a different configuration");
    start = resume->outerIndex;
    eng.stats = resume->stats;
    // rebuild accumulated results
    for (const auto& s : resume->solutions) {
      PtePair P = pair_from_json(nlohmann::json::parse(s));
      solutions.emplace(pair_key(P), P);
    }
    for (const auto& s : resume->nearMisses) {
      NearMiss nm = nearmiss_from_json(nlohmann::json::parse(s));
      nearMisses.emplace(to_json(nm).dump(), nm);
    }
  }
  auto blocks = eng.outer_blocks();
  long i = start, processed = 0;
  for (; i < (long)blocks.size(); i++) {
    if (stopAfterOuter >= 0 && processed >= stopAfterOuter) break;
    eng.run_block(blocks[i]);
    processed++;
  }
  SearchResult res;
  res.stats = eng.stats;
  res.checkpoint.configHash = hash;
  res.checkpoint.outerIndex = i;
  res.checkpoint.done = i == (long)blocks.size();
  res.checkpoint.stats = eng.stats;
  for (const auto& [k, P] : solutions) {
    res.solutions.push_back(P);
    res.checkpoint.solutions.push_back(pair_to_json(P).dump());
  }
  for (const auto& [k, nm] : nearMisses) {
    res.nearMisses.push_back(nm);
    res.checkpoint.nearMisses.push_back(to_json(nm).dump());
  }
  return res;
}

// ---------------------------------------------------------------------------
// pre-search of obstructing local classes

namespace {

// do two sorted residue multisets agree up to a unit scalar mod p?
bool unit_multiple_of(const std::vector<long>& got, const std::vector<long>& target, long p) {
  if (got.size() != target.size()) return false;
  for (long c = 1; c < p; c++) {
    std::vector<long> scaled;
    for (long v : target) scaled.push_back(v * c % p);
    std::sort(scaled.begin(), scaled.end());
    if (scaled == got) return true;
  }
  return false;
}

std::vector<long> reduce_sorted(const MultisetZ& S, long p) {
  std::vector<long> out;
  for (const auto& v : S) {
    mpz_class m = v % p;
    if (m < 0) m += p;
    out.push_back(m.get_si());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<PtePair> pre_search(int n, long H, long pstar,
                                const std::vector<modp::LocalSolution>& obstructions) {
  if (obstructions.empty())
    throw std::invalid_argument(
        "pre_search: no obstructing classes; the prime is a proven divisor and needs no "
        "pre-search");
  for (const auto& o : obstructions)
    if (o.n != n || o.p != pstar) throw std::invalid_argument("pre_search: class mismatch");
  if ((long)obstructions.size() * (pstar - 1) > 4096)
    throw std::runtime_error("pre_search: obstruction classes cover too many residue patterns");
  Mode mode = n % 2 ? Mode::odd : Mode::even;
  // chain and filter primes from the proven divisor table, skipping pstar
  std::vector<long> primes;
  for (const auto& e : divisors::required_z_entries(n, true))
    if (e.p >= 7 && e.p != pstar && e.p % 2 == 1) primes.push_back(e.p);
  std::sort(primes.begin(), primes.end(), std::greater<>());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  if (primes.size() < 2) throw std::runtime_error("pre_search: not enough proven sieve primes");
  SearchConfigZ base;
  base.n = n;
  base.H = H;
  base.mode = mode;
  base.p1 = primes[0];
  base.p2 = primes[1];
  for (size_t i = 2; i < primes.size() && base.qList.size() < 2; i++)
    base.qList.push_back(primes[i]);
  for (long rr : {31L, 29L, 23L, 19L, 17L}) {
    if (rr == pstar || rr == base.p1 || rr == base.p2) continue;
    if (std::count(base.qList.begin(), base.qList.end(), rr)) continue;
    base.r = rr;
    break;
  }
  if (base.r == 0) throw std::runtime_error("pre_search: no residue-table prime available");
  base.poolPrime = pstar;

  std::map<std::string, PtePair> results;
  auto try_config = [&](std::vector<long> poolA, std::vector<long> poolB) {
    SearchConfigZ cfg = base;
    std::sort(poolA.begin(), poolA.end());
    std::sort(poolB.begin(), poolB.end());
    cfg.poolA = poolA;
    cfg.poolB = poolB;
    auto res = search(cfg);
    for (const auto& P : res.solutions) {
      // keep only hits that genuinely reduce to a unit multiple of a class
      bool match = false;
      for (const auto& o : obstructions) {
        auto ra = reduce_sorted(P.A, pstar), rb = reduce_sorted(P.B, pstar);
        std::vector<long> oa(o.A), ob(o.B);
        std::sort(oa.begin(), oa.end());
        std::sort(ob.begin(), ob.end());
        if ((unit_multiple_of(ra, oa, pstar) && unit_multiple_of(rb, ob, pstar)) ||
            (unit_multiple_of(ra, ob, pstar) && unit_multiple_of(rb, oa, pstar)))
          match = true;
      }
      if (match) results.emplace(pair_key(P), P);
    }
  };
  for (const auto& o : obstructions) {
    long cmax = mode == Mode::odd ? pstar - 1 : (pstar - 1) / 2;
    for (long c = 1; c <= cmax; c++) {
      std::vector<long> pa, pb;
      for (long v : o.A) pa.push_back(v * c % pstar);
      for (long v : o.B) pb.push_back(v * c % pstar);
      try_config(pa, pb);
      if (mode == Mode::even) try_config(pb, pa);
    }
  }
  std::vector<PtePair> out;
  for (auto& [k, P] : results) out.push_back(P);
  return out;
}

// ---------------------------------------------------------------------------
// near-miss verification

bool nearmiss_quadratic_ok(const NearMiss& nm) {
  if (nm.mode != Mode::odd || nm.residualPolys.size() != 1) return false;
  const auto& E = nm.residualPolys[0];
  if (E.size() != 3) return false;
  // power sums of the two roots of E via Newton's identities (exact rational)
  mpq_class e2(E[2]), e1(E[1]), e0(E[0]);
  std::vector<mpq_class> p(nm.n, 0);  // p[k] = sum of k-th powers, k >= 1
  mpq_class s1 = -e1 / e2, s2 = e0 / e2;
  p[1] = s1;
  if (nm.n > 2) p[2] = s1 * p[1] - 2 * s2;
  for (int k = 3; k < nm.n; k++) p[k] = s1 * p[k - 1] - s2 * p[k - 2];
  for (int k = 1; k <= nm.n - 2; k += 2) {
    mpq_class total = p[k];
    for (long v : nm.integerPart) {
      mpz_class pw = 1;
      for (int e = 0; e < k; e++) pw *= v;
      total += mpq_class(pw);
    }
    if (total != 0) return false;
  }
  return true;
}

namespace {

// numeric roots of a primitive integer polynomial; handles quadratics with
// complex roots, polynomials in x^2 via the substituted quadratic/cubic, and
// otherwise requires all roots real
std::vector<std::complex<double>> numeric_roots(const std::vector<mpz_class>& E) {
  size_t deg = E.size() - 1;
  if (deg == 1) return {{-E[0].get_d() / E[1].get_d(), 0.0}};
  if (deg == 2) {
    double a = E[2].get_d(), b = E[1].get_d(), c = E[0].get_d();
    auto sq = std::sqrt(std::complex<double>(b * b - 4 * a * c, 0));
    return {(-b + sq) / (2 * a), (-b - sq) / (2 * a)};
  }
  bool evenPoly = true;
  for (size_t i = 1; i < E.size(); i += 2)
    if (E[i] != 0) evenPoly = false;
  if (evenPoly) {
    std::vector<mpz_class> Y;
    for (size_t i = 0; i < E.size(); i += 2) Y.push_back(E[i]);
    auto yroots = numeric_roots(Y);
    std::vector<std::complex<double>> out;
    for (auto y : yroots) {
      auto s = std::sqrt(y);
      out.push_back(s);
      out.push_back(-s);
    }
    return out;
  }
  // general case: Durand-Kerner on the monic normalization
  std::vector<std::complex<double>> c(E.size());
  for (size_t i = 0; i < E.size(); i++) c[i] = E[i].get_d() / E.back().get_d();
  std::vector<std::complex<double>> z(deg);
  for (size_t i = 0; i < deg; i++) z[i] = std::pow(std::complex<double>(0.4, 0.9), (double)i);
  for (int it = 0; it < 400; it++) {
    double move = 0;
    for (size_t i = 0; i < deg; i++) {
      std::complex<double> num = 1;
      for (size_t k = deg; k-- > 0;) num = num * z[i] + c[k];
      std::complex<double> den = 1;
      for (size_t j = 0; j < deg; j++)
        if (j != i) den *= z[i] - z[j];
      auto step = num / den;
      z[i] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-13) break;
  }
  return z;
}

}  // namespace

bool nearmiss_float_ok(const NearMiss& nm) {
  int top = nm.n - 2;
  auto power_sum = [](const std::vector<std::complex<double>>& elems, int k, double& scale) {
    std::complex<double> sum = 0;
    for (const auto& e : elems) {
      auto pw = std::pow(e, k);
      sum += pw;
      scale += std::abs(pw);
    }
    return sum;
  };
  if (nm.mode == Mode::odd) {
    // A = integer part plus all residual roots; odd moments must vanish
    std::vector<std::complex<double>> elems;
    for (long v : nm.integerPart) elems.emplace_back((double)v, 0.0);
    for (const auto& E : nm.residualPolys) {
      auto roots = numeric_roots(E);
      if (roots.size() != E.size() - 1) return false;
      elems.insert(elems.end(), roots.begin(), roots.end());
    }
    if ((int)elems.size() != nm.n) return false;
    for (int k = 1; k <= top; k += 2) {
      double scale = 0;
      auto sum = power_sum(elems, k, scale);
      if (std::abs(sum) > 1e-6 * (scale + 1)) return false;
    }
    return true;
  }
  // even mode: rebuild both sides and compare their even moments
  std::vector<std::complex<double>> sideElems[2];
  for (long v : nm.aPart) {
    sideElems[0].emplace_back((double)v, 0.0);
    sideElems[0].emplace_back((double)-v, 0.0);
  }
  for (long v : nm.bPart) {
    sideElems[1].emplace_back((double)v, 0.0);
    sideElems[1].emplace_back((double)-v, 0.0);
  }
  if (nm.residualSides.size() != nm.residualPolys.size()) return false;
  for (size_t i = 0; i < nm.residualPolys.size(); i++) {
    auto roots = numeric_roots(nm.residualPolys[i]);
    if (roots.size() != nm.residualPolys[i].size() - 1) return false;
    auto& side = sideElems[nm.residualSides[i]];
    side.insert(side.end(), roots.begin(), roots.end());
  }
  if ((int)sideElems[0].size() != nm.n || (int)sideElems[1].size() != nm.n) return false;
  for (int k = 2; k <= top; k += 2) {
    double scale = 0;
    auto sum = power_sum(sideElems[0], k, scale) - power_sum(sideElems[1], k, scale);
    if (std::abs(sum) > 1e-6 * (scale + 1)) return false;
  }
  return true;
}

}  // namespace pte::zsearch
