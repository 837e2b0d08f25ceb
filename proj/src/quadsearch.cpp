#include "pte/quadsearch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "pte/divisors.hpp"
#include "pte/fnpoly.hpp"

namespace pte::quadsearch {

namespace {

using quad::QuadInt;
using quad::QuadPair;
using cd = std::complex<double>;

long imod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
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
// machine-word ring arithmetic: z = x + y*omega_d, omega^2 = t*omega - c

struct Ring {
  int d = 1;
  long t = 0, c = 1;  // omega^2 = t*omega - c
  double wr = 0, wi = 1;  // omega as a complex number
};

Ring ring_of(int d) {
  Ring R;
  R.d = d;
  if (quad::half_integral_basis(d)) {
    R.t = 1;
    R.c = (d + 1) / 4;
    R.wr = 0.5;
    R.wi = std::sqrt((double)d) / 2;
  } else {
    R.t = 0;
    R.c = d;
    R.wr = 0;
    R.wi = std::sqrt((double)d);
  }
  return R;
}

struct El {
  long x = 0, y = 0;
  bool operator==(const El&) const = default;
};

El eadd(El a, El b) { return {a.x + b.x, a.y + b.y}; }
El esub(El a, El b) { return {a.x - b.x, a.y - b.y}; }
El eneg(El a) { return {-a.x, -a.y}; }
El emul(const Ring& R, El a, El b) {
  return {a.x * b.x - R.c * a.y * b.y, a.x * b.y + a.y * b.x + R.t * a.y * b.y};
}
El econj(const Ring& R, El a) { return {a.x + R.t * a.y, -a.y}; }
long enorm(const Ring& R, El a) { return a.x * a.x + R.t * a.x * a.y + R.c * a.y * a.y; }
bool ezero(El a) { return a.x == 0 && a.y == 0; }

QuadInt to_quad(int d, El a) { return QuadInt(d, a.x, a.y); }
El to_el(const QuadInt& z) {
  if (!z.x.fits_slong_p() || !z.y.fits_slong_p())
    throw std::invalid_argument("quadsearch: element out of machine range");
  return {z.x.get_si(), z.y.get_si()};
}

cd to_cd(const Ring& R, El a) { return cd(a.x + a.y * R.wr, a.y * R.wi); }

// w | z exactly when N(w) | conj(w)*z coordinate-wise
struct Divider {
  El wc;    // conj(w)
  long q;   // N(w)
};
Divider make_divider(const Ring& R, El w) { return {econj(R, w), enorm(R, w)}; }
bool divides(const Ring& R, const Divider& D, El z) {
  El u = emul(R, D.wc, z);
  return u.x % D.q == 0 && u.y % D.q == 0;
}

// ring multiplication with 64-bit wraparound (filter-polynomial screening)
struct El64 {
  std::uint64_t x = 0, y = 0;
};
El64 emul64(const Ring& R, El64 a, El64 b) {
  std::uint64_t t = (std::uint64_t)R.t, c = (std::uint64_t)R.c;
  return {a.x * b.x - c * a.y * b.y, a.x * b.y + a.y * b.x + t * a.y * b.y};
}

// ---------------------------------------------------------------------------
// exact arithmetic in the field of fractions: num / den with den > 0

struct QR {
  QuadInt num;
  mpz_class den = 1;
};

QR qr_of(const QuadInt& z) { return {z, 1}; }

void qr_reduce(QR& a) {
  mpz_class g = gcd(gcd(a.num.x, a.num.y), a.den);
  if (g != 0) {
    a.num.x /= g;
    a.num.y /= g;
    a.den /= g;
  }
  if (a.den < 0) {
    a.den = -a.den;
    a.num = quad::neg(a.num);
  }
}

QR qr_add(const QR& a, const QR& b) {
  QR r;
  r.num = quad::add(QuadInt(a.num.d, a.num.x * b.den, a.num.y * b.den),
                    QuadInt(b.num.d, b.num.x * a.den, b.num.y * a.den));
  r.den = a.den * b.den;
  qr_reduce(r);
  return r;
}

QR qr_sub(const QR& a, const QR& b) {
  QR nb = b;
  nb.num = quad::neg(nb.num);
  return qr_add(a, nb);
}

QR qr_mul(const QR& a, const QR& b) {
  QR r{quad::mul(a.num, b.num), a.den * b.den};
  qr_reduce(r);
  return r;
}

QR qr_inv(const QR& a) {
  mpz_class nn = quad::norm(a.num);
  if (nn == 0) throw std::logic_error("quadsearch: division by zero");
  QuadInt cn = quad::conj(a.num);
  QR r{QuadInt(a.num.d, cn.x * a.den, cn.y * a.den), nn};
  qr_reduce(r);
  return r;
}

bool qr_zero(const QR& a) { return quad::is_zero(a.num); }

// Newton interpolation; nodes must be distinct ring elements
std::vector<QR> interpolate_qr(const std::vector<QuadInt>& nodes, std::vector<QR> val) {
  size_t m = nodes.size();
  for (size_t j = 1; j < m; j++)
    for (size_t i = m - 1; i >= j; i--)
      val[i] = qr_mul(qr_sub(val[i], val[i - 1]),
                      qr_inv(qr_of(quad::sub(nodes[i], nodes[i - j]))));
  // expand the Newton form to monomial coefficients (ascending)
  int d = nodes.empty() ? 1 : nodes[0].d;
  std::vector<QR> poly(1, val[m - 1]);
  for (size_t i = m - 1; i-- > 0;) {
    std::vector<QR> nxt(poly.size() + 1);
    for (auto& e : nxt) e = QR{QuadInt(d, 0, 0), 1};
    QR node = qr_of(nodes[i]);
    for (size_t k = 0; k < poly.size(); k++) {
      nxt[k + 1] = qr_add(nxt[k + 1], poly[k]);
      nxt[k] = qr_sub(nxt[k], qr_mul(poly[k], node));
    }
    nxt[0] = qr_add(nxt[0], val[i]);
    poly = std::move(nxt);
  }
  return poly;
}

// clear denominators and content; empty result if the lead coefficient dies
std::vector<QuadInt> to_primitive_quad(const std::vector<QR>& c) {
  if (c.empty()) return {};
  mpz_class L = 1;
  for (const auto& e : c) L = L / gcd(L, e.den) * e.den;
  int d = c[0].num.d;
  std::vector<QuadInt> out;
  for (const auto& e : c) {
    mpz_class f = L / e.den;
    out.emplace_back(d, e.num.x * f, e.num.y * f);
  }
  while (!out.empty() && quad::is_zero(out.back())) out.pop_back();
  mpz_class g = 0;
  for (const auto& e : out) g = gcd(gcd(g, e.x), e.y);
  if (g > 1)
    for (auto& e : out) {
      e.x /= g;
      e.y /= g;
    }
  return out;
}

QuadInt eval_poly_quad(const std::vector<QuadInt>& c, const QuadInt& z) {
  QuadInt acc(z.d, 0, 0);
  for (size_t i = c.size(); i-- > 0;) acc = quad::add(quad::mul(acc, z), c[i]);
  return acc;
}

// Durand-Kerner on an ascending coefficient list; returns approximate roots
std::vector<cd> dk_roots(std::vector<cd> c) {
  while (!c.empty() && std::abs(c.back()) < 1e-300) c.pop_back();
  if (c.size() < 2) return {};
  size_t deg = c.size() - 1;
  for (auto& e : c) e /= c[deg];
  std::vector<cd> r(deg);
  cd seed(0.4, 0.9);
  r[0] = seed;
  for (size_t i = 1; i < deg; i++) r[i] = r[i - 1] * seed;
  for (int it = 0; it < 300; it++) {
    double move = 0;
    for (size_t i = 0; i < deg; i++) {
      cd num = c[deg];
      for (size_t k = deg; k-- > 0;) num = num * r[i] + c[k];
      cd den(1, 0);
      for (size_t j = 0; j < deg; j++)
        if (j != i) den *= r[i] - r[j];
      if (std::abs(den) < 1e-300) den = cd(1e-300, 0);
      cd delta = num / den;
      r[i] -= delta;
      move = std::max(move, std::abs(delta));
    }
    if (move < 1e-12) break;
  }
  return r;
}

// nearest lattice element to a complex value; ok reports the rounding error test
El round_lattice(const Ring& R, cd z, bool& ok, double tol) {
  double yc = z.imag() / R.wi;
  double xc = z.real() - yc * R.wr;
  double xr = std::round(xc), yr = std::round(yc);
  ok = std::abs(xc - xr) <= tol && std::abs(yc - yr) <= tol &&
       std::abs(xr) < 9e15 && std::abs(yr) < 9e15;
  return {(long)xr, (long)yr};
}

// ---------------------------------------------------------------------------
// residue class maps mod a prime element (norm q prime): z -> (z.x + z.y*w) mod q

long class_slope(const Ring& R, El pi, long q) {
  // w with pi.x + pi.y*w == 0 mod q; pi.y is invertible for norm-q primes
  long y = imod(pi.y, q);
  if (y == 0) throw std::logic_error("quadsearch: bad filter prime");
  long inv = 1;
  for (long e = q - 2, b = y; e; e >>= 1, b = b * b % q)
    if (e & 1) inv = inv * b % q;
  return imod(-pi.x % q * inv, q);
}

struct ClassMap {
  long q = 0, w = 0;
  long cls(El z) const { return imod(imod(z.x, q) + imod(z.y, q) * w, q); }
};

}  // namespace

// ---------------------------------------------------------------------------
// configuration

SearchConfigQ table_config(int d, int n) {
  struct Row {
    int d, n;
    long p, H;
    double ell;
  };
  static const Row rows[] = {
      {1, 9, 13, 1400, 0},  {1, 10, 17, 500, 4},   {1, 11, 17, 750, 0},
      {1, 12, 29, 500, 7},  {1, 13, 41, 680, 0},   {1, 14, 37, 300, 8},
      {1, 16, 53, 250, 12}, {2, 9, 11, 1250, 0},   {2, 10, 17, 800, 8},
      {2, 11, 17, 1000, 0}, {2, 12, 19, 450, 9},   {2, 13, 41, 1000, 0},
      {3, 9, 13, 1300, 0},  {3, 10, 13, 400, 2.2}, {3, 11, 31, 1250, 0},
      {3, 12, 19, 250, 3},  {3, 13, 37, 500, 0},   {3, 14, 37, 250, 5},
      {3, 15, 43, 350, 0},  {7, 9, 11, 1200, 0},   {7, 10, 23, 1000, 12},
      {7, 11, 11, 550, 0},  {7, 12, 29, 600, 12},  {7, 13, 37, 800, 0},
      {11, 9, 11, 1250, 0}, {11, 10, 23, 1100, 11}, {11, 11, 31, 1800, 0},
      {11, 12, 11, 160, 5}, {11, 13, 37, 900, 0},  {19, 9, 11, 2100, 0},
      {19, 10, 23, 1500, 11}, {19, 11, 19, 1400, 0}, {19, 12, 19, 500, 9},
      {19, 13, 23, 800, 0},
  };
  for (const auto& r : rows)
    if (r.d == d && r.n == n) {
      SearchConfigQ cfg;
      cfg.d = d;
      cfg.n = n;
      cfg.p = r.p;
      cfg.H = r.H;
      cfg.ell = r.ell;
      return cfg;
    }
  throw std::invalid_argument("table_config: no tabulated row for (d, n)");
}

// ---------------------------------------------------------------------------
// serialization

static std::string serialize_config_q(const SearchConfigQ& cfg) {
  std::string s = "d=" + std::to_string(cfg.d) + ";n=" + std::to_string(cfg.n) +
                  ";p=" + std::to_string(cfg.p) + ";H=" + std::to_string(cfg.H) +
                  ";ell=" + std::to_string(cfg.ell) + ";f=";
  for (const auto& z : cfg.smallPrimeFilters) s += quad::to_string(z) + ",";
  return s;
}

std::string config_hash(const SearchConfigQ& cfg) {
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(serialize_config_q(cfg)));
  return buf;
}

nlohmann::json quad_pair_to_json(const QuadPair& P) {
  nlohmann::json j;
  j["d"] = P.d;
  auto side = [](const std::vector<QuadInt>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& z : v) a.push_back({z.x.get_str(), z.y.get_str()});
    return a;
  };
  j["A"] = side(P.A);
  j["B"] = side(P.B);
  return j;
}

QuadPair quad_pair_from_json(const nlohmann::json& j) {
  QuadPair P;
  P.d = j.at("d").get<int>();
  auto side = [&](const nlohmann::json& a) {
    std::vector<QuadInt> v;
    for (const auto& e : a)
      v.emplace_back(P.d, mpz_class(e.at(0).get<std::string>()),
                     mpz_class(e.at(1).get<std::string>()));
    return v;
  };
  P.A = side(j.at("A"));
  P.B = side(j.at("B"));
  return P;
}

nlohmann::json to_json(const CheckpointQ& c) {
  nlohmann::json j;
  j["schemaVersion"] = 1;
  j["configHash"] = c.configHash;
  j["outerIndex"] = c.outerIndex;
  j["done"] = c.done;
  j["stats"] = {{"chainLeaves", c.stats.chainLeaves},
                {"step4Passed", c.stats.step4Passed},
                {"prescreenPassed", c.stats.prescreenPassed},
                {"exactPassed", c.stats.exactPassed},
                {"solutionsFound", c.stats.solutionsFound}};
  j["solutions"] = c.solutions;
  return j;
}

CheckpointQ checkpoint_from_json(const nlohmann::json& j) {
  if (j.at("schemaVersion").get<int>() != 1)
    throw std::invalid_argument("checkpoint: unknown schema version");
  CheckpointQ c;
  c.configHash = j.at("configHash").get<std::string>();
  c.outerIndex = j.at("outerIndex").get<long>();
  c.done = j.at("done").get<bool>();
  const auto& s = j.at("stats");
  c.stats.chainLeaves = s.at("chainLeaves").get<long long>();
  c.stats.step4Passed = s.at("step4Passed").get<long long>();
  c.stats.prescreenPassed = s.at("prescreenPassed").get<long long>();
  c.stats.exactPassed = s.at("exactPassed").get<long long>();
  c.stats.solutionsFound = s.at("solutionsFound").get<long long>();
  c.solutions = j.at("solutions").get<std::vector<std::string>>();
  return c;
}

// ---------------------------------------------------------------------------
// the staged search engine

namespace {

struct Engine {
  SearchConfigQ cfg;
  Ring R;
  int n, L;  // L = total selections before finalization
  bool even;
  long p, H;
  El pi1, pi2;
  Divider dv1, dv2;
  std::vector<El> S1, S0, T1, T2, V;

  // small-prime filters: divisibility test (step 4) + multiset congruence
  struct Filt {
    Divider dv;
    ClassMap cm;
    int satisfiedAt = -1;  // first depth at which step 4 held (-1: not yet)
    std::vector<int> cA, cB;
    int surA = 0, surB = 0, def = 0;
  };
  std::vector<Filt> filt;

  std::vector<El> sel;
  std::vector<El> sq;      // element squares (even mode)
  std::vector<El> sums;    // prefix chain sums (odd: sum a_i; even: sum a_i^2-b_i^2)
  fnpoly::SparsePoly F;
  int dimF = 0;

  std::map<std::string, QuadPair> found;
  StatsQ stats;

  explicit Engine(const SearchConfigQ& c) : cfg(c) {
    R = ring_of(cfg.d);
    n = cfg.n;
    even = n % 2 == 0;
    L = even ? n / 2 + 2 : (n + 1) / 2;
    p = cfg.p;
    H = cfg.H;
    auto f = quad::split_prime(p, cfg.d);
    if (f.behavior != quad::Behavior::split)
      throw std::invalid_argument("search_quad: sieve prime does not split");
    pi1 = to_el(f.pi);
    pi2 = to_el(quad::conj(f.pi));
    dv1 = make_divider(R, pi1);
    dv2 = make_divider(R, pi2);
    QuadInt piq = f.pi;
    for (const auto& z : quad::enum_by_norm(H, cfg.d, &piq, true)) S1.push_back(to_el(z));
    for (const auto& z : quad::enum_by_norm(H, cfg.d, &piq, false)) T1.push_back(to_el(z));
    QuadInt piq2 = quad::conj(f.pi);
    for (const auto& z : quad::enum_by_norm(H, cfg.d, &piq2, false)) T2.push_back(to_el(z));
    for (const auto& z : quad::enum_by_norm(H / p, cfg.d)) V.push_back(to_el(z));
    if (even) {
      double ell = cfg.ell > 0 ? cfg.ell : 1;
      long b0 = (long)std::floor((double)H / ell);
      for (const auto& z : quad::enum_by_norm(b0, cfg.d, nullptr, true)) S0.push_back(to_el(z));
      auto [spec, FF] = fnpoly::build_fn(n);
      F = std::move(FF);
      dimF = spec.varCount;
    }
    std::vector<QuadInt> fl = cfg.smallPrimeFilters;
    if (fl.empty()) fl = divisors::quad_filter_primes(n, cfg.d, p);
    for (const auto& z : fl) {
      Filt f2;
      El e = to_el(z);
      f2.dv = make_divider(R, e);
      f2.cm.q = f2.dv.q;
      f2.cm.w = class_slope(R, e, f2.dv.q);
      f2.cA.assign(f2.cm.q, 0);
      f2.cB.assign(f2.cm.q, 0);
      filt.push_back(std::move(f2));
    }
    sums.assign(L + 1, El{});
  }

  bool is_b(int pos) const { return even && pos % 2 == 1; }

  long fold(const ClassMap& cm, long c) const { return std::min(c, (cm.q - c) % cm.q); }

  // multiset congruence A == -A (odd) / A == B (even) mod each filter prime:
  // necessary completability conditions at every partial stage
  bool q_ok() const {
    if (!even) {
      int count = (int)sel.size();
      for (const auto& f : filt)
        if (f.def > n - count) return false;
      return true;
    }
    int count = (int)sel.size();
    int aCount = (count + 1) / 2, bCount = count / 2;
    long slotsA = n / 2 - aCount, slotsB = n / 2 - bCount;
    for (const auto& f : filt)
      if (f.surB > slotsA || f.surA > slotsB) return false;
    return true;
  }

  void qs_add(int pos, El v) {
    for (auto& f : filt) {
      long c = f.cm.cls(v);
      if (!even) {
        if (c == 0) {
          f.cA[0]++;
          continue;
        }
        long x = std::min(c, f.cm.q - c), y = f.cm.q - x;
        f.def -= std::abs(f.cA[x] - f.cA[y]);
        f.cA[c]++;
        f.def += std::abs(f.cA[x] - f.cA[y]);
      } else {
        long cls = fold(f.cm, c);
        bool bs = is_b(pos);
        auto& mine = bs ? f.cB : f.cA;
        auto& other = bs ? f.cA : f.cB;
        if (mine[cls] >= other[cls])
          (bs ? f.surB : f.surA)++;
        else
          (bs ? f.surA : f.surB)--;
        mine[cls]++;
      }
    }
  }

  void qs_remove(int pos, El v) {
    for (auto& f : filt) {
      long c = f.cm.cls(v);
      if (!even) {
        if (c == 0) {
          f.cA[0]--;
          continue;
        }
        long x = std::min(c, f.cm.q - c), y = f.cm.q - x;
        f.def -= std::abs(f.cA[x] - f.cA[y]);
        f.cA[c]--;
        f.def += std::abs(f.cA[x] - f.cA[y]);
      } else {
        long cls = fold(f.cm, c);
        bool bs = is_b(pos);
        auto& mine = bs ? f.cB : f.cA;
        mine[cls]--;
        if (mine[cls] >= (bs ? f.cA : f.cB)[cls])
          (bs ? f.surB : f.surA)--;
        else
          (bs ? f.surA : f.surB)++;
      }
    }
  }

  // step-4 bookkeeping: a filter prime becomes satisfied once it divides a
  // selected element (odd), a pairwise sum (odd), or some a_i^2 - b_j^2 (even)
  void step4_add(int pos) {
    El v = sel[pos];
    for (auto& f : filt) {
      if (f.satisfiedAt >= 0) continue;
      bool hit = false;
      if (!even) {
        if (divides(R, f.dv, v)) hit = true;
        for (int i = 0; !hit && i < pos; i++)
          if (divides(R, f.dv, eadd(sel[i], v))) hit = true;
      } else {
        bool bs = is_b(pos);
        for (int i = (bs ? 0 : 1); !hit && i < pos; i += 2)
          if (divides(R, f.dv, esub(sq[pos], sq[i]))) hit = true;
      }
      if (hit) f.satisfiedAt = pos;
    }
  }

  void step4_remove(int pos) {
    for (auto& f : filt)
      if (f.satisfiedAt == pos) f.satisfiedAt = -1;
  }

  bool step4_ok() const {
    for (const auto& f : filt)
      if (f.satisfiedAt < 0) return false;
    return true;
  }

  bool admissible(El v) const {
    if (ezero(v)) return false;
    for (const auto& s : sel)
      if (v == s || v == eneg(s)) return false;
    return true;
  }

  void push(int pos, El v) {
    sel.push_back(v);
    if (even) sq.push_back(emul(R, v, v));
    El delta = even ? (is_b(pos) ? eneg(sq[pos]) : sq[pos]) : v;
    sums[pos + 1] = eadd(sums[pos], delta);
    qs_add(pos, v);
    step4_add(pos);
  }

  void pop(int pos) {
    step4_remove(pos);
    qs_remove(pos, sel[pos]);
    sel.pop_back();
    if (even) sq.pop_back();
  }

  void dfs(int pos) {
    if (pos == L) {
      leaf();
      return;
    }
    auto try_v = [&](El v) {
      if (!admissible(v)) return;
      push(pos, v);
      if (q_ok()) dfs(pos + 1);
      pop(pos);
    };
    if (!even) {
      // j = 1 when an even number of elements is selected, else 2
      bool useFirst = pos % 2 == 0;
      const Divider& dv = useFirst ? dv1 : dv2;
      if (divides(R, dv, sums[pos])) {
        for (El v : V) try_v(v);
      } else {
        El last = sel.back();
        for (El t : (useFirst ? T1 : T2)) try_v(esub(t, last));
      }
    } else if (pos % 2 == 1) {
      El last = sel.back();  // pair b with the latest a
      for (El t : T1) try_v(eadd(last, t));
    } else {
      if (divides(R, dv2, sums[pos])) {
        for (El v : V) try_v(v);
      } else {
        El last = sel.back();
        for (El t : T2) try_v(eadd(last, t));
      }
    }
  }

  // ---- finalization ----

  void record(const QuadPair& P) {
    QuadPair C = quad::canonical_quad(P);
    std::string key = quad::to_string(C);
    if (found.emplace(key, C).second) stats.solutionsFound++;
  }

  void leaf() {
    stats.chainLeaves++;
    if (!step4_ok()) return;
    stats.step4Passed++;
    if (!even)
      leaf_odd();
    else
      leaf_even();
  }

  void leaf_odd() {
    int m = L;
    // float interpolation prescreen: the full set sums to zero, the
    // coefficient ratios and all roots must sit on the lattice
    std::vector<cd> nodes(m), val(m);
    for (int j = 0; j < m; j++) nodes[j] = to_cd(R, sel[j]);
    for (int j = 0; j < m; j++) {
      cd prod(1, 0);
      for (int i = 0; i < m; i++) prod *= nodes[i] + nodes[j];
      val[j] = cd(1, 0) / prod;
    }
    // Newton divided differences
    for (int j = 1; j < m; j++)
      for (int i = m - 1; i >= j; i--) val[i] = (val[i] - val[i - 1]) / (nodes[i] - nodes[i - j]);
    std::vector<cd> c(1, val[m - 1]);
    for (int i = m - 1; i-- > 0;) {
      std::vector<cd> nxt(c.size() + 1);
      for (size_t k = 0; k < c.size(); k++) {
        nxt[k + 1] += c[k];
        nxt[k] -= c[k] * nodes[i];
      }
      nxt[0] += val[i];
      c = std::move(nxt);
    }
    double lead = std::abs(c[m - 1]);
    double big = 0;
    for (const auto& e : c) big = std::max(big, std::abs(e));
    if (lead < 1e-12 * big) return;  // degenerate interpolant
    El sumSel = sums[L];
    // roots negate the missing elements; the full set sums to zero, so the
    // root sum equals the sum of the selected prefix
    cd rootSum = -c[m - 2] / c[m - 1];
    if (std::abs(rootSum - to_cd(R, sumSel)) > 0.01) return;
    cd prodTerm = c[0] / c[m - 1];
    bool ok = false;
    round_lattice(R, prodTerm, ok, 0.01 + std::abs(prodTerm) * 1e-9);
    if (!ok) return;
    auto roots = dk_roots(c);
    if ((int)roots.size() != m - 1) return;
    std::vector<El> rest;
    for (cd z : roots) {
      El e = round_lattice(R, z, ok, 0.01 + std::abs(z) * 1e-9);
      if (!ok) return;
      rest.push_back(eneg(e));
    }
    stats.prescreenPassed++;
    // exact assembly: every moment identity is verified in the ring
    std::vector<QuadInt> A;
    for (El e : sel) A.push_back(to_quad(cfg.d, e));
    for (El e : rest) A.push_back(to_quad(cfg.d, e));
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& z : A) {
      if (quad::is_zero(z)) return;
      if (!seen.insert({z.x.get_str(), z.y.get_str()}).second) return;
      QuadInt nz = quad::neg(z);
      if (seen.count({nz.x.get_str(), nz.y.get_str()})) return;
    }
    QuadPair P;
    P.d = cfg.d;
    P.A = A;
    for (const auto& z : A) P.B.push_back(quad::neg(z));
    if (quad::verify_quad(P) < n - 1) return;
    stats.exactPassed++;
    record(P);
  }

  void leaf_even() {
    // filter polynomial at x_k = sum_a a^{2k} - sum_b b^{2k}, first with
    // 64-bit wraparound per coordinate, then exactly
    std::vector<El64> x64(dimF);
    for (int i = 0; i < L; i++) {
      El64 e2{(std::uint64_t)(long long)sq[i].x, (std::uint64_t)(long long)sq[i].y};
      El64 pw = e2;
      bool bs = is_b(i);
      for (int k = 0; k < dimF; k++) {
        if (bs) {
          x64[k].x -= pw.x;
          x64[k].y -= pw.y;
        } else {
          x64[k].x += pw.x;
          x64[k].y += pw.y;
        }
        if (k + 1 < dimF) pw = emul64(R, pw, e2);
      }
    }
    El64 acc{};
    for (const auto& [expo, coef] : F.terms) {
      El64 t{1, 0};
      for (int k = 0; k < dimF; k++)
        for (int e = 0; e < expo[k]; e++) t = emul64(R, t, x64[k]);
      std::uint64_t cm = mpz_get_ui(coef.get_mpz_t());
      if (coef < 0) cm = -cm;
      acc.x += cm * t.x;
      acc.y += cm * t.y;
    }
    if (acc.x != 0 || acc.y != 0) return;
    stats.prescreenPassed++;
    // exact filter evaluation
    std::vector<QuadInt> xz(dimF, QuadInt(cfg.d, 0, 0));
    for (int i = 0; i < L; i++) {
      QuadInt e2 = to_quad(cfg.d, sq[i]);
      QuadInt pw = e2;
      bool bs = is_b(i);
      for (int k = 0; k < dimF; k++) {
        xz[k] = bs ? quad::sub(xz[k], pw) : quad::add(xz[k], pw);
        if (k + 1 < dimF) pw = quad::mul(pw, e2);
      }
    }
    QuadInt accz(cfg.d, 0, 0);
    for (const auto& [expo, coef] : F.terms) {
      QuadInt t(cfg.d, 1, 0);
      for (int k = 0; k < dimF; k++)
        for (int e = 0; e < expo[k]; e++) t = quad::mul(t, xz[k]);
      accz = quad::add(accz, QuadInt(cfg.d, t.x * coef, t.y * coef));
    }
    if (!quad::is_zero(accz)) return;
    stats.exactPassed++;
    finalize_even();
  }

  // double interpolation in the squared variable; exact throughout
  void finalize_even() {
    std::vector<El> aSel, bSel;
    for (int i = 0; i < L; i++) (is_b(i) ? bSel : aSel).push_back(sel[i]);
    int s = (int)aSel.size(), t = (int)bSel.size();
    auto side = [&](const std::vector<El>& own, const std::vector<El>& other,
                    int nodesWanted) -> std::optional<std::vector<El>> {
      std::vector<QuadInt> nodes;
      std::vector<QR> val;
      for (int j = 0; j < nodesWanted; j++) {
        QuadInt nj = quad::mul(to_quad(cfg.d, other[j]), to_quad(cfg.d, other[j]));
        QR prod = qr_of(QuadInt(cfg.d, 1, 0));
        for (El a : own) {
          QuadInt diff = quad::sub(nj, to_quad(cfg.d, emul(R, a, a)));
          if (quad::is_zero(diff)) return std::nullopt;
          prod = qr_mul(prod, qr_of(diff));
        }
        nodes.push_back(nj);
        val.push_back(qr_inv(prod));
      }
      auto G = to_primitive_quad(interpolate_qr(nodes, val));
      if ((int)G.size() != nodesWanted) return std::nullopt;  // degenerate
      // roots must be squares of ring elements
      std::vector<cd> gc;
      for (const auto& e : G) gc.push_back(cd(e.x.get_d() + e.y.get_d() * R.wr, e.y.get_d() * R.wi));
      auto roots = dk_roots(gc);
      if ((int)roots.size() != nodesWanted - 1) return std::nullopt;
      std::vector<El> out;
      for (cd u : roots) {
        bool ok = false;
        El ur = round_lattice(R, u, ok, 0.01 + std::abs(u) * 1e-9);
        if (!ok) return std::nullopt;
        if (!quad::is_zero(eval_poly_quad(G, to_quad(cfg.d, ur)))) return std::nullopt;
        cd zc = std::sqrt(to_cd(R, ur));
        El z = round_lattice(R, zc, ok, 0.01 + std::abs(zc) * 1e-9);
        if (!ok || !(emul(R, z, z) == ur)) return std::nullopt;
        out.push_back(z);
      }
      return out;
    };
    int ka = n / 2 - s + 1, kb = n / 2 - t + 1;
    auto restA = side(aSel, bSel, ka);
    if (!restA) return;
    auto restB = side(bSel, aSel, kb);
    if (!restB) return;
    std::vector<El> aAll = aSel, bAll = bSel;
    aAll.insert(aAll.end(), restA->begin(), restA->end());
    bAll.insert(bAll.end(), restB->begin(), restB->end());
    if ((int)aAll.size() != n / 2 || (int)bAll.size() != n / 2) return;
    std::set<std::pair<long, long>> seen;
    auto clash = [&](El v) {
      if (ezero(v)) return true;
      if (!seen.insert({v.x, v.y}).second) return true;
      El nv = eneg(v);
      return seen.count({nv.x, nv.y}) > 0;
    };
    for (El v : aAll)
      if (clash(v)) return;
    for (El v : bAll)
      if (clash(v)) return;
    QuadPair P;
    P.d = cfg.d;
    for (El v : aAll) {
      P.A.push_back(to_quad(cfg.d, v));
      P.A.push_back(to_quad(cfg.d, eneg(v)));
    }
    for (El v : bAll) {
      P.B.push_back(to_quad(cfg.d, v));
      P.B.push_back(to_quad(cfg.d, eneg(v)));
    }
    if (quad::verify_quad(P) < n - 1) return;
    record(P);
  }

  // ---- outer loop ----

  const std::vector<El>& outer_list() const { return even ? S0 : S1; }

  void run_outer(long idx) {
    El v = outer_list()[idx];
    sel.clear();
    sq.clear();
    push(0, v);
    if (q_ok()) dfs(1);
    pop(0);
  }
};

}  // namespace

SearchResultQ search_quad(const SearchConfigQ& cfg, const CheckpointQ* resume,
                          long stopAfterOuter) {
  Engine eng(cfg);
  std::string hash = config_hash(cfg);
  long start = 0;
  if (resume) {
    if (resume->configHash != hash)
      throw std::invalid_argument("search_quad: checkpoint does not match this configuration");
    start = resume->outerIndex;
    eng.stats = resume->stats;
    for (const auto& s : resume->solutions) {
      QuadPair P = quad_pair_from_json(nlohmann::json::parse(s));
      eng.found.emplace(quad::to_string(P), P);
    }
  }
  long total = (long)eng.outer_list().size();
  long end = total;
  if (stopAfterOuter >= 0) end = std::min(total, start + stopAfterOuter);
  for (long i = start; i < end; i++) eng.run_outer(i);
  SearchResultQ res;
  for (const auto& [k, P] : eng.found) res.solutions.push_back(P);
  res.stats = eng.stats;
  res.checkpoint.configHash = hash;
  res.checkpoint.outerIndex = end;
  res.checkpoint.done = end == total;
  res.checkpoint.stats = eng.stats;
  for (const auto& P : res.solutions)
    res.checkpoint.solutions.push_back(quad_pair_to_json(P).dump());
  return res;
}

std::vector<QuadPair> search_quad_odd(const SearchConfigQ& cfg) {
  if (cfg.n % 2 == 0) throw std::invalid_argument("search_quad_odd: n must be odd");
  return search_quad(cfg).solutions;
}

std::vector<QuadPair> search_quad_even(const SearchConfigQ& cfg) {
  if (cfg.n % 2 != 0) throw std::invalid_argument("search_quad_even: n must be even");
  return search_quad(cfg).solutions;
}

// ---------------------------------------------------------------------------
// height calibration: smallest H at which some selection ordering of a known
// solution survives the chain rules

namespace {

struct Calib {
  Ring R;
  int d, n, L;
  bool even;
  long p;
  double ell;
  Divider dv1, dv2;
  std::vector<El> pool;   // odd: candidate elements; even: half elements (a side first)
  std::vector<El> poolB;  // even: b-side halves
  std::vector<char> used, usedB;
  std::vector<El> sel;
  std::vector<El> sq;
  long best = -1;

  void dfs(int pos, long worst, El chainSum) {
    if (best >= 0 && worst >= best) return;
    if (pos == L) {
      best = worst;
      return;
    }
    bool bSel = even && pos % 2 == 1;
    auto& src = even ? (bSel ? poolB : pool) : pool;
    auto& flag = even ? (bSel ? usedB : used) : used;
    for (size_t i = 0; i < src.size(); i++) {
      if (flag[i]) continue;
      for (int sgn = 0; sgn < (even ? 2 : 1); sgn++) {
        El v = sgn ? eneg(src[i]) : src[i];
        long req = 0;
        El nextSum = chainSum;
        if (pos == 0) {
          if (!even) {
            if (!divides(R, dv1, v)) continue;
            req = enorm(R, v);
          } else {
            req = (long)std::ceil(ell * (double)enorm(R, v) - 1e-9);
          }
          nextSum = even ? emul(R, v, v) : v;
        } else if (!even) {
          bool useFirst = pos % 2 == 0;
          const Divider& dv = useFirst ? dv1 : dv2;
          if (divides(R, dv, chainSum)) {
            req = p * enorm(R, v);
          } else {
            El t = eadd(v, sel.back());
            if (!divides(R, dv, t)) continue;
            req = enorm(R, t);
          }
          nextSum = eadd(chainSum, v);
        } else if (bSel) {
          El t = esub(v, sel.back());
          if (!divides(R, dv1, t)) continue;
          req = enorm(R, t);
          nextSum = esub(chainSum, emul(R, v, v));
        } else {
          if (divides(R, dv2, chainSum)) {
            req = p * enorm(R, v);
          } else {
            El t = esub(v, sel.back());
            if (!divides(R, dv2, t)) continue;
            req = enorm(R, t);
          }
          nextSum = eadd(chainSum, emul(R, v, v));
        }
        long w2 = std::max(worst, req);
        if (best >= 0 && w2 >= best) continue;
        flag[i] = 1;
        sel.push_back(v);
        dfs(pos + 1, w2, nextSum);
        sel.pop_back();
        flag[i] = 0;
      }
    }
  }
};

// split a symmetric side into one representative per +/- pair
std::optional<std::vector<El>> halves_of(const Ring& R, const std::vector<QuadInt>& side) {
  std::vector<El> els;
  for (const auto& z : side) els.push_back(to_el(z));
  std::vector<El> reps;
  std::vector<char> taken(els.size(), 0);
  for (size_t i = 0; i < els.size(); i++) {
    if (taken[i]) continue;
    bool paired = false;
    for (size_t j = i + 1; j < els.size(); j++) {
      if (!taken[j] && els[j] == eneg(els[i])) {
        taken[i] = taken[j] = 1;
        reps.push_back(els[i]);
        paired = true;
        break;
      }
    }
    if (!paired) return std::nullopt;
  }
  return reps;
}

QuadPair conj_pair(const QuadPair& P) {
  QuadPair C;
  C.d = P.d;
  for (const auto& z : P.A) C.A.push_back(quad::conj(z));
  for (const auto& z : P.B) C.B.push_back(quad::conj(z));
  return C;
}

}  // namespace

std::optional<long> calibrate_height(const QuadPair& P, const SearchConfigQ& cfg) {
  Ring R = ring_of(cfg.d);
  auto f = quad::split_prime(cfg.p, cfg.d);
  if (f.behavior != quad::Behavior::split)
    throw std::invalid_argument("calibrate_height: sieve prime does not split");
  long best = -1;
  bool even = cfg.n % 2 == 0;
  for (const QuadPair* Q : {&P}) {
    for (int cj = 0; cj < 2; cj++) {
      QuadPair W = cj ? conj_pair(*Q) : *Q;
      for (int swap = 0; swap < 2; swap++) {
        const auto& sideA = swap ? W.B : W.A;
        const auto& sideB = swap ? W.A : W.B;
        Calib C;
        C.R = R;
        C.d = cfg.d;
        C.n = cfg.n;
        C.even = even;
        C.L = even ? cfg.n / 2 + 2 : (cfg.n + 1) / 2;
        C.p = cfg.p;
        C.ell = cfg.ell > 0 ? cfg.ell : 1;
        C.dv1 = make_divider(R, to_el(f.pi));
        C.dv2 = make_divider(R, to_el(quad::conj(f.pi)));
        if (!even) {
          for (const auto& z : sideA) C.pool.push_back(to_el(z));
        } else {
          auto ha = halves_of(R, sideA), hb = halves_of(R, sideB);
          if (!ha || !hb) continue;
          C.pool = *ha;
          C.poolB = *hb;
        }
        C.used.assign(C.pool.size(), 0);
        C.usedB.assign(C.poolB.size(), 0);
        C.best = best;
        C.dfs(0, 0, El{});
        if (C.best >= 0 && (best < 0 || C.best < best)) best = C.best;
        if (!even) break;  // the negated side yields identical requirements
      }
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

// ---------------------------------------------------------------------------
// Eisenstein sixfold-symmetry search

namespace {

struct I128Pair {
  __int128 x = 0, y = 0;
};

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t hash_sums(long sx, long sy, I128Pair s12) {
  std::uint64_t h = mix64((std::uint64_t)sx);
  h = mix64(h ^ (std::uint64_t)sy);
  h = mix64(h ^ (std::uint64_t)(unsigned __int128)s12.x);
  h = mix64(h ^ (std::uint64_t)((unsigned __int128)s12.x >> 64));
  h = mix64(h ^ (std::uint64_t)(unsigned __int128)s12.y);
  h = mix64(h ^ (std::uint64_t)((unsigned __int128)s12.y >> 64));
  return h;
}

struct SixVals {
  Ring R = ring_of(3);
  std::vector<El> z;       // generators with argument in [0, pi/3): 0 <= s < r
  std::vector<long> r;     // rational part in the omega = exp(2 pi i/3) basis
  std::vector<El> z6;      // exact sixth powers (coordinates fit 64 bits)
  std::vector<I128Pair> z12;
  std::vector<size_t> ratIdx;  // indices of the rational generators, by r

  explicit SixVals(long rmax) {
    for (long rr = 1; rr <= rmax; rr++)
      for (long ss = 0; ss < rr; ss++) {
        El e{rr - ss, ss};  // r + s*omega rewritten on the zeta_6 basis
        if (ss == 0) ratIdx.push_back(z.size());
        z.push_back(e);
        r.push_back(rr);
        El p2 = emul(R, e, e);
        El p3 = emul(R, p2, e);
        El p6 = emul(R, p3, p3);
        z6.push_back(p6);
        // z^12 = (z^6)^2 on the zeta_6 basis: w^2 = w - 1, so c = 1, t = 1
        __int128 x = p6.x, y = p6.y;
        z12.push_back({x * x - y * y, 2 * x * y + y * y});
      }
  }
};

QuadPair orbit_pair(const std::vector<El>& gA, const std::vector<El>& gB) {
  QuadPair P;
  P.d = 3;
  auto us = quad::units(3);
  for (El g : gA)
    for (const auto& u : us) P.A.push_back(quad::mul(u, to_quad(3, g)));
  for (El g : gB)
    for (const auto& u : us) P.B.push_back(quad::mul(u, to_quad(3, g)));
  return P;
}

void record_six(std::map<std::string, QuadPair>& found, const std::vector<El>& gA,
                const std::vector<El>& gB, int n) {
  // identical generator multisets give A = B; skip them
  std::vector<std::pair<long, long>> ka, kb;
  for (El g : gA) ka.push_back({g.x, g.y});
  for (El g : gB) kb.push_back({g.x, g.y});
  std::sort(ka.begin(), ka.end());
  std::sort(kb.begin(), kb.end());
  if (ka == kb) return;
  QuadPair P = orbit_pair(gA, gB);
  // sides must be disjoint
  std::set<std::pair<std::string, std::string>> inA;
  for (const auto& z : P.A) inA.insert({z.x.get_str(), z.y.get_str()});
  for (const auto& z : P.B)
    if (inA.count({z.x.get_str(), z.y.get_str()})) return;
  if (quad::verify_quad(P) < n - 1) return;
  QuadPair C = quad::canonical_quad(P);
  found.emplace(quad::to_string(C), C);
}

std::vector<QuadPair> sixfold12(long rmax) {
  SixVals sv(rmax);
  size_t m = sv.z.size();
  std::map<std::string, QuadPair> found;
  // left pairs (z1 rational, z2 with r2 >= r1) indexed by the exact sixth-power sum
  struct Left {
    long sx, sy;
    size_t i1, i2;
  };
  std::unordered_map<std::uint64_t, std::vector<Left>> leftMap;
  for (size_t i1 : sv.ratIdx)
    for (size_t i2 = 0; i2 < m; i2++) {
      if (sv.r[i2] < sv.r[i1]) continue;
      long sx = sv.z6[i1].x + sv.z6[i2].x;
      long sy = sv.z6[i1].y + sv.z6[i2].y;
      leftMap[mix64((std::uint64_t)sx) ^ (std::uint64_t)sy].push_back({sx, sy, i1, i2});
    }
  for (size_t i3 = 0; i3 < m; i3++)
    for (size_t i4 = i3; i4 < m; i4++) {
      long sx = sv.z6[i3].x + sv.z6[i4].x;
      long sy = sv.z6[i3].y + sv.z6[i4].y;
      auto it = leftMap.find(mix64((std::uint64_t)sx) ^ (std::uint64_t)sy);
      if (it == leftMap.end()) continue;
      for (const Left& L : it->second) {
        if (L.sx != sx || L.sy != sy) continue;  // first moment equation, exactly
        if (sv.r[i3] < sv.r[L.i2]) continue;     // nondecreasing rational parts
        record_six(found, {sv.z[L.i1], sv.z[L.i2]}, {sv.z[i3], sv.z[i4]}, 12);
      }
    }
  std::vector<QuadPair> out;
  for (const auto& [k, P] : found) out.push_back(P);
  return out;
}

std::vector<QuadPair> sixfold18(long rmax) {
  SixVals sv(rmax);
  size_t m = sv.z.size();
  std::map<std::string, QuadPair> found;
  // hashes of all left triples (z1 rational, r1 <= r2 <= r3)
  std::vector<std::uint64_t> hashes;
  auto each_left = [&](auto&& fn) {
    for (size_t i1 : sv.ratIdx)
      for (size_t i2 = 0; i2 < m; i2++) {
        if (sv.r[i2] < sv.r[i1]) continue;
        long bx = sv.z6[i1].x + sv.z6[i2].x, by = sv.z6[i1].y + sv.z6[i2].y;
        I128Pair b12{sv.z12[i1].x + sv.z12[i2].x, sv.z12[i1].y + sv.z12[i2].y};
        for (size_t i3 = i2; i3 < m; i3++) {
          I128Pair s12{b12.x + sv.z12[i3].x, b12.y + sv.z12[i3].y};
          fn(i1, i2, i3, bx + sv.z6[i3].x, by + sv.z6[i3].y, s12);
        }
      }
  };
  each_left([&](size_t, size_t, size_t, long sx, long sy, I128Pair s12) {
    hashes.push_back(hash_sums(sx, sy, s12));
  });
  std::sort(hashes.begin(), hashes.end());
  // one-probe prefilter bitset on the hash low bits
  const std::uint64_t bloomBits = 1ull << 33;
  std::vector<std::uint64_t> bloom(bloomBits / 64, 0);
  for (std::uint64_t h : hashes) {
    std::uint64_t b = h & (bloomBits - 1);
    bloom[b >> 6] |= 1ull << (b & 63);
  }
  // bucket index on the hash high bits
  const int bucketShift = 40;
  std::vector<std::uint32_t> starts((1u << 24) + 1, 0);
  for (std::uint64_t h : hashes) starts[(h >> bucketShift) + 1]++;
  for (size_t i = 1; i < starts.size(); i++) starts[i] += starts[i - 1];
  // stream right triples and collect exact-sum candidates
  struct Cand {
    size_t i4, i5, i6;
    long sx, sy;
    I128Pair s12;
  };
  std::vector<Cand> cands;
  for (size_t i4 = 0; i4 < m; i4++) {
    long b1x = sv.z6[i4].x, b1y = sv.z6[i4].y;
    I128Pair c1{sv.z12[i4].x, sv.z12[i4].y};
    for (size_t i5 = i4; i5 < m; i5++) {
      long b2x = b1x + sv.z6[i5].x, b2y = b1y + sv.z6[i5].y;
      I128Pair c2{c1.x + sv.z12[i5].x, c1.y + sv.z12[i5].y};
      for (size_t i6 = i5; i6 < m; i6++) {
        long sx = b2x + sv.z6[i6].x, sy = b2y + sv.z6[i6].y;
        I128Pair s12{c2.x + sv.z12[i6].x, c2.y + sv.z12[i6].y};
        std::uint64_t h = hash_sums(sx, sy, s12);
        std::uint64_t b = h & (bloomBits - 1);
        if (!((bloom[b >> 6] >> (b & 63)) & 1)) continue;
        std::uint32_t lo = starts[h >> bucketShift], hi = starts[(h >> bucketShift) + 1];
        bool hit = false;
        for (std::uint32_t k = lo; k < hi; k++)
          if (hashes[k] == h) {
            hit = true;
            break;
          }
        if (hit) cands.push_back({i4, i5, i6, sx, sy, s12});
      }
    }
  }
  if (!cands.empty()) {
    // second pass: resolve candidates against the exact left-triple sums
    each_left([&](size_t i1, size_t i2, size_t i3, long sx, long sy, I128Pair s12) {
      for (const Cand& c : cands) {
        if (c.sx != sx || c.sy != sy || c.s12.x != s12.x || c.s12.y != s12.y) continue;
        if (sv.r[c.i4] < sv.r[i3]) continue;  // globally nondecreasing r
        record_six(found, {sv.z[i1], sv.z[i2], sv.z[i3]},
                   {sv.z[c.i4], sv.z[c.i5], sv.z[c.i6]}, 18);
      }
    });
  }
  std::vector<QuadPair> out;
  for (const auto& [k, P] : found) out.push_back(P);
  return out;
}

}  // namespace

std::vector<QuadPair> sixfold_search(int n, long rmax) {
  if (rmax < 1) return {};
  if (n == 12) return sixfold12(rmax);
  if (n == 18) return sixfold18(rmax);
  throw std::invalid_argument("sixfold_search: n must be 12 or 18");
}

}  // namespace pte::quadsearch
