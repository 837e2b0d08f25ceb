#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "pte/fixtures.hpp"
#include "pte/fnpoly.hpp"

using namespace pte::fnpoly;

namespace {

struct Ref {
  int e[7];
  long c;
};

// published filter polynomials, term for term
const std::vector<Ref> ref9 = {
    {{10, 0, 0, 0}, 1},  {{7, 1, 0, 0}, -15}, {{1, 3, 0, 0}, -175},
    {{5, 0, 1, 0}, 63},  {{2, 1, 1, 0}, 315}, {{0, 0, 2, 0}, -189},
    {{3, 0, 0, 1}, -225}, {{0, 1, 0, 1}, 225},
};

const std::vector<Ref> ref10 = {
    {{6, 0, 0, 0}, 1},  {{4, 1, 0, 0}, -3},  {{2, 2, 0, 0}, 9},
    {{0, 3, 0, 0}, 9},  {{3, 0, 1, 0}, -8},  {{1, 1, 1, 0}, -24},
    {{0, 0, 2, 0}, 16}, {{2, 0, 0, 1}, 18},  {{0, 1, 0, 1}, -18},
};

const std::vector<Ref> ref11 = {
    {{15, 0, 0, 0, 0}, 1},      {{12, 1, 0, 0, 0}, -35},
    {{9, 2, 0, 0, 0}, 175},     {{6, 3, 0, 0, 0}, -1225},
    {{3, 4, 0, 0, 0}, -12250},  {{0, 5, 0, 0, 0}, 6125},
    {{10, 0, 1, 0, 0}, 252},    {{7, 1, 1, 0, 0}, 945},
    {{4, 2, 1, 0, 0}, 33075},   {{1, 3, 1, 0, 0}, -11025},
    {{5, 0, 2, 0, 0}, -11907},  {{2, 1, 2, 0, 0}, -59535},
    {{0, 0, 3, 0, 0}, -35721},  {{8, 0, 0, 1, 0}, -2025},
    {{5, 1, 0, 1, 0}, -14175},  {{2, 2, 0, 1, 0}, 70875},
    {{3, 0, 1, 1, 0}, 42525},   {{0, 1, 1, 1, 0}, 85050},
    {{1, 0, 0, 2, 0}, -91125},  {{6, 0, 0, 0, 1}, 11025},
    {{3, 1, 0, 0, 1}, -55125},  {{0, 2, 0, 0, 1}, -55125},
    {{1, 0, 1, 0, 1}, 99225},
};

const std::vector<Ref> ref12 = {
    {{9, 0, 0, 0, 0}, 1},    {{5, 2, 0, 0, 0}, 18},   {{1, 4, 0, 0, 0}, -135},
    {{6, 0, 1, 0, 0}, -24},  {{2, 2, 1, 0, 0}, 360},  {{0, 0, 3, 0, 0}, 320},
    {{3, 1, 0, 1, 0}, -360}, {{0, 1, 1, 1, 0}, -720}, {{1, 0, 0, 2, 0}, 540},
    {{4, 0, 0, 0, 1}, 144},  {{0, 2, 0, 0, 1}, 432},  {{1, 0, 1, 0, 1}, -576},
};

const std::vector<Ref> ref13 = {
    {{21, 0, 0, 0, 0, 0}, 1},          {{18, 1, 0, 0, 0, 0}, -70},
    {{15, 2, 0, 0, 0, 0}, 1155},       {{12, 3, 0, 0, 0, 0}, -9800},
    {{9, 4, 0, 0, 0, 0}, -67375},      {{6, 5, 0, 0, 0, 0}, -1414875},
    {{3, 6, 0, 0, 0, 0}, 4716250},     {{0, 7, 0, 0, 0, 0}, 2358125},
    {{16, 0, 1, 0, 0, 0}, 756},        {{13, 1, 1, 0, 0, 0}, -6615},
    {{10, 2, 1, 0, 0, 0}, 291060},     {{7, 3, 1, 0, 0, 0}, 4729725},
    {{4, 4, 1, 0, 0, 0}, -12733875},   {{1, 5, 1, 0, 0, 0}, -12733875},
    {{11, 0, 2, 0, 0, 0}, -83349},     {{8, 1, 2, 0, 0, 0}, -3929310},
    {{5, 2, 2, 0, 0, 0}, -13752585},   {{2, 3, 2, 0, 0, 0}, 45841950},
    {{6, 0, 3, 0, 0, 0}, 8251551},     {{3, 1, 3, 0, 0, 0}, -41257755},
    {{0, 2, 3, 0, 0, 0}, -41257755},   {{1, 0, 4, 0, 0, 0}, -74263959},
    {{14, 0, 0, 1, 0, 0}, -10125},     {{11, 1, 0, 1, 0, 0}, -56700},
    {{8, 2, 0, 1, 0, 0}, -2338875},    {{5, 3, 0, 1, 0, 0}, 27286875},
    {{2, 4, 0, 1, 0, 0}, -27286875},   {{9, 0, 1, 1, 0, 0}, 2338875},
    {{6, 1, 1, 1, 0, 0}, 9823275},     {{3, 2, 1, 1, 0, 0}, 49116375},
    {{0, 3, 1, 1, 0, 0}, 81860625},    {{1, 1, 2, 1, 0, 0}, 265228425},
    {{7, 0, 0, 2, 0, 0}, -6014250},    {{4, 1, 0, 2, 0, 0}, -105249375},
    {{1, 2, 0, 2, 0, 0}, -105249375},  {{2, 0, 1, 2, 0, 0}, -189448875},
    {{0, 0, 0, 3, 0, 0}, 135320625},   {{12, 0, 0, 0, 1, 0}, 121275},
    {{9, 1, 0, 0, 1, 0}, 606375},      {{6, 2, 0, 0, 1, 0}, -25467750},
    {{3, 3, 0, 0, 1, 0}, -21223125},   {{0, 4, 0, 0, 1, 0}, -42446250},
    {{7, 0, 1, 0, 1, 0}, -3274425},    {{4, 1, 1, 0, 1, 0}, 114604875},
    {{1, 2, 1, 0, 1, 0}, -229209750},  {{2, 0, 2, 0, 1, 0}, 206288775},
    {{5, 0, 0, 1, 1, 0}, 49116375},    {{2, 1, 0, 1, 1, 0}, 245581875},
    {{0, 0, 1, 1, 1, 0}, -294698250},  {{3, 0, 0, 0, 2, 0}, -191008125},
    {{0, 1, 0, 0, 2, 0}, 191008125},   {{10, 0, 0, 0, 0, 1}, -893025},
    {{7, 1, 0, 0, 0, 1}, 13395375},    {{1, 3, 0, 0, 0, 1}, 156279375},
    {{5, 0, 1, 0, 0, 1}, -56260575},   {{2, 1, 1, 0, 0, 1}, -281302875},
    {{0, 0, 2, 0, 0, 1}, 168781725},   {{3, 0, 0, 1, 0, 1}, 200930625},
    {{0, 1, 0, 1, 0, 1}, -200930625},
};

const std::vector<Ref> ref14 = {
    {{12, 0, 0, 0, 0, 0}, -1},        {{10, 1, 0, 0, 0, 0}, 6},
    {{8, 2, 0, 0, 0, 0}, -45},        {{6, 3, 0, 0, 0, 0}, 60},
    {{4, 4, 0, 0, 0, 0}, 225},        {{2, 5, 0, 0, 0, 0}, 1350},
    {{0, 6, 0, 0, 0, 0}, -675},       {{9, 0, 1, 0, 0, 0}, 40},
    {{5, 2, 1, 0, 0, 0}, -720},       {{3, 3, 1, 0, 0, 0}, -4800},
    {{1, 4, 1, 0, 0, 0}, 1800},       {{6, 0, 2, 0, 0, 0}, -240},
    {{4, 1, 2, 0, 0, 0}, 3600},       {{2, 2, 2, 0, 0, 0}, 3600},
    {{0, 3, 2, 0, 0, 0}, -1200},      {{3, 0, 3, 0, 0, 0}, -3200},
    {{1, 1, 3, 0, 0, 0}, -9600},      {{0, 0, 4, 0, 0, 0}, -6400},
    {{8, 0, 0, 1, 0, 0}, -90},        {{6, 1, 0, 1, 0, 0}, 1080},
    {{4, 2, 0, 1, 0, 0}, 2700},       {{2, 3, 0, 1, 0, 0}, -5400},
    {{0, 4, 0, 1, 0, 0}, 1350},       {{5, 0, 1, 1, 0, 0}, -1440},
    {{1, 2, 1, 1, 0, 0}, 21600},      {{2, 0, 2, 1, 0, 0}, 7200},
    {{0, 1, 2, 1, 0, 0}, 21600},      {{4, 0, 0, 2, 0, 0}, -2700},
    {{2, 1, 0, 2, 0, 0}, -16200},     {{0, 2, 0, 2, 0, 0}, -8100},
    {{1, 0, 1, 2, 0, 0}, -21600},     {{0, 0, 0, 3, 0, 0}, 16200},
    {{7, 0, 0, 0, 1, 0}, -288},       {{5, 1, 0, 0, 1, 0}, -2592},
    {{3, 2, 0, 0, 1, 0}, 4320},       {{1, 3, 0, 0, 1, 0}, -12960},
    {{4, 0, 1, 0, 1, 0}, 5760},       {{0, 2, 1, 0, 1, 0}, -17280},
    {{1, 0, 2, 0, 1, 0}, 23040},      {{3, 0, 0, 1, 1, 0}, 8640},
    {{1, 1, 0, 1, 1, 0}, 25920},      {{0, 0, 1, 1, 1, 0}, -34560},
    {{2, 0, 0, 0, 2, 0}, -20736},     {{0, 1, 0, 0, 2, 0}, 20736},
    {{6, 0, 0, 0, 0, 1}, 1200},       {{4, 1, 0, 0, 0, 1}, -3600},
    {{2, 2, 0, 0, 0, 1}, 10800},      {{0, 3, 0, 0, 0, 1}, 10800},
    {{3, 0, 1, 0, 0, 1}, -9600},      {{1, 1, 1, 0, 0, 1}, -28800},
    {{0, 0, 2, 0, 0, 1}, 19200},      {{2, 0, 0, 1, 0, 1}, 21600},
    {{0, 1, 0, 1, 0, 1}, -21600},
};

void check_matches_reference(const SparsePoly& F, const std::vector<Ref>& ref) {
  REQUIRE(F.terms.size() == ref.size());
  // the construction pins the leading sign; the published form may be negated
  int sign = ref[0].c > 0 ? 1 : -1;
  for (const auto& t : ref) {
    Exponents e(t.e, t.e + F.varCount);
    auto it = F.terms.find(e);
    REQUIRE_MESSAGE(it != F.terms.end(), "missing printed term");
    CHECK(it->second == sign * t.c);
  }
}

// minimal exact multivariate arithmetic, independent of the library's
// symmetric-function expansion, for the identity checks
using Multi = std::map<std::vector<int>, mpz_class>;

Multi mul(const Multi& a, const Multi& b) {
  Multi out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e = ea;
      for (size_t i = 0; i < e.size(); i++) e[i] += eb[i];
      out[e] += ca * cb;
    }
  return out;
}

Multi power_sum(int nvars, int offset, int total, int deg, int sgn) {
  // sgn * sum of v_{offset..offset+nvars-1}^deg inside `total` variables
  Multi out;
  for (int i = 0; i < nvars; i++) {
    std::vector<int> e(total, 0);
    e[offset + i] = deg;
    out[e] += sgn;
  }
  return out;
}

// substitute the defining power sums into F and expand fully
Multi substitute(const SparsePoly& F, int U, int W) {
  int total = U + W;
  Multi acc;
  for (const auto& [e, c] : F.terms) {
    Multi term;
    term[std::vector<int>(total, 0)] = c;
    for (int k = 0; k < F.varCount; k++) {
      if (!e[k]) continue;
      Multi sub;
      if (F.kind == WeightKind::odd) {
        sub = power_sum(U, 0, total, 2 * k + 1, 1);
      } else {
        sub = power_sum(W, U, total, 2 * k + 2, 1);  // b-block positive
        for (const auto& [ee, cc] : power_sum(U, 0, total, 2 * k + 2, 1))
          sub[ee] -= cc;
      }
      for (int t = 0; t < e[k]; t++) term = mul(term, sub);
    }
    for (const auto& [ee, cc] : term) acc[ee] += cc;
  }
  return acc;
}

std::vector<mpz_class> prefix_moments(const pte::PtePair& P, int n) {
  // moment vector at which F_n must vanish for a completable selection
  std::vector<mpz_class> out;
  if (n % 2) {
    std::vector<mpz_class> A = P.A;
    std::sort(A.begin(), A.end());
    int len = (n + 3) / 2;
    for (int k = 1; k <= n / 2; k++) {
      mpz_class m = 0, pw;
      for (int i = 0; i < len; i++) {
        mpz_pow_ui(pw.get_mpz_t(), A[i].get_mpz_t(), 2 * k - 1);
        m += pw;
      }
      out.push_back(m);
    }
  } else {
    auto half = [](std::vector<mpz_class> v) {
      for (auto& x : v) x = abs(x);
      std::sort(v.begin(), v.end());
      std::vector<mpz_class> h;
      for (size_t i = 0; i < v.size(); i += 2) h.push_back(v[i]);
      return h;
    };
    auto a = half(P.A), b = half(P.B);
    int s = (n + 3) / 4 + 1, t = n / 4 + 1;
    for (int k = 1; k <= n / 2 - 1; k++) {
      mpz_class m = 0, pw;
      for (int i = 0; i < s; i++) {
        mpz_pow_ui(pw.get_mpz_t(), a[i].get_mpz_t(), 2 * k);
        m += pw;
      }
      for (int i = 0; i < t; i++) {
        mpz_pow_ui(pw.get_mpz_t(), b[i].get_mpz_t(), 2 * k);
        m -= pw;
      }
      out.push_back(m);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("weighted monomial enumeration") {
  auto m = weighted_monomials(10, 9, WeightKind::odd);
  REQUIRE(m.size() == 9);
  std::vector<Exponents> want = {{10, 0, 0, 0}, {7, 1, 0, 0}, {4, 2, 0, 0},
                                 {1, 3, 0, 0},  {5, 0, 1, 0}, {2, 1, 1, 0},
                                 {0, 0, 2, 0},  {3, 0, 0, 1}, {0, 1, 0, 1}};
  CHECK(m == want);
  CHECK(weighted_monomials(1, 9, WeightKind::odd) ==
        std::vector<Exponents>{{1, 0, 0, 0}});
  CHECK(weighted_monomials(32, 16, WeightKind::even).size() == 164);
  // odd weights: total degree parity is the parity of the weight
  for (const auto& e : weighted_monomials(15, 11, WeightKind::odd)) {
    int deg = 0;
    for (int x : e) deg += x;
    CHECK(deg % 2 == 1);
  }
}

TEST_CASE("construction reproduces the published polynomials") {
  struct Row {
    int n, D;
    const std::vector<Ref>* ref;
  };
  for (const auto& [n, D, ref] : std::vector<Row>{{9, 10, &ref9},
                                                  {10, 12, &ref10},
                                                  {11, 15, &ref11},
                                                  {12, 18, &ref12},
                                                  {13, 21, &ref13},
                                                  {14, 24, &ref14}}) {
    auto [spec, F] = build_fn(n);
    CHECK(spec.D == D);
    CHECK(spec.kernelDim == 1);
    CHECK(spec.varCount == (n % 2 ? n / 2 : n / 2 - 1));
    check_matches_reference(F, *ref);
  }
}

TEST_CASE("large sizes match the published statistics") {
  auto [s15, F15] = build_fn(15);
  CHECK(s15.D == 28);
  CHECK(F15.terms.size() == 159);
  CHECK(height(F15) == mpz_class("18101840006250"));
  auto [s16, F16] = build_fn(16);
  CHECK(s16.D == 32);
  CHECK(F16.terms.size() == 77);
  CHECK(height(F16) == mpz_class("14515200"));
  CHECK(s16.arityA == 3);
  CHECK(s16.arityB == 3);
}

TEST_CASE("substituted power sums cancel identically") {
  for (int n : {9, 10, 11, 12, 13}) {
    auto [spec, F] = build_fn(n);
    int U = spec.arityA, W = spec.arityB;
    auto expanded = substitute(F, U, W);
    for (const auto& [e, c] : expanded) CHECK(c == 0);
  }
  std::mt19937 rng(11);
  for (int n : {14, 15, 16}) {
    auto [spec, F] = build_fn(n);
    for (int trial = 0; trial < 100; trial++) {
      int total = spec.arityA + spec.arityB;
      std::vector<mpz_class> u(total);
      for (auto& x : u) x = (long)(rng() % 41) - 20;
      std::vector<mpz_class> pt(F.varCount);
      for (int k = 0; k < F.varCount; k++) {
        mpz_class m = 0, pw;
        for (int i = 0; i < total; i++) {
          int deg = F.kind == WeightKind::odd ? 2 * k + 1 : 2 * k + 2;
          mpz_pow_ui(pw.get_mpz_t(), u[i].get_mpz_t(), deg);
          // even case: a-block negative, b-block positive
          if (F.kind == WeightKind::even && i < spec.arityA)
            m -= pw;
          else
            m += pw;
        }
        pt[k] = m;
      }
      CHECK(eval_fn(F, pt) == 0);
    }
  }
}

TEST_CASE("vanishing at completable prefixes of known solutions") {
  auto [s9, F9] = build_fn(9);
  for (const auto& P : {pte::fixtures::letac9a(), pte::fixtures::letac9b()})
    CHECK(eval_fn(F9, prefix_moments(P, 9)) == 0);
  auto [s10, F10] = build_fn(10);
  for (const auto& P : {pte::fixtures::z10a(), pte::fixtures::z10b()})
    CHECK(eval_fn(F10, prefix_moments(P, 10)) == 0);
  auto [s12, F12] = build_fn(12);
  for (const auto& P :
       {pte::fixtures::z12a(), pte::fixtures::z12b(), pte::fixtures::z12c()})
    CHECK(eval_fn(F12, prefix_moments(P, 12)) == 0);
}

TEST_CASE("evaluation oracles") {
  auto [spec, F] = build_fn(9);
  CHECK(eval_fn(F, std::vector<mpz_class>(4, 0)) == 0);

  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; trial++) {
    std::vector<std::int64_t> x(4);
    std::vector<mpz_class> xz(4);
    for (int i = 0; i < 4; i++) {
      x[i] = (std::int64_t)(rng() % 2001) - 1000;
      xz[i] = (long)x[i];
    }
    mpz_class exact = eval_fn(F, xz);
    // naive independent term-by-term evaluation
    mpz_class naive = 0, pw;
    for (const auto& [e, c] : F.terms) {
      mpz_class term = c;
      for (int i = 0; i < 4; i++) {
        mpz_pow_ui(pw.get_mpz_t(), xz[i].get_mpz_t(), e[i]);
        term *= pw;
      }
      naive += term;
    }
    CHECK(exact == naive);

    mpz_class r50, r30;
    mpz_fdiv_r_2exp(r50.get_mpz_t(), exact.get_mpz_t(), 50);
    CHECK(eval_fn_mod2_50(F, x) == r50.get_ui());
    r30 = exact % (long)kCheckPrime;
    if (r30 < 0) r30 += (long)kCheckPrime;
    CHECK(eval_fn_mod(F, x, kCheckPrime) == r30.get_ui());
  }
}

TEST_CASE("candidate residue filter") {
  // soundness: the residue of the true next element always survives
  auto [s9, F9] = build_fn(9);
  for (long r : {29L, 31L}) {
    for (const auto& P : {pte::fixtures::letac9a(), pte::fixtures::letac9b()}) {
      std::vector<mpz_class> A = P.A;
      std::sort(A.begin(), A.end());
      std::vector<long> pm(4, 0);
      for (int k = 1; k <= 4; k++) {
        mpz_class m = 0, pw;
        for (int i = 0; i < 5; i++) {
          mpz_pow_ui(pw.get_mpz_t(), A[i].get_mpz_t(), 2 * k - 1);
          m += pw;
        }
        pm[k - 1] = (long)mpz_fdiv_ui(m.get_mpz_t(), r);
      }
      auto cand = candidate_residues(F9, pm, r);
      CHECK(cand.size() <= (size_t)r);
      long next = (long)mpz_fdiv_ui(A[5].get_mpz_t(), r);
      CHECK(std::count(cand.begin(), cand.end(), next) == 1);
    }
  }

  // the filter is nontrivial on random prefixes (calibration, n=11, r=23)
  auto [s11, F11] = build_fn(11);
  std::mt19937 rng(17);
  long r = 23;
  size_t best = r;
  for (int trial = 0; trial < 20; trial++) {
    std::vector<long> pm(5);
    for (auto& m : pm) m = rng() % r;
    best = std::min(best, candidate_residues(F11, pm, r).size());
  }
  CHECK(best < (size_t)r);

  // table hook: an always-false table empties the set
  std::vector<long> pm(5, 1);
  auto none =
      candidate_residues(F11, pm, r, 1, [](const std::vector<long>&) { return false; });
  CHECK(none.empty());
}

TEST_CASE("parity of total degree in the odd construction") {
  for (int n : {9, 11, 13, 15}) {
    auto [spec, F] = build_fn(n);
    for (const auto& [e, c] : F.terms) {
      int deg = 0;
      for (int x : e) deg += x;
      CHECK(deg % 2 == spec.D % 2);
    }
  }
}

TEST_CASE("serialization roundtrip") {
  auto [spec, F] = build_fn(13);
  auto j = to_json(F);
  CHECK(j.at("weightKind") == "odd");
  auto G = poly_from_json(j);
  CHECK(G.varCount == F.varCount);
  CHECK(G.kind == F.kind);
  CHECK(G.terms == F.terms);
  // coefficients serialize as decimal strings
  bool sawBig = false;
  for (const auto& t : j.at("terms"))
    if (t.at("c").get<std::string>() == "-294698250") sawBig = true;
  CHECK(sawBig);
}
