#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "pte/core.hpp"
#include "pte/fixtures.hpp"
#include "pte/zsearch.hpp"

using namespace pte;
using namespace pte::zsearch;

static long imodl(long a, long m) { return ((a % m) + m) % m; }

TEST_CASE("default configs") {
  for (int n = 9; n <= 16; n++) {
    auto c = default_config(n, 500);
    CHECK(c.n == n);
    CHECK(c.H == 500);
    CHECK((c.mode == Mode::odd) == (n % 2 == 1));
    CHECK(c.p1 > c.p2);
    std::set<long> primes{c.p1, c.p2, c.r};
    for (long q : c.qList) primes.insert(q);
    CHECK(primes.size() == 3 + c.qList.size());
  }
  auto c9 = default_config(9, 200);
  CHECK(c9.p1 == 23);
  CHECK(c9.p2 == 19);
  CHECK(c9.qList == std::vector<long>{13, 11});
  CHECK(c9.r == 31);
  CHECK(c9.M1 == (1ull << 50));
  CHECK(c9.M2 == (1ull << 30) + 3);
}

TEST_CASE("chain start and escape clause") {
  SearchConfigZ c;
  c.n = 9;
  c.H = 60;
  c.p1 = 13;
  c.p2 = 11;
  c.r = 31;
  c.mode = Mode::odd;
  // first element: exactly the positive multiples of p1
  auto first = sieve_chain_odd({}, c);
  CHECK(first == std::vector<long>{13, 26, 39, 52});
  // running sum 0 mod p1 frees the third element completely
  auto open = sieve_chain_odd({26, -26}, c);
  std::set<long> classes;
  for (long v : open) classes.insert(imodl(v, 13));
  CHECK(classes.size() == 13);  // unrestricted
  for (long v : open) CHECK((v != 26 && v != -26 && v != 0));
  // nonzero sum pins the class: (a_2 + a_3) = 0 mod p1
  auto pinned = sieve_chain_odd({26, 7}, c);
  CHECK(!pinned.empty());
  for (long v : pinned) CHECK(imodl(7 + v, 13) == 0);
  // the second element answers to p2
  auto second = sieve_chain_odd({26}, c);
  CHECK(!second.empty());
  for (long v : second) CHECK(imodl(26 + v, 11) == 0);
}

TEST_CASE("chain start even mode") {
  SearchConfigZ c;
  c.n = 10;
  c.H = 60;
  c.p1 = 23;
  c.p2 = 17;
  c.r = 31;
  c.mode = Mode::even;
  // b_1 comes from the 1-2 classes +-a_1 mod p1
  auto bs = sieve_chain_even({10}, {}, c);
  CHECK(!bs.empty());
  for (long v : bs) CHECK((imodl(v, 23) == 10 || imodl(v, 23) == 13));
  // a_2 with nonzero running square sum: (a_2^2 - b_1^2) = 0 mod p2
  auto as = sieve_chain_even({10}, {12}, c);
  for (long v : as) CHECK(imodl(v * v - 12 * 12, 17) == 0);
  // vanishing running sum frees a_2
  auto freed = sieve_chain_even({10}, {27}, c);  // 27^2 - 10^2 = 629 = 37*17
  std::set<long> classes;
  for (long v : freed) classes.insert(imodl(v, 17));
  CHECK(classes.size() == 17);
}

// does some ordering of the fixture's elements traverse the full chain?
static bool chain_ordering_exists_odd(std::vector<long> elems, const SearchConfigZ& c,
                                      std::vector<long>& prefix, size_t need) {
  if (prefix.size() == need) return true;
  auto opts = sieve_chain_odd(prefix, c);
  for (long v : opts) {
    auto it = std::find(elems.begin(), elems.end(), v);
    if (it == elems.end()) continue;
    std::vector<long> rest(elems);
    rest.erase(rest.begin() + (it - elems.begin()));
    prefix.push_back(v);
    if (chain_ordering_exists_odd(rest, c, prefix, need)) return true;
    prefix.pop_back();
  }
  return false;
}

static bool chain_ordering_exists_even(std::vector<long> as, std::vector<long> bs,
                                       const SearchConfigZ& c, std::vector<long>& aSel,
                                       std::vector<long>& bSel, size_t needA, size_t needB) {
  if (aSel.size() == needA && bSel.size() == needB) return true;
  bool pickB = bSel.size() < aSel.size() && bSel.size() < needB;
  auto opts = sieve_chain_even(aSel, bSel, c);
  auto& pool = pickB ? bs : as;
  auto& sel = pickB ? bSel : aSel;
  for (long v : opts) {
    auto it = std::find(pool.begin(), pool.end(), v);
    if (it == pool.end()) continue;
    std::vector<long> rest(pool);
    rest.erase(rest.begin() + (it - pool.begin()));
    sel.push_back(v);
    bool ok = pickB ? chain_ordering_exists_even(as, rest, c, aSel, bSel, needA, needB)
                    : chain_ordering_exists_even(rest, bs, c, aSel, bSel, needA, needB);
    if (ok) return true;
    sel.pop_back();
  }
  return false;
}

TEST_CASE("fixtures survive the chain in some ordering") {
  SearchConfigZ c9;
  c9.n = 9;
  c9.H = 200;
  c9.p1 = 13;
  c9.p2 = 11;
  c9.r = 31;
  c9.mode = Mode::odd;
  for (auto P : {fixtures::letac9a(), fixtures::letac9b()}) {
    std::vector<long> elems;
    for (const auto& v : P.A) elems.push_back(v.get_si());
    std::vector<long> prefix;
    CHECK(chain_ordering_exists_odd(elems, c9, prefix, 6));
  }

  SearchConfigZ c10;
  c10.n = 10;
  c10.H = 320;
  c10.p1 = 23;
  c10.p2 = 17;
  c10.r = 31;
  c10.mode = Mode::even;
  auto P = fixtures::z10a();
  std::vector<long> as, bs;
  for (const auto& v : P.A)
    if (v > 0) as.push_back(v.get_si());
  for (const auto& v : P.B)
    if (v > 0) bs.push_back(v.get_si());
  std::vector<long> aSel, bSel;
  CHECK(chain_ordering_exists_even(as, bs, c10, aSel, bSel, 4, 3));
}

// brute-force completion oracles for the q filters
static bool completable_odd(const std::vector<long>& prefix, long q, int n) {
  std::vector<int> cnt(q, 0);
  for (long v : prefix) cnt[imodl(v, q)]++;
  int m = n - (int)prefix.size();
  // extend by a multiset of m residues; recursion over nondecreasing tuples
  std::function<bool(long, int)> go = [&](long lo, int left) -> bool {
    if (left == 0) {
      for (long x = 1; 2 * x < q; x++)
        if (cnt[x] != cnt[q - x]) return false;
      return true;
    }
    for (long x = lo; x < q; x++) {
      cnt[x]++;
      bool ok = go(x, left - 1);
      cnt[x]--;
      if (ok) return true;
    }
    return false;
  };
  return go(0, m);
}

static bool completable_even(const std::vector<long>& aSel, const std::vector<long>& bSel,
                             long q, int n) {
  long classes = q / 2 + 1;
  std::vector<int> ca(classes, 0), cb(classes, 0);
  for (long v : aSel) ca[std::min(imodl(v, q), imodl(-v, q))]++;
  for (long v : bSel) cb[std::min(imodl(v, q), imodl(-v, q))]++;
  int slotsA = n / 2 - (int)aSel.size(), slotsB = n / 2 - (int)bSel.size();
  std::function<bool(std::vector<int>&, long, int, const std::function<bool()>&)> fill =
      [&](std::vector<int>& cnt, long lo, int left, const std::function<bool()>& then) -> bool {
    if (left == 0) return then();
    for (long x = lo; x < classes; x++) {
      cnt[x]++;
      bool ok = fill(cnt, x, left - 1, then);
      cnt[x]--;
      if (ok) return true;
    }
    return false;
  };
  return fill(ca, 0, slotsA, [&] {
    return fill(cb, 0, slotsB, [&] { return ca == cb; });
  });
}

TEST_CASE("q filter equals brute-force completability") {
  std::mt19937 rng(11);
  for (int t = 0; t < 300; t++) {
    long q = std::vector<long>{7, 11, 13}[rng() % 3];
    int n = (rng() % 2) ? 9 : 11;
    int len = 3 + (int)(rng() % (n - 2));
    std::vector<long> prefix;
    for (int i = 0; i < len; i++) {
      long v = (long)(rng() % 101) - 50;
      if (v == 0) v = 1;
      prefix.push_back(v);
    }
    CHECK(local_filter(prefix, q, n) == completable_odd(prefix, q, n));
  }
  for (int t = 0; t < 300; t++) {
    long q = std::vector<long>{7, 11, 13}[rng() % 3];
    int n = (rng() % 2) ? 10 : 12;
    int la = 1 + (int)(rng() % (n / 2)), lb = 1 + (int)(rng() % (n / 2));
    std::vector<long> a, b;
    for (int i = 0; i < la; i++) a.push_back(1 + (long)(rng() % 60));
    for (int i = 0; i < lb; i++) b.push_back(1 + (long)(rng() % 60));
    CHECK(local_filter_even(a, b, q, n) == completable_even(a, b, q, n));
  }
}

static long long popcount_bits(const ResidueTable& T) {
  long long pop = 0;
  for (std::uint64_t w : T.bits) pop += __builtin_popcountll(w);
  return pop;
}

TEST_CASE("residue table odd mode") {
  auto T = residue_table(9, 31);
  CHECK(T.r == 31);
  CHECK(T.dim == 4);
  CHECK(!T.hashed);
  CHECK(T.contains({0, 0, 0, 0}));
  // independent reconstruction: negated odd moments of all 3-multisets mod 31
  std::set<std::vector<long>> want;
  for (long a = 0; a < 31; a++)
    for (long b = a; b < 31; b++)
      for (long c = b; c < 31; c++) {
        std::vector<long> m(4);
        for (int i = 0; i < 4; i++) {
          long s = 0;
          for (long x : {a, b, c}) {
            long pw = 1;
            for (int e = 0; e < 2 * i + 1; e++) pw = pw * x % 31;
            s += pw;
          }
          m[i] = imodl(-s, 31);
        }
        want.insert(m);
      }
  CHECK(popcount_bits(T) == (long long)want.size());
  for (const auto& m : want) CHECK(T.contains(m));
  // soundness on the fixture: every 6-subset's moment vector is a member
  auto A = fixtures::letac9a().A;
  for (int mask = 0; mask < (1 << 9); mask++) {
    if (__builtin_popcount(mask) != 6) continue;
    std::vector<long> m(4, 0);
    for (int j = 0; j < 9; j++) {
      if (!(mask & (1 << j))) continue;
      long x = imodl(A[j].get_si(), 31);
      for (int i = 0; i < 4; i++) {
        long pw = 1;
        for (int e = 0; e < 2 * i + 1; e++) pw = pw * x % 31;
        m[i] = (m[i] + pw) % 31;
      }
    }
    CHECK(T.contains(m));
  }
}

TEST_CASE("residue table even mode") {
  // n=10: one a and two b's remain; achievable difference vectors mod 7
  auto T = residue_table(10, 7);
  CHECK(T.dim == 4);
  std::set<std::vector<long>> want;
  for (long a = 0; a < 7; a++)
    for (long b1 = 0; b1 < 7; b1++)
      for (long b2 = b1; b2 < 7; b2++) {
        std::vector<long> m(4);
        for (int i = 0; i < 4; i++) {
          long s = 0;
          for (long x : {b1, b2}) {
            long pw = 1;
            for (int e = 0; e < 2 * i + 2; e++) pw = pw * x % 7;
            s += pw;
          }
          long pw = 1;
          for (int e = 0; e < 2 * i + 2; e++) pw = pw * a % 7;
          m[i] = imodl(s - pw, 7);
        }
        want.insert(m);
      }
  CHECK(popcount_bits(T) == (long long)want.size());
  for (const auto& m : want) CHECK(T.contains(m));
  // fixture soundness: z10a with 4 a's and 3 b's selected, table mod 31
  auto T31 = residue_table(10, 31);
  auto P = fixtures::z10a();
  std::vector<long> as, bs;
  for (const auto& v : P.A)
    if (v > 0) as.push_back(v.get_si());
  for (const auto& v : P.B)
    if (v > 0) bs.push_back(v.get_si());
  for (int ma = 0; ma < 32; ma++) {
    if (__builtin_popcount(ma) != 4) continue;
    for (int mb = 0; mb < 32; mb++) {
      if (__builtin_popcount(mb) != 3) continue;
      std::vector<long> m(4, 0);
      for (int j = 0; j < 5; j++) {
        for (int i = 0; i < 4; i++) {
          long pa = 1, pb = 1;
          for (int e = 0; e < 2 * i + 2; e++) {
            pa = pa * imodl(as[j], 31) % 31;
            pb = pb * imodl(bs[j], 31) % 31;
          }
          if (ma & (1 << j)) m[i] = imodl(m[i] + pa, 31);
          if (mb & (1 << j)) m[i] = imodl(m[i] - pb, 31);
        }
      }
      CHECK(T31.contains(m));
    }
  }
}

TEST_CASE("finalize completes a known solution") {
  auto A = fixtures::letac9a().A;
  std::vector<long> pref;
  for (int i = 0; i < 6; i++) pref.push_back(A[i].get_si());
  auto f = finalize_odd(pref, 9, 200);
  REQUIRE(f.kind == FinalizeResult::Kind::solution);
  CHECK(f.solution.ideal());
  CHECK(f.solution.A == fixtures::letac9a().A);
  // breaking one element must not complete
  pref[2] += 1;
  auto g = finalize_odd(pref, 9, 200);
  CHECK(g.kind != FinalizeResult::Kind::solution);
}

TEST_CASE("finalize quadratic near miss, size 11") {
  auto f = finalize_odd({-95, -52, -48, -13, -9, 30, 34}, 11, 3500);
  REQUIRE(f.kind == FinalizeResult::Kind::nearMiss);
  CHECK(f.nm.integerPart == std::vector<long>{-95, -52, -48, -13, -9, 30, 34, 61, 65});
  REQUIRE(f.nm.residualPolys.size() == 1);
  CHECK(f.nm.residualPolys[0] ==
        std::vector<mpz_class>{-6468, -27, 1});
  // shifted so the relevant root is the published fractional part
  REQUIRE(f.nm.alphaForms.size() == 1);
  CHECK(f.nm.alphaForms[0] == std::vector<mpz_class>{-8, 163, 1});
  CHECK(f.nm.fieldNote.find("26601") != std::string::npos);
  CHECK(nearmiss_quadratic_ok(f.nm));
  CHECK(nearmiss_float_ok(f.nm));

  auto g = finalize_odd({-589, -363, -185, -170, 41, 234, 355}, 11, 3500);
  REQUIRE(g.kind == FinalizeResult::Kind::nearMiss);
  CHECK(g.nm.integerPart ==
        std::vector<long>{-589, -363, -185, -170, 41, 234, 355, 548, 588});
  REQUIRE(g.nm.residualPolys.size() == 1);
  CHECK(g.nm.residualPolys[0] == std::vector<mpz_class>{-47472, 459, 1});
  REQUIRE(g.nm.alphaForms.size() == 1);
  CHECK(g.nm.alphaForms[0] == std::vector<mpz_class>{30, -633, 1});
  CHECK(nearmiss_quadratic_ok(g.nm));
  CHECK(nearmiss_float_ok(g.nm));
}

TEST_CASE("finalize quintic near miss, size 13") {
  auto f = finalize_odd({-1026, -532, -248, -245, 207, 286, 533, 1025}, 13, 2000);
  REQUIRE(f.kind == FinalizeResult::Kind::nearMiss);
  REQUIRE(f.nm.residualPolys.size() == 1);
  // the published table lists the residual of the negated set; under x -> -x
  // this is x^5 - 1215245 x^3 + 170781322924 x + 931022099280
  std::vector<mpz_class> mine{mpz_class("-931022099280"), mpz_class("170781322924"), 0,
                              -1215245, 0, 1};
  CHECK(f.nm.residualPolys[0] == mine);
  CHECK(f.nm.fieldNote.find("square-free") != std::string::npos);
  CHECK(nearmiss_float_ok(f.nm));

  auto g = finalize_odd({-1827, -989, -715, -405, 64, 902, 1330, 1640}, 13, 2000);
  REQUIRE(g.kind == FinalizeResult::Kind::nearMiss);
  CHECK(g.nm.residualPolys[0].size() == 6);
  CHECK(nearmiss_float_ok(g.nm));
}

TEST_CASE("finalize sextic near miss, size 15") {
  auto f = finalize_odd({-340, -246, -235, -152, -141, 188, 199, 293, 387}, 15, 1100);
  REQUIRE(f.kind == FinalizeResult::Kind::nearMiss);
  REQUIRE(f.nm.residualPolys.size() == 1);
  CHECK(f.nm.residualPolys[0] ==
        std::vector<mpz_class>{mpz_class("2551344634800"), mpz_class("-1340204033304"),
                               mpz_class("11686424346"), 18495675, -221471, -47, 1});
  CHECK(nearmiss_float_ok(f.nm));
}

TEST_CASE("finalize even near miss, size 12") {
  auto f = finalize_even({73, 279, 547, 661}, {155, 197, 671, 711}, 12, 2000);
  REQUIRE(f.kind == FinalizeResult::Kind::nearMiss);
  REQUIRE(f.nm.residualPolys.size() == 2);
  CHECK(f.nm.residualSides == std::vector<int>{0, 1});
  CHECK(f.nm.residualPolys[0] == std::vector<mpz_class>{-137985, 0, 1});
  CHECK(f.nm.residualPolys[1] ==
        std::vector<mpz_class>{mpz_class("47934959865"), 0, -449914, 0, 1});
  // the recovered integer member 715 joins the known a half
  CHECK(f.nm.aPart == std::vector<long>{73, 279, 547, 661, 715});
  CHECK(f.nm.bPart == std::vector<long>{155, 197, 671, 711});
  CHECK(f.nm.integerPart ==
        std::vector<long>{-715, -711, -671, -661, -547, -279, -197, -155, -73, 73, 155,
                          197, 279, 547, 661, 671, 711, 715});
  CHECK(nearmiss_float_ok(f.nm));

  // a genuine even solution's prefix completes
  auto P = fixtures::z10a();
  std::vector<long> as, bs;
  for (const auto& v : P.A)
    if (v > 0) as.push_back(v.get_si());
  for (const auto& v : P.B)
    if (v > 0) bs.push_back(v.get_si());
  auto g = finalize_even({as[0], as[1], as[2], as[3]}, {bs[0], bs[1], bs[2]}, 10, 320);
  REQUIRE(g.kind == FinalizeResult::Kind::solution);
  CHECK(g.solution.ideal());
  CHECK(canonicalize(g.solution).A == canonicalize(P).A);
}

TEST_CASE("near miss and checkpoint json round trips") {
  auto f = finalize_even({73, 279, 547, 661}, {155, 197, 671, 711}, 12, 2000);
  REQUIRE(f.kind == FinalizeResult::Kind::nearMiss);
  auto j = to_json(f.nm);
  auto back = nearmiss_from_json(j);
  CHECK(to_json(back).dump() == j.dump());

  Checkpoint c;
  c.configHash = "abc";
  c.outerIndex = 7;
  c.done = false;
  c.stats.chainPrefixes = 123456789012345LL;
  c.stats.rPassed = 42;
  c.solutions.push_back("{}");
  auto jc = to_json(c);
  auto cb = checkpoint_from_json(jc);
  CHECK(cb.configHash == "abc");
  CHECK(cb.outerIndex == 7);
  CHECK(cb.stats.chainPrefixes == 123456789012345LL);
  CHECK(cb.solutions == c.solutions);
}

TEST_CASE("search finds the smaller Letac solution at height 100") {
  SearchConfigZ c;
  c.n = 9;
  c.H = 100;
  c.p1 = 13;
  c.p2 = 11;
  c.qList = {7};
  c.r = 31;
  c.mode = Mode::odd;
  auto res = search(c);
  REQUIRE(res.solutions.size() == 1);
  CHECK(res.solutions[0].A == fixtures::letac9a().A);
  CHECK(res.solutions[0].ideal());
  CHECK(res.checkpoint.done);
  // pipeline monotonicity
  CHECK(res.stats.chainPrefixes >= res.stats.rPassed);
  CHECK(res.stats.rPassed >= res.stats.qPassed);
  CHECK(res.stats.qPassed >= res.stats.m1Passed);
  CHECK(res.stats.m1Passed >= res.stats.m2Passed);
  CHECK(res.stats.m2Passed >= res.stats.exactPassed);
  CHECK(res.stats.exactPassed >= res.stats.solutionsFound);
  // every emitted quadratic near miss verifies exactly, everything in floats
  for (const auto& nm : res.nearMisses) {
    if (nm.residualPolys.size() == 1 && nm.residualPolys[0].size() == 3 &&
        nm.mode == Mode::odd)
      CHECK(nearmiss_quadratic_ok(nm));
    CHECK(nearmiss_float_ok(nm));
  }

  SUBCASE("interrupted and resumed run is identical") {
    auto part = search(c, nullptr, 2);
    CHECK(!part.checkpoint.done);
    auto rest = search(c, &part.checkpoint);
    CHECK(rest.checkpoint.done);
    REQUIRE(rest.solutions.size() == res.solutions.size());
    for (size_t i = 0; i < res.solutions.size(); i++)
      CHECK(rest.solutions[i].A == res.solutions[i].A);
    REQUIRE(rest.nearMisses.size() == res.nearMisses.size());
    for (size_t i = 0; i < res.nearMisses.size(); i++)
      CHECK(to_json(rest.nearMisses[i]).dump() == to_json(res.nearMisses[i]).dump());
    CHECK(rest.stats.chainPrefixes == res.stats.chainPrefixes);
    CHECK(rest.stats.exactPassed == res.stats.exactPassed);
  }

  SUBCASE("checkpoint of a different config is rejected") {
    auto part = search(c, nullptr, 1);
    SearchConfigZ c2 = c;
    c2.H = 99;
    CHECK_THROWS_AS(search(c2, &part.checkpoint), std::invalid_argument);
  }
}

TEST_CASE("pre-search guard rails") {
  CHECK_THROWS_AS(pre_search(9, 50, 23, {}), std::invalid_argument);
  // a degenerate obstruction list covering everything trips the budget check
  std::vector<modp::LocalSolution> junk(300);
  for (auto& s : junk) {
    s.n = 9;
    s.p = 23;
    s.A.assign(9, 1);
    s.B.assign(9, 22);
    s.kind = modp::LocalKind::odd_symmetric;
  }
  CHECK_THROWS(pre_search(9, 50, 23, junk));
}

TEST_CASE("pre-search of the mod-23 obstruction finds nothing") {
  auto obs = modp::enumerate_local(9, 23, modp::EnumMethod::mitm);
  REQUIRE(obs.size() == 1);
  auto lifted = pre_search(9, 200, 23, obs);
  CHECK(lifted.empty());
}
