#include <doctest.h>

#include <complex>

#include "pte/fixtures.hpp"
#include "pte/quadring.hpp"

using namespace pte::quad;

TEST_CASE("basic arithmetic and norms") {
  QuadInt z{1, 3, 4};
  CHECK(norm(z) == 25);
  // (1+2w)^2 = -3 in d=3 (w = zeta_6, omega = w-1)
  QuadInt rho3 = from_omega_basis(1, 2);  // 1+2*omega
  QuadInt sq = mul(rho3, rho3);
  CHECK(sq == QuadInt{3, -3, 0});
  // norm multiplicativity on random-ish pairs
  for (int d : {1, 2, 3, 7, 11, 19}) {
    QuadInt a{d, 5, -3}, b{d, -2, 7};
    CHECK(norm(mul(a, b)) == norm(a) * norm(b));
    // embedding cross-check
    double sd = std::sqrt((double)d);
    auto emb = [&](const QuadInt& q) {
      if (half_integral_basis(d))
        return std::complex<double>(q.x.get_d() + q.y.get_d() / 2, q.y.get_d() * sd / 2);
      return std::complex<double>(q.x.get_d(), q.y.get_d() * sd);
    };
    CHECK(std::abs(std::norm(emb(a)) - norm(a).get_d()) < 1e-6);
    CHECK(std::abs(emb(mul(a, b)) - emb(a) * emb(b)) < 1e-6);
    CHECK(std::abs(emb(conj(a)) - std::conj(emb(a))) < 1e-9);
  }
}

TEST_CASE("units") {
  CHECK(units(1).size() == 4);
  CHECK(units(3).size() == 6);
  CHECK(units(7).size() == 2);
  for (auto& u : units(3)) CHECK(norm(u) == 1);
}

TEST_CASE("divides / divexact") {
  CHECK(divides(QuadInt{1, 1, 1}, QuadInt{1, 2, 0}));
  CHECK(!divides(QuadInt{1, 2, 1}, QuadInt{1, 2, -1}));
  // rho7 = i*sqrt(7) = 2w-1 divides 7
  QuadInt rho7{7, -1, 2};
  CHECK(norm(rho7) == 7);
  CHECK(divides(rho7, QuadInt{7, 7, 0}));
}

TEST_CASE("unit_canonical") {
  QuadInt z{1, -3, -3};
  auto c = unit_canonical(z);
  for (auto& u : units(1)) CHECK(unit_canonical(mul(u, z)) == c);
  QuadInt e{3, 2, 5};
  auto ce = unit_canonical(e);
  int hits = 0;
  for (auto& u : units(3))
    if (unit_canonical(mul(u, e)) == ce) hits++;
  CHECK(hits == 6);
}

TEST_CASE("split_prime") {
  auto f = split_prime(5, 1);
  CHECK(f.behavior == Behavior::split);
  CHECK(norm(f.pi) == 5);
  CHECK(split_prime(2, 1).behavior == Behavior::ramified);
  CHECK(split_prime(2, 2).behavior == Behavior::ramified);
  CHECK(split_prime(5, 3).behavior == Behavior::inert);
  CHECK(split_prime(2, 7).behavior == Behavior::split);
  CHECK(split_prime(3, 3).behavior == Behavior::ramified);
  CHECK(split_prime(19, 19).behavior == Behavior::ramified);
  // bounded exhaustion: inert means norm form insoluble
  for (long p : {3L, 7L, 11L, 19L, 23L}) {
    auto g = split_prime(p, 1);
    if (p % 4 == 3) CHECK(g.behavior == Behavior::inert);
  }
}

TEST_CASE("enum_by_norm") {
  auto v = enum_by_norm(2, 1, nullptr, true);
  REQUIRE(v.size() == 2);
  CHECK(norm(v[0]) == 1);
  CHECK(norm(v[1]) == 2);
  // canonical count * |U| == full count for norms with no extra symmetry
  auto full = enum_by_norm(25, 1, nullptr, false);
  auto canon = enum_by_norm(25, 1, nullptr, true);
  CHECK(full.size() == 4 * canon.size());
  QuadInt pi{1, 2, 1};
  for (auto& z : enum_by_norm(50, 1, &pi, false)) {
    CHECK(divides(pi, z));
    CHECK(norm(z) % 5 == 0);
  }
}

TEST_CASE("quad fixtures verify as ideal symmetric") {
  using namespace pte::fixtures;
  for (auto& P : all_quad()) {
    int n = (int)P.A.size();
    CHECK(verify_quad(P) == n - 1);
    auto C = constant_quad(P);
    CHECK(!is_zero(C));
  }
}

TEST_CASE("canonical_quad") {
  using namespace pte::fixtures;
  auto P = gi10(0);
  // multiplying by 1+i then canonicalizing returns the canonical primitive form
  QuadPair Q;
  Q.d = 1;
  for (auto& z : P.A) Q.A.push_back(mul(QuadInt{1, 1, 1}, z));
  for (auto& z : P.B) Q.B.push_back(mul(QuadInt{1, 1, 1}, z));
  auto c1 = canonical_quad(Q), c2 = canonical_quad(P);
  CHECK(quad_pair_equal(c1, c2));
  // idempotent, conjugation-invariant
  auto c3 = canonical_quad(c1);
  CHECK(quad_pair_equal(c3, c1));
  QuadPair R;
  R.d = 1;
  for (auto& z : P.A) R.A.push_back(conj(z));
  for (auto& z : P.B) R.B.push_back(conj(z));
  CHECK(quad_pair_equal(canonical_quad(R), c2));
}
