#include <doctest.h>

#include "pte/core.hpp"
#include "pte/fixtures.hpp"

using namespace pte;

TEST_CASE("moments") {
  CHECK(moment(make_multiset({1, 5, 6}), 2) == 62);
  CHECK(moment(make_multiset({0}), 7) == 0);
  auto A = fixtures::letac9a().A;
  CHECK(moment(A, 3) == -moment(negated(A), 3));
}

TEST_CASE("verify") {
  CHECK(verify(make_multiset({1, 5, 6}), make_multiset({2, 3, 7})) == 2);
  auto L = fixtures::letac9a();
  CHECK(verify(L.A, L.B) == 8);
  auto A = make_multiset({1, 2, 4});
  CHECK(verify(A, A) == 2);  // degenerate: full degree but not ideal
  CHECK(!make_pte_pair(A, A).ideal());
}

TEST_CASE("constant") {
  CHECK(constant(make_multiset({1, 5, 6}), make_multiset({2, 3, 7})) == 12);
  CHECK(constant(make_multiset({0, 3}), make_multiset({1, 2})) == -2);
}

TEST_CASE("fixtures verify ideal with stated symmetry") {
  auto v = fixtures::all_z();
  std::vector<Symmetry> sym{Symmetry::odd_symmetric, Symmetry::odd_symmetric,
                            Symmetry::even_symmetric, Symmetry::even_symmetric,
                            Symmetry::even_symmetric, Symmetry::even_symmetric,
                            Symmetry::even_symmetric};
  for (size_t i = 0; i < v.size(); i++) {
    CHECK(v[i].ideal());
    CHECK(v[i].symmetry == sym[i]);
  }
}

TEST_CASE("affine covariance") {
  auto P = fixtures::letac9a();
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(12345);
  for (int t = 0; t < 5; t++) {
    long r = 2 + mpz_class(rng.get_z_bits(3)).get_si();
    long s = mpz_class(rng.get_z_bits(4)).get_si() - 8;
    MultisetZ A, B;
    for (auto& x : P.A) A.push_back(r * x + s);
    for (auto& x : P.B) B.push_back(r * x + s);
    A = sorted_multiset(A);
    B = sorted_multiset(B);
    CHECK(verify(A, B) == verify(P.A, P.B));
    mpz_class rn;
    mpz_pow_ui(rn.get_mpz_t(), mpz_class(r).get_mpz_t(), P.n);
    CHECK(constant(A, B) == rn * *P.constant);
  }
}

TEST_CASE("canonicalize") {
  auto P = fixtures::letac9a();
  MultisetZ A2, B2;
  for (auto& x : P.A) A2.push_back(2 * x);
  for (auto& x : P.B) B2.push_back(2 * x);
  auto Q = canonicalize(make_pte_pair(sorted_multiset(A2), sorted_multiset(B2)));
  auto R = canonicalize(P);
  CHECK(Q.A == R.A);
  CHECK(Q.B == R.B);
  // idempotence
  auto R2 = canonicalize(R);
  CHECK(R2.A == R.A);
  CHECK(R2.B == R.B);
  auto S = canonicalize(make_pte_pair(make_multiset({1, 5, 6}), make_multiset({2, 3, 7})));
  CHECK(S.A == make_multiset({1, 5, 6}));
}
