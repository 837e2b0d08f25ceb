#include "pte/fixtures.hpp"

namespace pte::fixtures {

using quad::QuadInt;
using quad::QuadPair;

static PtePair sym_odd(std::vector<long> a) {
  MultisetZ A = make_multiset(a);
  return make_pte_pair(A, negated(A));
}

static PtePair sym_even(std::vector<long> ha, std::vector<long> hb) {
  return make_pte_pair(plus_minus(ha), plus_minus(hb));
}

PtePair letac9a() { return sym_odd({-98, -82, -58, -34, 13, 16, 69, 75, 99}); }
PtePair letac9b() { return sym_odd({-174, -148, -132, -50, -8, 63, 119, 161, 169}); }
PtePair z10a() { return sym_even({99, 100, 188, 301, 313}, {71, 131, 180, 307, 308}); }
PtePair z10b() { return sym_even({103, 189, 366, 452, 515}, {18, 245, 331, 471, 508}); }
PtePair z12a() { return sym_even({22, 61, 86, 127, 140, 151}, {35, 47, 94, 121, 146, 148}); }
PtePair z12b() {
  return sym_even({257, 891, 1109, 1618, 1896, 2058}, {472, 639, 1294, 1514, 1947, 2037});
}
PtePair z12c() {
  return sym_even({107, 622, 700, 1075, 1138, 1511}, {293, 413, 886, 953, 1180, 1510});
}

std::vector<PtePair> all_z() {
  return {letac9a(), letac9b(), z10a(), z10b(), z12a(), z12b(), z12c()};
}

static QuadInt gi(long x, long y) { return {1, x, y}; }

// half sets closed under +/-
static std::vector<QuadInt> pm(std::vector<QuadInt> h) {
  std::vector<QuadInt> s;
  for (const auto& z : h) {
    s.push_back(z);
    s.push_back(quad::neg(z));
  }
  return s;
}

static std::vector<QuadInt> conj_all(const std::vector<QuadInt>& s) {
  std::vector<QuadInt> r;
  for (const auto& z : s) r.push_back(quad::conj(z));
  return r;
}

static std::vector<QuadInt> mul_all(const QuadInt& u, const std::vector<QuadInt>& s) {
  std::vector<QuadInt> r;
  for (const auto& z : s) r.push_back(quad::mul(u, z));
  return r;
}

QuadPair gi10(int which) {
  QuadPair P;
  P.d = 1;
  switch (which) {
    case 0:
      P.A = pm({gi(3, 4), gi(4, 4), gi(4, -4), gi(6, -3), gi(6, 1)});
      P.B = pm({gi(0, 3), gi(4, 5), gi(5, -4), gi(6, -2), gi(6, 2)});
      break;
    case 1:
      P.A = pm({gi(2, -11), gi(3, -8), gi(4, -9), gi(7, -5), gi(7, 1)});
      P.B = pm({gi(1, -11), gi(4, -11), gi(5, 0), gi(6, -1), gi(7, -7)});
      break;
    case 2:
      P.A = pm({gi(3, 4), gi(4, -5), gi(5, 4), gi(6, -3), gi(6, 1)});
      P.B = conj_all(P.A);
      break;
    case 3:
      P.A = pm({gi(3, 14), gi(4, -12), gi(10, -7), gi(10, 1), gi(13, 2)});
      P.B = mul_all(gi(0, 1), conj_all(P.A));
      break;
    default:
      P.A = pm({gi(1, -10), gi(8, -25), gi(17, -22), gi(22, -6), gi(24, -13)});
      P.B = mul_all(gi(0, 1), conj_all(P.A));
      break;
  }
  return P;
}

QuadPair gi12() {
  QuadPair P;
  P.d = 1;
  for (const auto& g : {gi(3, 10), gi(11, 6), gi(8, 10)}) {
    QuadInt z = g;
    for (int k = 0; k < 4; k++) {
      P.A.push_back(z);
      z = quad::mul(gi(0, 1), z);
    }
  }
  P.B = conj_all(P.A);
  return P;
}

QuadPair q2_9() {
  QuadPair P;
  P.d = 2;
  auto q = [](long x, long y) { return QuadInt{2, x, y}; };
  P.A = {q(-3, -3), q(-2, 3), q(-1, -5), q(0, 1), q(1, -5),
         q(2, 3),  q(3, -3), q(0, 4),  q(0, 5)};
  for (const auto& z : P.A) P.B.push_back(quad::neg(z));
  return P;
}

static QuadInt om(long a, long b) { return quad::from_omega_basis(a, b); }

QuadPair ei9() {
  QuadPair P;
  P.d = 3;
  P.A = {om(-26, -27), om(-54, -24), om(-46, -21), om(-24, -2), om(14, 2),
         om(11, 7),   om(43, 17),  om(27, 23),  om(55, 25)};
  for (const auto& z : P.A) P.B.push_back(quad::neg(z));
  return P;
}

static QuadPair sixfold(std::vector<QuadInt> genA, std::vector<QuadInt> genB) {
  QuadPair P;
  P.d = 3;
  QuadInt zeta{3, 0, 1};
  for (const auto* side : {&genA, &genB}) {
    auto& out = side == &genA ? P.A : P.B;
    for (const auto& g : *side) {
      QuadInt z = g;
      for (int j = 0; j < 6; j++) {
        out.push_back(z);
        z = quad::mul(zeta, z);
      }
    }
  }
  return P;
}

QuadPair ei12a() { return sixfold({om(3, 0), om(9, 2)}, {om(11, 2), om(11, 7)}); }
QuadPair ei12b() { return sixfold({om(9, 18), om(0, 22)}, {om(23, 46), om(0, 40)}); }

std::vector<QuadPair> all_quad() {
  std::vector<QuadPair> v;
  for (int i = 0; i < 5; i++) v.push_back(gi10(i));
  v.push_back(gi12());
  v.push_back(q2_9());
  v.push_back(ei9());
  v.push_back(ei12a());
  v.push_back(ei12b());
  return v;
}

}  // namespace pte::fixtures
