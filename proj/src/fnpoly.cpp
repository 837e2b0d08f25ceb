#include "pte/fnpoly.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <stdexcept>

namespace pte::fnpoly {

namespace {

int weight_of(int k, WeightKind kind) {  // 1-based variable index
  return kind == WeightKind::odd ? 2 * k - 1 : 2 * k;
}

int var_count(int n, WeightKind kind) {
  return kind == WeightKind::odd ? n / 2 : n / 2 - 1;
}

// ---- symmetric-function expansion ----
//
// Substituted monomials are products of power sums, expanded in the basis of
// monomial symmetric functions indexed by partitions (sorted descending, at
// most `maxParts` parts since there are only that many unknowns).

using Partition = std::vector<int>;

// p_r * m_lambda = sum over adding r to one part (or appending a part r),
// with multiplicity of the grown part in the result
template <class Coef>
std::map<Partition, Coef> mul_power_sum(const std::map<Partition, Coef>& in, int r,
                                        int maxParts) {
  std::map<Partition, Coef> out;
  for (const auto& [lam, c] : in) {
    for (size_t i = 0; i < lam.size(); i++) {
      if (i > 0 && lam[i] == lam[i - 1]) continue;  // distinct part values once
      Partition mu = lam;
      mu[i] += r;
      std::sort(mu.rbegin(), mu.rend());
      long mult = std::count(mu.begin(), mu.end(), lam[i] + r);
      out[mu] += c * Coef(mult);
    }
    if ((int)lam.size() < maxParts) {
      Partition mu = lam;
      mu.push_back(r);
      std::sort(mu.rbegin(), mu.rend());
      long mult = std::count(mu.begin(), mu.end(), r);
      out[mu] += c * Coef(mult);
    }
  }
  return out;
}

// rows for the even case live on pairs of partitions (a-block, b-block);
// encode a pair as one vector with a -1 separator
Partition encode_pair(const Partition& a, const Partition& b) {
  Partition k = a;
  k.push_back(-1);
  k.insert(k.end(), b.begin(), b.end());
  return k;
}

// coefficient ring wrapper so the same expansion code runs exactly (mpz) and
// mod a word-size prime (for the cheap rank filter)
struct ModCoef {
  static constexpr std::uint64_t P = 1000000007ull;
  std::uint64_t v = 0;
  ModCoef() = default;
  explicit ModCoef(long x) : v(((x % (long)P) + (long)P) % (long)P) {}
  ModCoef& operator+=(ModCoef o) {
    v = (v + o.v) % P;
    return *this;
  }
  ModCoef operator*(ModCoef o) const {
    ModCoef r;
    r.v = v * o.v % P;
    return r;
  }
  ModCoef operator-() const {
    ModCoef r;
    r.v = (P - v) % P;
    return r;
  }
  bool zero() const { return v == 0; }
};

// expansion of one substituted monomial: odd case substitutes the power sum
// p_{2k-1} of a single block of unknowns; even case substitutes
// p_{2k}(a-block) - p_{2k}(b-block)
template <class Coef>
std::map<Partition, Coef> expand_monomial(const Exponents& mono, WeightKind kind, int U,
                                          int W) {
  std::map<Partition, Coef> cur;
  if (kind == WeightKind::odd) {
    cur[{}] = Coef(1);
    for (size_t k = 0; k < mono.size(); k++)
      for (int t = 0; t < mono[k]; t++)
        cur = mul_power_sum(cur, weight_of((int)k + 1, kind), U);
    return cur;
  }
  cur[encode_pair({}, {})] = Coef(1);
  for (size_t k = 0; k < mono.size(); k++) {
    int r = weight_of((int)k + 1, kind);
    for (int t = 0; t < mono[k]; t++) {
      std::map<Partition, Coef> nxt;
      for (const auto& [key, c] : cur) {
        auto sep = std::find(key.begin(), key.end(), -1);
        Partition pa(key.begin(), sep), pb(sep + 1, key.end());
        // b-block enters positively, a-block negatively (the printed
        // polynomials follow this sign convention)
        std::map<Partition, Coef> one{{pa, Coef(1)}};
        for (const auto& [mu, m] : mul_power_sum(one, r, U))
          nxt[encode_pair(mu, pb)] += (-c) * m;
        std::map<Partition, Coef> two{{pb, Coef(1)}};
        for (const auto& [mu, m] : mul_power_sum(two, r, W))
          nxt[encode_pair(pa, mu)] += c * m;
      }
      cur = std::move(nxt);
    }
  }
  return cur;
}

template <class Coef>
struct Matrix {
  std::map<Partition, int> rowIndex;
  std::vector<std::vector<std::pair<int, Coef>>> cols;  // per column: (row, coef)

  void build(const std::vector<Exponents>& monos, WeightKind kind, int U, int W) {
    for (const auto& mono : monos) {
      auto exp = expand_monomial<Coef>(mono, kind, U, W);
      std::vector<std::pair<int, Coef>> col;
      for (auto& [key, c] : exp) {
        auto [it, fresh] = rowIndex.try_emplace(key, (int)rowIndex.size());
        col.push_back({it->second, c});
      }
      cols.push_back(std::move(col));
    }
  }
};

// rank mod P; records which dense row indices carry the pivots
int modular_rank(const Matrix<ModCoef>& M, int nRows, std::vector<int>* pivotRows) {
  int C = (int)M.cols.size();
  std::vector<std::vector<std::uint64_t>> rows(nRows, std::vector<std::uint64_t>(C, 0));
  for (int c = 0; c < C; c++)
    for (const auto& [r, v] : M.cols[c]) rows[r][c] = v.v;
  std::vector<int> orig(nRows);
  std::iota(orig.begin(), orig.end(), 0);
  const std::uint64_t P = ModCoef::P;
  int rank = 0;
  for (int c = 0; c < C && rank < nRows; c++) {
    int piv = -1;
    for (int i = rank; i < nRows; i++)
      if (rows[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    std::swap(orig[piv], orig[rank]);
    // normalize pivot to 1
    std::uint64_t inv = 1, b = rows[rank][c], e = P - 2;
    while (e) {
      if (e & 1) inv = inv * b % P;
      b = b * b % P;
      e >>= 1;
    }
    for (int j = c; j < C; j++) rows[rank][j] = rows[rank][j] * inv % P;
    for (int i = rank + 1; i < nRows; i++) {
      std::uint64_t f = rows[i][c];
      if (!f) continue;
      for (int j = c; j < C; j++)
        rows[i][j] = (rows[i][j] + (P - f) * rows[rank][j]) % P;
    }
    if (pivotRows) pivotRows->push_back(orig[rank]);
    rank++;
  }
  return rank;
}

// fraction-free (Bareiss) forward elimination; returns pivot columns, leaves
// the echelon rows in place
std::vector<int> bareiss(std::vector<std::vector<mpz_class>>& M) {
  int R = (int)M.size(), C = R ? (int)M[0].size() : 0;
  std::vector<int> pivotCols;
  mpz_class prev = 1;
  int r = 0;
  for (int c = 0; c < C && r < R; c++) {
    int piv = -1;
    for (int i = r; i < R; i++)
      if (M[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(M[piv], M[r]);
    for (int i = r + 1; i < R; i++) {
      for (int j = c + 1; j < C; j++) {
        mpz_class t = M[r][c] * M[i][j] - M[i][c] * M[r][j];
        mpz_divexact(M[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      M[i][c] = 0;
    }
    prev = M[r][c];
    pivotCols.push_back(c);
    r++;
  }
  M.resize(r);
  return pivotCols;
}

// integer kernel basis of the echelon system, one vector per free column
std::vector<std::vector<mpz_class>> kernel_from_echelon(
    const std::vector<std::vector<mpz_class>>& E, const std::vector<int>& pivotCols,
    int C) {
  std::vector<bool> isPivot(C, false);
  for (int c : pivotCols) isPivot[c] = true;
  std::vector<std::vector<mpz_class>> out;
  for (int f = 0; f < C; f++) {
    if (isPivot[f]) continue;
    std::vector<mpq_class> x(C, 0);
    x[f] = 1;
    for (int i = (int)E.size() - 1; i >= 0; i--) {
      int pc = pivotCols[i];
      mpq_class s = 0;
      for (int j = pc + 1; j < C; j++)
        if (x[j] != 0) s += mpq_class(E[i][j]) * x[j];
      x[pc] = -s / mpq_class(E[i][pc]);
    }
    mpz_class lcm = 1;
    for (int j = 0; j < C; j++) {
      x[j].canonicalize();
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x[j].get_den().get_mpz_t());
    }
    std::vector<mpz_class> v(C);
    for (int j = 0; j < C; j++) {
      mpq_class prod = x[j] * mpq_class(lcm);
      prod.canonicalize();
      v[j] = prod.get_num();
    }
    mpz_class g = 0;
    for (const auto& c : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g > 1)
      for (auto& c : v) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    // first nonzero coefficient in column (= term) order positive
    for (const auto& c : v)
      if (c != 0) {
        if (c < 0)
          for (auto& cc : v) cc = -cc;
        break;
      }
    out.push_back(std::move(v));
  }
  return out;
}

bool in_kernel(const Matrix<mpz_class>& M, const std::vector<mpz_class>& v) {
  std::map<int, mpz_class> acc;
  for (size_t c = 0; c < M.cols.size(); c++) {
    if (v[c] == 0) continue;
    for (const auto& [r, coef] : M.cols[c]) acc[r] += coef * v[c];
  }
  for (const auto& [r, s] : acc)
    if (s != 0) return false;
  return true;
}

std::uint64_t to_u64(const mpz_class& c) {  // value mod 2^64, two's complement
  std::uint64_t low = mpz_get_ui(c.get_mpz_t());
  return mpz_sgn(c.get_mpz_t()) < 0 ? (std::uint64_t)0 - low : low;
}

}  // namespace

std::vector<Exponents> weighted_monomials(int D, int n, WeightKind kind) {
  int V = var_count(n, kind);
  std::vector<Exponents> out;
  Exponents e(V, 0);
  // highest-index exponents vary slowest, ascending; x_1 absorbs the rest
  auto rec = [&](auto&& self, int k, int rem) -> void {
    if (k == 1) {
      if (rem % weight_of(1, kind) == 0) {
        e[0] = rem / weight_of(1, kind);
        out.push_back(e);
        e[0] = 0;
      }
      return;
    }
    int w = weight_of(k, kind);
    for (int d = 0; d * w <= rem; d++) {
      e[k - 1] = d;
      self(self, k - 1, rem - d * w);
    }
    e[k - 1] = 0;
  };
  if (V > 0 && D >= 1) rec(rec, V, D);
  // emitted with the outer (high-index) loop outermost: reorder so that the
  // listing ascends in the high-index exponents, pure x_1 power first
  std::sort(out.begin(), out.end(), MonoLess());
  return out;
}

std::pair<FnSpec, SparsePoly> build_fn(int n) {
  if (n < 9 || n > 16) throw std::invalid_argument("build_fn: 9 <= n <= 16");
  WeightKind kind = n % 2 ? WeightKind::odd : WeightKind::even;
  FnSpec spec;
  spec.n = n;
  spec.varCount = var_count(n, kind);
  int U, W;
  if (kind == WeightKind::odd) {
    U = (n - 3) / 2;
    W = 0;
    spec.arityA = U;
  } else {
    int s = (n + 3) / 4 + 1;  // ceil(n/4) + 1
    int t = n / 4 + 1;
    U = n / 2 - s;
    W = n / 2 - t;
    spec.arityA = U;
    spec.arityB = W;
  }
  const int maxD = 40;
  for (int D = 1; D <= maxD; D++) {
    auto monos = weighted_monomials(D, n, kind);
    if (monos.empty()) continue;
    int C = (int)monos.size();
    Matrix<ModCoef> Mp;
    Mp.build(monos, kind, U, W);
    std::vector<int> pivotRows;
    int rank = modular_rank(Mp, (int)Mp.rowIndex.size(), &pivotRows);
    if (rank >= C) continue;  // full column rank: no relation at this weight
    // exact stage on the pivot rows only, then verify against every row
    Matrix<mpz_class> M;
    M.build(monos, kind, U, W);
    std::vector<std::vector<mpz_class>> sub(pivotRows.size(),
                                            std::vector<mpz_class>(C, 0));
    std::vector<int> place((int)M.rowIndex.size(), -1);
    for (size_t i = 0; i < pivotRows.size(); i++) place[pivotRows[i]] = (int)i;
    for (int c = 0; c < C; c++)
      for (const auto& [r, coef] : M.cols[c])
        if (place[r] >= 0) sub[place[r]][c] = coef;
    auto pivotCols = bareiss(sub);
    auto basis = kernel_from_echelon(sub, pivotCols, C);
    std::vector<std::vector<mpz_class>> good;
    for (auto& v : basis)
      if (in_kernel(M, v)) good.push_back(std::move(v));
    if (good.empty()) {
      // the modular filter was too optimistic; eliminate the full matrix
      std::vector<std::vector<mpz_class>> full((int)M.rowIndex.size(),
                                               std::vector<mpz_class>(C, 0));
      for (int c = 0; c < C; c++)
        for (const auto& [r, coef] : M.cols[c]) full[r][c] = coef;
      auto pc = bareiss(full);
      good = kernel_from_echelon(full, pc, C);
      if (good.empty()) continue;
    }
    spec.D = D;
    spec.kernelDim = (int)good.size();
    // deterministic choice: smallest coefficient sequence in term order
    std::sort(good.begin(), good.end());
    SparsePoly F;
    F.varCount = spec.varCount;
    F.kind = kind;
    for (int c = 0; c < C; c++)
      if (good[0][c] != 0) F.terms[monos[c]] = good[0][c];
    return {spec, F};
  }
  throw std::runtime_error("build_fn: no relation found up to the weight limit");
}

mpz_class height(const SparsePoly& F) {
  mpz_class h = 0;
  for (const auto& [e, c] : F.terms) h = std::max(h, mpz_class(abs(c)));
  return h;
}

mpz_class eval_fn(const SparsePoly& F, const std::vector<mpz_class>& x) {
  if ((int)x.size() != F.varCount) throw std::invalid_argument("eval_fn: arity");
  std::vector<std::vector<mpz_class>> pw(F.varCount);
  for (int i = 0; i < F.varCount; i++) pw[i].push_back(1);
  mpz_class acc = 0, term;
  for (const auto& [e, c] : F.terms) {
    term = c;
    for (int i = 0; i < F.varCount; i++) {
      while ((int)pw[i].size() <= e[i]) pw[i].push_back(pw[i].back() * x[i]);
      if (e[i]) term *= pw[i][e[i]];
    }
    acc += term;
  }
  return acc;
}

std::uint64_t eval_fn_mod2_50(const SparsePoly& F, const std::vector<std::int64_t>& x) {
  constexpr std::uint64_t mask = (1ull << 50) - 1;
  std::vector<std::vector<std::uint64_t>> pw(F.varCount);
  for (int i = 0; i < F.varCount; i++) pw[i].push_back(1);
  std::uint64_t acc = 0;
  for (const auto& [e, c] : F.terms) {
    std::uint64_t term = to_u64(c);
    for (int i = 0; i < F.varCount; i++) {
      while ((int)pw[i].size() <= e[i])
        pw[i].push_back(pw[i].back() * (std::uint64_t)x[i]);
      if (e[i]) term *= pw[i][e[i]];
    }
    acc += term;
  }
  return acc & mask;
}

std::uint64_t eval_fn_mod(const SparsePoly& F, const std::vector<std::int64_t>& x,
                          std::uint64_t m) {
  std::vector<std::vector<std::uint64_t>> pw(F.varCount);
  for (int i = 0; i < F.varCount; i++) {
    std::int64_t r = x[i] % (std::int64_t)m;
    if (r < 0) r += m;
    pw[i] = {1, (std::uint64_t)r};
  }
  std::uint64_t acc = 0;
  for (const auto& [e, c] : F.terms) {
    std::uint64_t term = mpz_fdiv_ui(c.get_mpz_t(), m);
    for (int i = 0; i < F.varCount; i++) {
      while ((int)pw[i].size() <= e[i]) pw[i].push_back(pw[i].back() * pw[i][1] % m);
      if (e[i]) term = term * pw[i][e[i]] % m;
    }
    acc = (acc + term) % m;
  }
  return acc;
}

std::vector<long> candidate_residues(
    const SparsePoly& F, const std::vector<long>& partialMoments, long r, int sign,
    const std::function<bool(const std::vector<long>&)>& inTable) {
  if ((int)partialMoments.size() != F.varCount)
    throw std::invalid_argument("candidate_residues: arity");
  std::vector<long> out;
  std::vector<std::int64_t> upd(F.varCount);
  std::vector<long> updL(F.varCount);
  for (long c = 0; c < r; c++) {
    for (int k = 0; k < F.varCount; k++) {
      int w = weight_of(k + 1, F.kind);
      long pw = 1;
      for (int i = 0; i < w; i++) pw = pw * c % r;
      long v = ((partialMoments[k] + sign * pw) % r + r) % r;
      upd[k] = v;
      updL[k] = v;
    }
    if (eval_fn_mod(F, upd, (std::uint64_t)r) != 0) continue;
    if (inTable && !inTable(updL)) continue;
    out.push_back(c);
  }
  return out;
}

nlohmann::json to_json(const SparsePoly& F) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : F.terms)
    terms.push_back({{"e", e}, {"c", c.get_str()}});
  return {{"varCount", F.varCount},
          {"weightKind", F.kind == WeightKind::odd ? "odd" : "even"},
          {"terms", terms}};
}

SparsePoly poly_from_json(const nlohmann::json& j) {
  SparsePoly F;
  F.varCount = j.at("varCount").get<int>();
  F.kind = j.at("weightKind").get<std::string>() == "odd" ? WeightKind::odd
                                                          : WeightKind::even;
  for (const auto& t : j.at("terms")) {
    Exponents e = t.at("e").get<Exponents>();
    F.terms[e] = mpz_class(t.at("c").get<std::string>());
  }
  return F;
}

}  // namespace pte::fnpoly
