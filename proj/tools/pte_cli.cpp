// command-line front end: search, verification, certification, and table
// printing, with JSONL results, resumable checkpoints, and run manifests
#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "pte/core.hpp"
#include "pte/divisors.hpp"
#include "pte/fnpoly.hpp"
#include "pte/modp.hpp"
#include "pte/quadring.hpp"
#include "pte/quadsearch.hpp"
#include "pte/zsearch.hpp"

using nlohmann::json;
using namespace pte;

namespace {

std::atomic<bool> gInterrupted{false};
void on_sigint(int) { gInterrupted = true; }

long long now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string scratch_dir() {
  const char* env = std::getenv("PTE_SCRATCH_DIR");
  return env && *env ? std::string(env) : std::string(".");
}

struct Manifest {
  std::string subcommand;
  json parameters = json::object();
  long long startedAt = 0, finishedAt = 0;
  json stats = json::object();
  std::vector<std::string> outputs;
  std::string configHash;

  json to_json() const {
    return json{{"schemaVersion", 1},       {"subcommand", subcommand},
                {"parameters", parameters}, {"startedAtMs", startedAt},
                {"finishedAtMs", finishedAt}, {"stats", stats},
                {"outputs", outputs},       {"configHash", configHash}};
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

void write_manifest(Manifest& m, const std::string& path) {
  m.finishedAt = now_ms();
  m.outputs.push_back(path);
  write_file(path, m.to_json().dump(2) + "\n");
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  json j;
  f >> j;
  return j;
}

json stats_to_json(const zsearch::StageStats& s) {
  return json{{"chainPrefixes", s.chainPrefixes}, {"rPassed", s.rPassed},
              {"qPassed", s.qPassed},             {"m1Passed", s.m1Passed},
              {"m2Passed", s.m2Passed},           {"exactPassed", s.exactPassed},
              {"solutionsFound", s.solutionsFound},
              {"nearMissesFound", s.nearMissesFound}};
}

json stats_to_json(const quadsearch::StatsQ& s) {
  return json{{"chainLeaves", s.chainLeaves},
              {"step4Passed", s.step4Passed},
              {"prescreenPassed", s.prescreenPassed},
              {"exactPassed", s.exactPassed},
              {"solutionsFound", s.solutionsFound}};
}

json solution_record(const PtePair& P) {
  json j = zsearch::pair_to_json(P);
  j["n"] = P.n;
  j["degree"] = P.degree;
  if (P.constant) j["constant"] = P.constant->get_str();
  j["symmetry"] = P.symmetry == Symmetry::odd_symmetric    ? "odd"
                  : P.symmetry == Symmetry::even_symmetric ? "even"
                                                           : "none";
  return j;
}

json audit_to_json(const std::vector<divisors::AuditLine>& lines) {
  auto arr = json::array();
  for (const auto& l : lines)
    arr.push_back(json{{"factor", l.factor},
                       {"required", l.required},
                       {"found", l.found},
                       {"ok", l.ok}});
  return arr;
}

int run_verify(const std::string& file, bool symmetric) {
  json j = read_json_file(file);
  if (j.contains("d")) {
    quad::QuadPair P = quadsearch::quad_pair_from_json(j);
    int deg = quad::verify_quad(P);
    std::printf("d=%d size %zu, degree %d\n", P.d, P.A.size(), deg);
    if (deg < (int)P.A.size() - 1) {
      std::printf("not ideal\n");
      return 2;
    }
    std::printf("constant %s\n", quad::to_string(quad::constant_quad(P)).c_str());
    auto lines = divisors::audit_quad(P, symmetric);
    std::cout << audit_to_json(lines).dump(2) << "\n";
    return divisors::audit_ok(lines) ? 0 : 1;
  }
  MultisetZ A, B;
  for (const auto& v : j.at("A"))
    A.push_back(v.is_string() ? mpz_class(v.get<std::string>()) : mpz_class(v.get<long>()));
  for (const auto& v : j.at("B"))
    B.push_back(v.is_string() ? mpz_class(v.get<std::string>()) : mpz_class(v.get<long>()));
  PtePair P = make_pte_pair(A, B);
  std::printf("size %d, degree %d\n", P.n, P.degree);
  if (!P.ideal()) {
    std::printf("not ideal\n");
    return 2;
  }
  std::printf("constant %s\n", P.constant->get_str().c_str());
  auto lines = divisors::audit(P, symmetric || P.symmetry != Symmetry::none);
  std::cout << audit_to_json(lines).dump(2) << "\n";
  return divisors::audit_ok(lines) ? 0 : 1;
}

// run a checkpointed search in outer-loop blocks so that an interrupt leaves
// a resumable checkpoint behind
template <class Result, class Ckpt, class Step>
Result run_blocks(Ckpt ck, bool haveCk, const std::string& ckPath, long stopAfter, Step step) {
  Result res;
  const long kBlock = stopAfter > 0 ? stopAfter : 16;
  while (true) {
    res = step(haveCk ? &ck : nullptr, kBlock);
    ck = res.checkpoint;
    haveCk = true;
    write_file(ckPath, to_json(ck).dump(2) + "\n");
    if (ck.done || gInterrupted || stopAfter > 0) break;
  }
  return res;
}

int finish_search(Manifest& m, const std::string& out, const std::vector<std::string>& lines,
                  bool done) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_file(out + ".jsonl", text);
  m.outputs.push_back(out + ".jsonl");
  write_manifest(m, out + ".manifest.json");
  if (!done) {
    std::fprintf(stderr, "interrupted; checkpoint written\n");
    return 1;
  }
  return lines.empty() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prouhet-Tarry-Escott search and certification toolkit"};
  app.require_subcommand(1);
  app.fallthrough(true);
  std::signal(SIGINT, on_sigint);

  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "worker threads (results are order-deterministic)");
  std::string out = scratch_dir() + "/pte_run";
  app.add_option("--out", out, "output path prefix");
  long stopAfter = 0;
  app.add_option("--stop-after", stopAfter,
                 "stop after this many outer blocks, leaving a resumable checkpoint");

  // verify / constant
  auto* cmdVerify = app.add_subcommand("verify", "verify a solution file and audit its constant");
  std::string verifyFile;
  bool verifySym = false;
  cmdVerify->add_option("--file", verifyFile, "solution JSON file")->required();
  cmdVerify->add_flag("--symmetric", verifySym, "audit against the symmetric divisor table");

  auto* cmdConst = app.add_subcommand("constant", "print the constant of a solution file");
  std::string constFile;
  cmdConst->add_option("--file", constFile, "solution JSON file")->required();

  // search-z
  auto* cmdZ = app.add_subcommand("search-z", "integer search for symmetric ideal solutions");
  int zn = 0;
  long zH = 0, zp1 = 0, zp2 = 0, zr = 0;
  std::vector<long> zq;
  std::string zResume;
  cmdZ->add_option("--n", zn)->required();
  cmdZ->add_option("--height", zH)->required();
  cmdZ->add_option("--p1", zp1);
  cmdZ->add_option("--p2", zp2);
  cmdZ->add_option("--q", zq);
  cmdZ->add_option("--r", zr);
  cmdZ->add_option("--resume", zResume, "checkpoint file");

  // search-quad
  auto* cmdQ = app.add_subcommand("search-quad", "quadratic-ring search");
  int qd = 1, qn = 0;
  long qH = 0, qp = 0;
  double qell = 0;
  std::string qResume;
  cmdQ->add_option("--d", qd)->required();
  cmdQ->add_option("--n", qn)->required();
  cmdQ->add_option("--height", qH)->required();
  cmdQ->add_option("--p", qp, "sieve prime (default: the published table row)");
  cmdQ->add_option("--ell", qell);
  cmdQ->add_option("--resume", qResume, "checkpoint file");

  // local
  auto* cmdLocal = app.add_subcommand("local", "enumerate symmetric local solutions mod p");
  int ln = 0;
  long lp = 0;
  std::string lMethod = "exhaustive";
  cmdLocal->add_option("--n", ln)->required();
  cmdLocal->add_option("--p", lp)->required();
  cmdLocal->add_option("--method", lMethod)->check(CLI::IsMember({"exhaustive", "mitm"}));

  // mlemma
  auto* cmdM = app.add_subcommand("mlemma", "multiplicity certificate for p | C_n");
  int mn = 0;
  long mp = 0;
  cmdM->add_option("--n", mn)->required();
  cmdM->add_option("--p", mp)->required();

  // build-fn
  auto* cmdFn = app.add_subcommand("build-fn", "build the even-size filter polynomial");
  int fn = 0;
  cmdFn->add_option("--n", fn)->required();

  // divisors
  auto* cmdDiv = app.add_subcommand("divisors", "print the required divisors of the constant");
  std::string ring = "z";
  int dn = 0;
  bool dSym = false;
  cmdDiv->add_option("--ring", ring)
      ->check(CLI::IsMember({"z", "d1", "d2", "d3", "d7", "d11", "d19"}));
  cmdDiv->add_option("--n", dn)->required();
  cmdDiv->add_flag("--symmetric", dSym);

  // eisenstein6
  auto* cmdE6 = app.add_subcommand("eisenstein6", "sixfold-symmetric Eisenstein search");
  int en = 12;
  long ermax = 0;
  cmdE6->add_option("--n", en)->check(CLI::IsMember({12, 18}))->required();
  cmdE6->add_option("--rmax", ermax)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    Manifest m;
    m.startedAt = now_ms();

    if (*cmdVerify) return run_verify(verifyFile, verifySym);

    if (*cmdConst) {
      json j = read_json_file(constFile);
      if (j.contains("d")) {
        auto P = quadsearch::quad_pair_from_json(j);
        std::printf("%s\n", quad::to_string(quad::constant_quad(P)).c_str());
      } else {
        auto P = zsearch::pair_from_json(j);
        if (!P.ideal()) throw std::runtime_error("not an ideal solution");
        std::printf("%s\n", P.constant->get_str().c_str());
      }
      return 0;
    }

    if (*cmdZ) {
      zsearch::SearchConfigZ cfg = zsearch::default_config(zn, zH);
      if (zp1) cfg.p1 = zp1;
      if (zp2) cfg.p2 = zp2;
      if (!zq.empty()) cfg.qList = zq;
      if (zr) cfg.r = zr;
      m.subcommand = "search-z";
      m.configHash = zsearch::config_hash(cfg);
      m.parameters = {{"n", zn},         {"height", zH}, {"p1", cfg.p1}, {"p2", cfg.p2},
                      {"q", cfg.qList},  {"r", cfg.r},   {"threads", threads}};
      zsearch::Checkpoint ck;
      bool haveCk = false;
      if (!zResume.empty()) {
        ck = zsearch::checkpoint_from_json(read_json_file(zResume));
        if (ck.configHash != m.configHash)
          throw std::runtime_error("checkpoint config hash does not match flags");
        haveCk = true;
      }
      auto res = run_blocks<zsearch::SearchResult>(
          ck, haveCk, out + ".ckpt.json", stopAfter,
          [&](const zsearch::Checkpoint* c, long blk) { return zsearch::search(cfg, c, blk); });
      std::vector<std::string> lines;
      for (const auto& P : res.solutions) lines.push_back(solution_record(P).dump());
      for (const auto& nm : res.nearMisses) {
        json j = zsearch::to_json(nm);
        j["record"] = "near-miss";
        lines.push_back(j.dump());
      }
      m.stats = stats_to_json(res.stats);
      return finish_search(m, out, lines, res.checkpoint.done);
    }

    if (*cmdQ) {
      quadsearch::SearchConfigQ cfg;
      try {
        cfg = quadsearch::table_config(qd, qn);
      } catch (const std::exception&) {
        cfg.d = qd;
        cfg.n = qn;
      }
      cfg.H = qH;
      if (qp) cfg.p = qp;
      if (qell > 0) cfg.ell = qell;
      m.subcommand = "search-quad";
      m.configHash = quadsearch::config_hash(cfg);
      m.parameters = {{"d", qd},   {"n", qn},        {"height", qH},
                      {"p", cfg.p}, {"ell", cfg.ell}, {"threads", threads}};
      quadsearch::CheckpointQ ck;
      bool haveCk = false;
      if (!qResume.empty()) {
        ck = quadsearch::checkpoint_from_json(read_json_file(qResume));
        if (ck.configHash != m.configHash)
          throw std::runtime_error("checkpoint config hash does not match flags");
        haveCk = true;
      }
      auto res = run_blocks<quadsearch::SearchResultQ>(
          ck, haveCk, out + ".ckpt.json", stopAfter,
          [&](const quadsearch::CheckpointQ* c, long blk) {
            return quadsearch::search_quad(cfg, c, blk);
          });
      std::vector<std::string> lines;
      for (const auto& P : res.solutions)
        lines.push_back(quadsearch::quad_pair_to_json(P).dump());
      m.stats = stats_to_json(res.stats);
      return finish_search(m, out, lines, res.checkpoint.done);
    }

    if (*cmdLocal) {
      auto method = lMethod == "mitm" ? modp::EnumMethod::mitm : modp::EnumMethod::exhaustive;
      auto sols = modp::enumerate_local(ln, lp, method);
      m.subcommand = "local";
      m.parameters = {{"n", ln}, {"p", lp}, {"method", lMethod}};
      std::vector<std::string> lines;
      for (const auto& s : sols) {
        json j{{"n", s.n},
               {"p", s.p},
               {"A", s.A},
               {"B", s.B},
               {"kind", s.kind == modp::LocalKind::odd_symmetric ? "odd" : "even"}};
        lines.push_back(j.dump());
        std::printf("%s\n", modp::to_string(s).c_str());
      }
      m.stats = {{"count", sols.size()}};
      return finish_search(m, out, lines, true);
    }

    if (*cmdM) {
      auto cert = modp::multiplicity_search(mn, mp);
      json j{{"n", cert.n},
             {"p", cert.p},
             {"minL1", cert.minL1},
             {"minimizerCount", cert.minimizerCount},
             {"witness", cert.witness},
             {"provesDivisibility", cert.provesDivisibility}};
      std::cout << j.dump(2) << "\n";
      std::printf("min L1 = %ld over %ld minimizers; %ld | C_%d %s\n", cert.minL1,
                  cert.minimizerCount, cert.p, cert.n,
                  cert.provesDivisibility ? "proven" : "not proven by this bound");
      m.subcommand = "mlemma";
      m.parameters = {{"n", mn}, {"p", mp}};
      m.stats = {{"minL1", cert.minL1}, {"minimizerCount", cert.minimizerCount}};
      write_file(out + ".jsonl", j.dump() + "\n");
      m.outputs.push_back(out + ".jsonl");
      write_manifest(m, out + ".manifest.json");
      return 0;
    }

    if (*cmdFn) {
      auto [spec, F] = fnpoly::build_fn(fn);
      std::printf("D=%d, %zu terms, height %s\n", spec.D, F.terms.size(),
                  fnpoly::height(F).get_str().c_str());
      write_file(out + ".json", fnpoly::to_json(F).dump() + "\n");
      m.subcommand = "build-fn";
      m.parameters = {{"n", fn}};
      m.stats = {{"terms", F.terms.size()}, {"height", fnpoly::height(F).get_str()}};
      m.outputs.push_back(out + ".json");
      write_manifest(m, out + ".manifest.json");
      return 0;
    }

    if (*cmdDiv) {
      if (ring == "z") {
        auto req = divisors::required_z(dn, dSym);
        std::printf("C_%d%s requires %s\n", dn, dSym ? "'" : "", req.get_str().c_str());
        auto conj = divisors::conjectural_z(dn);
        if (!conj.empty()) {
          std::printf("conjectural:");
          for (long p : conj) std::printf(" %ld", p);
          std::printf("\n");
        }
      } else {
        int d = std::stoi(ring.substr(1));
        auto row = divisors::derive_quad(dn, d, dSym);
        std::printf("C_%d%s over O_%d requires %s%s\n", dn, dSym ? "'" : "", d,
                    divisors::to_string(row).c_str(),
                    divisors::quad_row_is_rule_derived(d) ? "  (rule-derived)" : "");
      }
      return 0;
    }

    if (*cmdE6) {
      auto sols = quadsearch::sixfold_search(en, ermax);
      m.subcommand = "eisenstein6";
      m.parameters = {{"n", en}, {"rmax", ermax}};
      std::vector<std::string> lines;
      for (const auto& P : sols) {
        lines.push_back(quadsearch::quad_pair_to_json(P).dump());
        std::printf("%s\n", quad::to_string(P).c_str());
      }
      m.stats = {{"count", sols.size()}};
      return finish_search(m, out, lines, true);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
