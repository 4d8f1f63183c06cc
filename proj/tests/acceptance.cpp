// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Stated time limits are part of the verdict.

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <sys/wait.h>

#include "sunitlab/arith.hpp"
#include "sunitlab/certificate.hpp"
#include "sunitlab/gcdlab.hpp"
#include "sunitlab/lattice.hpp"
#include "sunitlab/orbit.hpp"
#include "sunitlab/parallel.hpp"

using namespace sunitlab;

namespace {

int g_failures = 0;

void criterion(int num, const char* label, double limit_ms,
               const std::function<std::string()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::string fault;
  try {
    fault = body();
  } catch (const std::exception& e) {
    fault = std::string("exception: ") + e.what();
  }
  auto t1 = std::chrono::steady_clock::now();
  double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  if (fault.empty() && limit_ms > 0 && ms > limit_ms) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "took %.1f ms, limit %.0f ms", ms, limit_ms);
    fault = buf;
  }
  if (!fault.empty()) ++g_failures;
  std::printf("[%s] %2d %s (%.1f ms)%s%s\n", fault.empty() ? "PASS" : "FAIL",
              num, label, ms, fault.empty() ? "" : ": ", fault.c_str());
  std::fflush(stdout);
}

std::pair<int, std::string> run_cmd(const std::string& cmd) {
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int st = pclose(p);
  return {st >= 0 && WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

struct Shared {
  long lattices = 0;
  long order_bad = 0;
  long minkowski_bad = 0;
  long lambda1_bad = 0;
  std::string first_bad;
  ScanSummary scan23;
  std::vector<std::array<long, 8>> kept;
  bool scan_done = false;
};

}  // namespace

int main(int argc, char** argv) {
  std::string cli_path;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--cli" && i + 1 < argc) cli_path = argv[++i];

  Shared sh;
  constants(Rat(1, 4));  // touch the allocator before the timed call

  criterion(1, "constants formulas", 1.0, [&]() -> std::string {
    Constants half = constants(Rat(1, 2));
    Constants one = constants(Rat(1));
    auto conds = [](const Constants& c) {
      Rat n(c.n_bound);
      return (n + 1) * c.epsilon > 2 * n * n * c.alpha + 4 &&
             c.epsilon > 16 * (n - 1) * c.alpha && c.valid();
    };
    if (half.n_bound != 9 || half.alpha != Rat(7, 2048))
      return "constants(1/2) != (9, 7/2048)";
    if (one.n_bound != 4 || one.alpha != Rat(7, 512))
      return "constants(1) != (4, 7/512)";
    if (!conds(half) || !conds(one))
      return "condition inequalities do not hold exactly";
    return "";
  });

  criterion(2, "order cross-check for Q <= 10^4", 120000.0, [&]() -> std::string {
    Int two(2), three(3);
    for (long m = 5; m <= 10000; ++m) {
      if (m % 2 == 0 || m % 3 == 0) continue;
      Int q(m);
      RelationLattice lat = relation_lattice(two, three, q);
      Int ord = subgroup_order_enumerated(two, three, q);
      ++sh.lattices;
      if (lat.det != ord) {
        ++sh.order_bad;
        if (sh.first_bad.empty()) sh.first_bad = "Q=" + std::to_string(m);
      }
      MinimaPair mins = gauss_reduce(lat);
      Int prod = mins.lambda1 * mins.lambda2;
      if (!(2 * prod >= lat.det && prod <= lat.det)) ++sh.minkowski_bad;
      Int reach = pow_int(two, Int(abs(mins.v1.m)).get_ui()) *
                  pow_int(three, Int(abs(mins.v1.n)).get_ui());
      if (reach < q || !lambda1_lower_bound_check(lat)) ++sh.lambda1_bad;
    }
    if (sh.order_bad)
      return std::to_string(sh.order_bad) + " disagreements, first at " + sh.first_bad;
    return "";
  });

  criterion(3, "minkowski bound on the swept lattices", 0, [&]() -> std::string {
    if (!sh.lattices) return "no lattices from the sweep";
    if (sh.minkowski_bad) return std::to_string(sh.minkowski_bad) + " violations";
    return "";
  });

  criterion(4, "lambda1 power bound on the swept lattices", 0, [&]() -> std::string {
    if (!sh.lattices) return "no lattices from the sweep";
    if (sh.lambda1_bad) return std::to_string(sh.lambda1_bad) + " violations";
    return "";
  });

  criterion(5, "return set at Q=5 and scan byte-stability", 600000.0, [&]() -> std::string {
    OrbitParams params = OrbitParams::make(Int(2), Int(3), Int(5), Rat(1, 4), 1);
    std::set<ExponentPair> got;
    for (const ReturnRecord& r : return_set(params)) got.insert(r.pair);
    const std::set<ExponentPair> want = {{0, 0},  {2, 0},  {-2, 0}, {1, 1},
                                         {-1, -1}, {1, -1}, {-1, 1}};
    if (got != want) return "return set at Q=5 is not the seven-pair set";
    auto flagged = []() {
      std::string acc;
      theorem1_scan(Int(2), Int(3), 1, Rat(1, 4), Int(2), Int(10000), 8,
                    [&](const Theorem1Row& row) {
                      if (!row.line.collinear) {
                        acc += row.modulus.get_str();
                        acc += '\n';
                      }
                    });
      return acc;
    };
    std::string a = flagged(), b = flagged();
    if (a != b) return "flagged list differs between runs";
    if (a.rfind("5\n", 0) != 0) return "flagged list does not start with Q=5";
    return "";
  });

  criterion(6, "difference lemma on 10^4 random triples", 10000.0, [&]() -> std::string {
    std::mt19937_64 rng(0x5eed0006ULL);
    std::vector<PlaceSet> sets;
    sets.push_back(PlaceSet::of_primes({2, 3}));
    sets.push_back(PlaceSet::of_primes({2, 3, 5}));
    sets.push_back(PlaceSet::of_primes({5, 7}));
    sets.push_back(PlaceSet::of_primes({2}));
    sets.push_back(PlaceSet());
    std::uniform_int_distribution<long> ydist(-500000000000000000L, 500000000000000000L);
    std::uniform_int_distribution<long> qdist(1, 1000000000000000L);
    std::uniform_int_distribution<long> kdist(-400, 400);
    long bad = 0;
    for (int i = 0; i < 10000; ++i) {
      const PlaceSet& s = sets[i % sets.size()];
      long y2 = ydist(rng);
      while (y2 == 0) y2 = ydist(rng);
      long qd = qdist(rng);
      while (!s.coprime_to_finite(Int(qd))) qd = qdist(rng);
      long k = kdist(rng);
      while (k == 0) k = kdist(rng);
      long y1 = y2 + k * qd;  // |y1| <= 5e17 + 400 * 1e15 = 9e17
      if (y1 == 0) {
        --i;
        continue;
      }
      if (!lemma_diff(Int(y1), Int(y2), Int(qd), s).holds) ++bad;
    }
    if (bad) return std::to_string(bad) + " triples violate the bound";
    return "";
  });

  criterion(7, "certificate chain over the {2,3} scan", 300000.0, [&]() -> std::string {
    PlaceSet s23 = PlaceSet::of_primes({2, 3});
    Constants c13 = constants(Rat(1, 3));
    sh.kept.clear();
    sh.scan23 = theorem2_scan(s23, Rat(1, 3), Int(729), Int(1), Int(729), 8,
                              [&](const ScanRow& r) {
                                sh.kept.push_back({r.inst.a1.get_si(), r.inst.b1.get_si(),
                                                   r.inst.a2.get_si(), r.inst.b2.get_si(),
                                                   r.inst.s1.get_si(), r.inst.t1.get_si(),
                                                   r.inst.s2.get_si(), r.inst.t2.get_si()});
                              });
    sh.scan_done = true;
    if (sh.kept.empty()) return "scan kept no octuples";
    auto fails = parallel_map<unsigned>(sh.kept.size(), 8, [&](std::size_t i) {
      const auto& o = sh.kept[i];
      GcdInstance inst =
          GcdInstance::make(Int(o[0]), Int(o[1]), Int(o[2]), Int(o[3]), Int(o[4]),
                            Int(o[5]), Int(o[6]), Int(o[7]), s23);
      unsigned n = 0;
      for (const CheckRecord& ck : certify_instance(inst, c13).checks)
        if (ck.status == CheckStatus::Fail) ++n;
      return n;
    });
    unsigned long long total = 0;
    for (unsigned n : fails) total += n;
    if (total)
      return std::to_string(total) + " failing checks across " +
             std::to_string(sh.kept.size()) + " octuples";
    TildeMatrixT2 y = build_tilde_t2(
        GcdInstance::make(Int(1), Int(1), Int(1), Int(1), Int(2), Int(1), Int(3),
                          Int(1), s23),
        2);
    if (!(y.entries[0][0] == Rat(1) && y.entries[0][1] == Rat(3) &&
          y.entries[1][0] == Rat(2) && y.entries[1][1] == Rat(6)))
      return "worked matrix is not [[1,3],[2,6]]";
    MinIndexMap idx = minimal_indices(y.entries, y.inst.s);
    ProductReport rep =
        form_product_t2(y, idx, y.inst.s, constants(Rat(1, 2), 2, Rat(1, 8)));
    if (rep.product != Rat(5, 6)) return "worked product != 5/6";
    return "";
  });

  criterion(8, "trichotomy soundness and dependence search", 0, [&]() -> std::string {
    if (!sh.scan_done) return "no scan data";
    if (sh.scan23.count_violation)
      return std::to_string(sh.scan23.count_violation) + " bound violations";
    if (sh.scan23.kept != sh.kept.size()) return "summary kept-count mismatch";
    long lim = constants(Rat(1, 3)).n_bound - 1;
    std::mt19937_64 rng(0x5eed0008ULL);
    std::uniform_int_distribution<int> e2(-6, 6), e3(-4, 4), coin(0, 1);
    auto srat = [&]() {
      int a = e2(rng), b = e3(rng);
      Int num = pow_int(Int(2), a >= 0 ? a : 0) * pow_int(Int(3), b >= 0 ? b : 0);
      Int den = pow_int(Int(2), a < 0 ? -a : 0) * pow_int(Int(3), b < 0 ? -b : 0);
      Rat x(num, den);
      return coin(rng) ? Rat(-x) : x;
    };
    auto rank = [](std::pair<long, long> w) {
      return std::tuple<long, long, long>(std::labs(w.first) + std::labs(w.second),
                                          -w.first, -w.second);
    };
    long bad = 0;
    for (int t = 0; t < 1000; ++t) {
      Rat x1 = srat(), x2 = srat();
      std::vector<Rat> p1(2 * lim + 1), p2(2 * lim + 1);
      p1[lim] = 1;
      p2[lim] = 1;
      for (long i = 1; i <= lim; ++i) {
        p1[lim + i] = p1[lim + i - 1] * x1;
        p2[lim + i] = p2[lim + i - 1] * x2;
        p1[lim - i] = p1[lim - i + 1] / x1;
        p2[lim - i] = p2[lim - i + 1] / x2;
      }
      std::optional<std::pair<long, long>> brute;
      for (long n1 = -lim; n1 <= lim; ++n1)
        for (long n2 = -lim; n2 <= lim; ++n2) {
          if (n1 == 0 && n2 == 0) continue;
          if (p1[lim + n1] != p2[lim + n2]) continue;
          std::pair<long, long> cand{n1, n2};
          if (!brute || rank(cand) < rank(*brute)) brute = cand;
        }
      if (mult_dep_search(x1, x2, lim + 1) != brute) ++bad;
    }
    if (bad) return std::to_string(bad) + " dependence-search disagreements";
    return "";
  });

  criterion(9, "gcd records to n=500", 0, [&]() -> std::string {
    std::vector<Int> g(501);
    extremal_gcd_search(Int(2), Int(3), 500, 8,
                        [&](const GcdRecordRow& r) { g[r.n] = r.g; });
    if (g[4] != gcd(Int(15), Int(80)) || g[4] != 5) return "g_4 != 5";
    if (g[6] != gcd(Int(63), Int(728)) || g[6] != 7) return "g_6 != 7";
    long bad = 0;
    for (long n = 1; n <= 500; ++n)
      for (long m = 2 * n; m <= 500; m += n)
        if (g[m] % g[n] != 0) ++bad;
    if (bad) return std::to_string(bad) + " divisibility failures";
    return "";
  });

  criterion(10, "box witness on 10^3 random moduli", 5000.0, [&]() -> std::string {
    ExponentPair w = box_witness(Int(101), Int(37));
    if (w.m != 3 || w.n != 10) return "boxWitness(101,37) != (3,10)";
    std::mt19937_64 rng(0x5eed000aULL);
    std::uniform_int_distribution<long> qdist(2, 1000000000L);
    long bad = 0;
    for (int i = 0; i < 1000; ++i) {
      long qv = qdist(rng);
      Int q(qv);
      std::uniform_int_distribution<long> sdist(1, qv - 1);
      long sv = sdist(rng);
      while (gcd(Int(sv), q) != 1) sv = sdist(rng);
      ExponentPair v = box_witness(q, Int(sv));
      Int c = floor_root(q, 2);
      if (c * c < q) ++c;
      Int a(v.m), b(v.n);
      if ((v.m == 0 && v.n == 0) || abs(a) > c || abs(b) > c ||
          (a * sv - b) % q != 0)
        ++bad;
    }
    if (bad) return std::to_string(bad) + " witnesses outside the box";
    return "";
  });

  criterion(11, "cli determinism across jobs {1,8}", 0, [&]() -> std::string {
    if (cli_path.empty()) return "--cli not given";
    const std::string q = "'" + cli_path + "'";
    const char* inst = "acceptance_instances.txt";
    const char* cfg1 = "acceptance_jobs1.cfg";
    const char* cfg8 = "acceptance_jobs8.cfg";
    {
      std::ofstream f(inst);
      f << "# sample instances\n"
           "1 1 1 1 2 1 3 1 | 2 3\n"
           "1 -1 1 -1 262144 1 262144 1 | 2\n"
           "1 1 1 1 81 1 16 1 | 2 3\n";
    }
    {
      std::ofstream f(cfg1);
      f << "jobs=1\n";
    }
    {
      std::ofstream f(cfg8);
      f << "jobs=8\n";
    }
    const std::vector<std::pair<std::string, std::pair<std::string, std::string>>>
        cmds = {
            {"orbit",
             {q + " orbit --p 2 --q 3 --K 1 --beta 1/4 --qmax 400 --jobs 1",
              q + " orbit --p 2 --q 3 --K 1 --beta 1/4 --qmax 400 --jobs 8"}},
            {"lattice",
             {q + " lattice --p 2 --q 3 --qmax 300 --config acceptance_jobs1.cfg",
              q + " lattice --p 2 --q 3 --qmax 300 --config acceptance_jobs8.cfg"}},
            {"scan",
             {q + " scan --primes 2,3 --epsilon 1/2 --hmax 100 --format jsonl --jobs 1",
              q + " scan --primes 2,3 --epsilon 1/2 --hmax 100 --format jsonl --jobs 8"}},
            {"certify",
             {q + " certify --epsilon 1/3 --input acceptance_instances.txt --jobs 1",
              q + " certify --epsilon 1/3 --input acceptance_instances.txt --jobs 8"}},
            {"records",
             {"SUNITLAB_JOBS=1 " + q + " records --a 2 --b 3 --nmax 120",
              "SUNITLAB_JOBS=8 " + q + " records --a 2 --b 3 --nmax 120"}},
            {"box",
             {q + " box --Q 101 --s 37 --jobs 1",
              q + " box --Q 101 --s 37 --jobs 8"}},
        };
    std::string fault;
    for (const auto& [name, pair] : cmds) {
      auto r1 = run_cmd(pair.first);
      auto r8 = run_cmd(pair.second);
      if (r1.first != 0 || r8.first != 0) {
        fault = name + " exited nonzero";
        break;
      }
      if (r1.second.empty()) {
        fault = name + " produced no output";
        break;
      }
      if (r1.second != r8.second) {
        fault = name + " output differs between jobs 1 and 8";
        break;
      }
    }
    std::remove(inst);
    std::remove(cfg1);
    std::remove(cfg8);
    return fault;
  });

  std::printf("acceptance: %d/11 criteria passed\n", 11 - g_failures);
  return g_failures ? 1 : 0;
}
