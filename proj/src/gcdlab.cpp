#include "sunitlab/gcdlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sunitlab/lattice.hpp"
#include "sunitlab/parallel.hpp"

namespace sunitlab {

namespace {

Int gcd_int(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

Int max4(const Int& a, const Int& b, const Int& c, const Int& d) {
  return std::max(std::max(a, b), std::max(c, d));
}

// natural log of n >= 1 without overflowing double
double ln_int(const Int& n) {
  signed long e2;
  double d = mpz_get_d_2exp(&e2, n.get_mpz_t());
  return std::log(d) + static_cast<double>(e2) * std::log(2.0);
}

ExponentPair sign_normalized(ExponentPair w) {
  if (w.m < 0 || (w.m == 0 && w.n < 0)) {
    w.m = -w.m;
    w.n = -w.n;
  }
  return w;
}

// "" when consistent, else what broke; classify turns this into a
// hypothesis-fail verdict so hand-assembled rows never crash a scan report
std::string instance_violation(const GcdInstance& inst) {
  const Int* coeff[4] = {&inst.a1, &inst.b1, &inst.a2, &inst.b2};
  for (const Int* c : coeff) {
    if (*c == 0) return "zero coefficient";
    if (!inst.s.coprime_to_finite(*c)) return "coefficient shares a prime with S";
  }
  const Int* st[4] = {&inst.s1, &inst.t1, &inst.s2, &inst.t2};
  for (const Int* v : st) {
    if (*v < 1) return "smooth part below 1";
    if (!is_smooth(*v, inst.s)) return "smooth part not S-smooth";
  }
  if (gcd_int(inst.a1 * inst.s1, inst.b1 * inst.t1) != 1)
    return "a1 s1 and b1 t1 share a factor";
  if (gcd_int(inst.a2 * inst.s2, inst.b2 * inst.t2) != 1)
    return "a2 s2 and b2 t2 share a factor";
  if (inst.h != max4(inst.s1, inst.t1, inst.s2, inst.t2)) return "stale H";
  Int d1 = inst.a1 * inst.s1 - inst.b1 * inst.t1;
  Int d2 = inst.a2 * inst.s2 - inst.b2 * inst.t2;
  if (inst.q_gcd != gcd_int(d1, d2)) return "stale Qgcd";
  return "";
}

bool multiplicatively_dependent(const Int& a, const Int& b) {
  auto fa = factor_magnitude(a);
  auto fb = factor_magnitude(b);
  if (fa.size() != fb.size()) return false;
  auto ib = fb.begin();
  for (auto& [p, e] : fa) {
    if (ib->first != p) return false;
    ++ib;
  }
  auto a0 = fa.begin();
  auto b0 = fb.begin();
  ib = fb.begin();
  for (auto ia = fa.begin(); ia != fa.end(); ++ia, ++ib)
    if (static_cast<long long>(ia->second) * b0->second !=
        static_cast<long long>(ib->second) * a0->second)
      return false;
  return true;
}

}  // namespace

Constants constants(const Rat& epsilon, long n_bound, const Rat& alpha) {
  if (epsilon <= 0 || epsilon > 1)
    throw std::domain_error("constants: epsilon must lie in (0, 1]");
  if (n_bound < 1) throw std::domain_error("constants: N must be >= 1");
  if (alpha <= 0) throw std::domain_error("constants: alpha must be positive");
  Constants c;
  c.epsilon = epsilon;
  c.n_bound = n_bound;
  c.alpha = alpha;
  Rat n(n_bound);
  c.cond1 = (n + 1) * epsilon > 2 * n * n * alpha + 4;
  c.cond2 = epsilon > 16 * (n - 1) * alpha;
  return c;
}

Constants constants(const Rat& epsilon) {
  if (epsilon <= 0 || epsilon > 1)
    throw std::domain_error("constants: epsilon must lie in (0, 1]");
  Rat q = Rat(32) / (7 * epsilon);
  Int n;
  mpz_fdiv_q(n.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  if (!n.fits_slong_p()) throw std::domain_error("constants: epsilon too small");
  return constants(epsilon, n.get_si(), 7 * epsilon * epsilon / 512);
}

GcdInstance GcdInstance::make(const Int& a1, const Int& b1, const Int& a2,
                              const Int& b2, const Int& s1, const Int& t1,
                              const Int& s2, const Int& t2, const PlaceSet& s) {
  GcdInstance inst;
  inst.a1 = a1;
  inst.b1 = b1;
  inst.a2 = a2;
  inst.b2 = b2;
  inst.s1 = s1;
  inst.t1 = t1;
  inst.s2 = s2;
  inst.t2 = t2;
  inst.s = s;
  inst.h = max4(s1, t1, s2, t2);
  inst.q_gcd = gcd_int(a1 * s1 - b1 * t1, a2 * s2 - b2 * t2);
  auto why = instance_violation(inst);
  if (!why.empty()) throw std::domain_error("GcdInstance: " + why);
  return inst;
}

Rat GcdInstance::x1() const {
  Rat r(a1 * s1);
  r /= Rat(b1 * t1);
  return r;
}

Rat GcdInstance::x2() const {
  Rat r(a2 * s2);
  r /= Rat(b2 * t2);
  return r;
}

std::string verdict_name(VerdictTag tag) {
  switch (tag) {
    case VerdictTag::HypothesisFail: return "hypothesis-fail";
    case VerdictTag::HSmall: return "h-small";
    case VerdictTag::CoeffLarge: return "coeff-large";
    case VerdictTag::MultDep: return "mult-dep";
    case VerdictTag::BoundViolation: return "bound-violation";
  }
  throw InternalError("verdict_name: unknown tag");
}

std::optional<std::pair<long, long>> mult_dep_search(const Rat& x1,
                                                     const Rat& x2,
                                                     long n_bound) {
  if (x1 == 0 || x2 == 0)
    throw std::domain_error("mult_dep_search: arguments must be nonzero");
  if (n_bound < 1) throw std::domain_error("mult_dep_search: N must be >= 1");
  long lim = n_bound - 1;

  auto f1 = exponent_vector(x1);
  auto f2 = exponent_vector(x2);
  std::map<Int, std::pair<long, long>> merged;
  for (auto& [p, e] : f1.exponents) merged[p].first = e;
  for (auto& [p, e] : f2.exponents) merged[p].second = e;
  bool neg1 = f1.sign < 0, neg2 = f2.sign < 0;

  auto matches = [&](long n1, long n2) {
    for (auto& [p, ee] : merged)
      if (static_cast<long long>(n1) * ee.first !=
          static_cast<long long>(n2) * ee.second)
        return false;
    int sg1 = (neg1 && n1 % 2 != 0) ? -1 : 1;
    int sg2 = (neg2 && n2 % 2 != 0) ? -1 : 1;
    return sg1 == sg2;
  };

  for (long sum = 1; sum <= 2 * lim; ++sum)
    for (long n1 = lim; n1 >= -lim; --n1) {
      long k = sum - std::labs(n1);
      if (k < 0 || k > lim) continue;
      long cands[2] = {k, -k};
      int ncand = k == 0 ? 1 : 2;
      for (int i = 0; i < ncand; ++i)
        if (matches(n1, cands[i])) return std::make_pair(n1, cands[i]);
    }
  return std::nullopt;
}

TrichotomyVerdict classify(const GcdInstance& inst, const Constants& c,
                           const Int& c_threshold) {
  if (!c.valid())
    throw std::domain_error("classify: constants fail the theorem conditions");
  if (c_threshold < 1)
    throw std::domain_error("classify: threshold must be positive");

  TrichotomyVerdict v;
  v.signed_max = max4(inst.a1, inst.b1, inst.a2, inst.b2);
  Int aa = abs(inst.a1), ab = abs(inst.b1), ac = abs(inst.a2), ad = abs(inst.b2);
  v.abs_max = max4(aa, ab, ac, ad);

  auto why = instance_violation(inst);
  if (!why.empty()) {
    v.tag = VerdictTag::HypothesisFail;
    v.reason = why;
    return v;
  }
  if (inst.q_gcd == 0 ||
      cmp_pow(Rat(inst.q_gcd), Rat(inst.h), c.epsilon) < 0) {
    v.tag = VerdictTag::HypothesisFail;
    v.reason = "Qgcd below H^eps";
    return v;
  }
  if (inst.h <= c_threshold) {
    v.tag = VerdictTag::HSmall;
    return v;
  }
  if (cmp_pow(Rat(v.abs_max), Rat(inst.h), c.alpha) >= 0) {
    v.tag = VerdictTag::CoeffLarge;
    return v;
  }
  if (auto w = mult_dep_search(inst.x1(), inst.x2(), c.n_bound)) {
    v.tag = VerdictTag::MultDep;
    v.witness = *w;
    return v;
  }
  v.tag = VerdictTag::BoundViolation;
  return v;
}

std::vector<Int> smooth_up_to(const PlaceSet& s, const Int& h_max) {
  if (h_max < 1) throw std::domain_error("smooth_up_to: bound must be >= 1");
  std::vector<Int> out{1};
  for (const Int& p : s.finite_primes()) {
    std::vector<Int> next;
    for (const Int& v : out)
      for (Int w = v; w <= h_max; w *= p) next.push_back(w);
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ScanSummary theorem2_scan(const PlaceSet& s, const Rat& epsilon,
                          const Int& h_max, const Int& a_max,
                          const Int& c_threshold, unsigned jobs,
                          const std::function<void(const ScanRow&)>& sink) {
  auto consts = constants(epsilon);
  if (h_max < 1) throw std::domain_error("theorem2_scan: Hmax must be >= 1");
  if (a_max < 0) throw std::domain_error("theorem2_scan: Amax must be >= 0");
  if (c_threshold < 1)
    throw std::domain_error("theorem2_scan: threshold must be positive");

  auto smooth = smooth_up_to(s, h_max);
  std::vector<Int> coeffs;
  for (Int a = -a_max; a <= a_max; ++a) {
    if (a == 0 || !s.coprime_to_finite(a)) continue;
    coeffs.push_back(a);
  }

  struct Block {
    std::vector<ScanRow> rows;
    unsigned long long considered = 0;
  };
  std::size_t m = smooth.size();
  std::size_t quads = m * m * m * m;
  if (coeffs.empty()) quads = 0;

  auto eval = [&](std::size_t idx) {
    Block blk;
    const Int& t2v = smooth[idx % m];
    idx /= m;
    const Int& s2v = smooth[idx % m];
    idx /= m;
    const Int& t1v = smooth[idx % m];
    const Int& s1v = smooth[idx / m];
    Int h = max4(s1v, t1v, s2v, t2v);
    for (const Int& a1 : coeffs)
      for (const Int& b1 : coeffs) {
        if (gcd_int(a1 * s1v, b1 * t1v) != 1) continue;
        Int d1 = a1 * s1v - b1 * t1v;
        for (const Int& a2 : coeffs)
          for (const Int& b2 : coeffs) {
            if (gcd_int(a2 * s2v, b2 * t2v) != 1) continue;
            blk.considered += 1;
            Int g = gcd_int(d1, a2 * s2v - b2 * t2v);
            if (g == 0 || cmp_pow(Rat(g), Rat(h), epsilon) < 0) continue;
            ScanRow row;
            row.inst.a1 = a1;
            row.inst.b1 = b1;
            row.inst.a2 = a2;
            row.inst.b2 = b2;
            row.inst.s1 = s1v;
            row.inst.t1 = t1v;
            row.inst.s2 = s2v;
            row.inst.t2 = t2v;
            row.inst.s = s;
            row.inst.h = h;
            row.inst.q_gcd = g;
            row.verdict = classify(row.inst, consts, c_threshold);
            blk.rows.push_back(std::move(row));
          }
      }
    return blk;
  };

  ScanSummary sum;
  parallel_for_ordered<Block>(
      quads, jobs, eval,
      [&](std::size_t, const Block& blk) {
        sum.considered += blk.considered;
        for (const auto& row : blk.rows) {
          sum.kept += 1;
          switch (row.verdict.tag) {
            case VerdictTag::HSmall: sum.count_a += 1; break;
            case VerdictTag::CoeffLarge: sum.count_b += 1; break;
            case VerdictTag::MultDep: sum.count_c += 1; break;
            case VerdictTag::BoundViolation: sum.count_violation += 1; break;
            case VerdictTag::HypothesisFail:
              throw InternalError("theorem2_scan: filtered row failed hypothesis");
          }
          if (row.verdict.tag != VerdictTag::MultDep && row.inst.h >= 2) {
            if (!sum.has_max_eps ||
                cmp_log_ratio(row.inst.q_gcd, row.inst.h, sum.max_eps_qgcd,
                              sum.max_eps_h) > 0) {
              sum.has_max_eps = true;
              sum.max_eps_qgcd = row.inst.q_gcd;
              sum.max_eps_h = row.inst.h;
            }
          }
          if (sink) sink(row);
        }
      },
      256);
  if (sum.has_max_eps)
    sum.max_eps_display = ln_int(sum.max_eps_qgcd) / ln_int(sum.max_eps_h);
  return sum;
}

void extremal_gcd_search(const Int& a, const Int& b, long n_max, unsigned jobs,
                         const std::function<void(const GcdRecordRow&)>& sink) {
  if (a < 2 || b < 2)
    throw std::domain_error("extremal_gcd_search: a and b must be >= 2");
  if (n_max < 1) throw std::domain_error("extremal_gcd_search: n_max must be >= 1");
  if (multiplicatively_dependent(a, b))
    throw std::domain_error("extremal_gcd_search: a, b multiplicatively dependent");

  Int best = 0;
  parallel_for_ordered<Int>(
      static_cast<std::size_t>(n_max), jobs,
      [&](std::size_t i) {
        unsigned long n = static_cast<unsigned long>(i) + 1;
        return gcd_int(pow_int(a, n) - 1, pow_int(b, n) - 1);
      },
      [&](std::size_t i, const Int& g) {
        GcdRecordRow row;
        row.n = static_cast<long>(i) + 1;
        row.g = g;
        row.record = g > best;
        if (row.record) best = g;
        row.has_stat = row.n >= 3 && g >= 2;
        if (row.has_stat) {
          double ln_n = std::log(static_cast<double>(row.n));
          row.stat = std::log(ln_int(g)) / (ln_n / std::log(ln_n));
        }
        if (sink) sink(row);
      },
      64);
}

ExponentPair box_witness(const Int& q, const Int& s) {
  if (q < 2) throw std::domain_error("box_witness: Q must be >= 2");
  if (gcd_int(s, q) != 1)
    throw std::domain_error("box_witness: s must be coprime to Q");
  Int smod = s % q;
  if (smod < 0) smod += q;

  ExponentPair u{1, smod}, v{0, q};
  lagrange_reduce(u, v);

  // after reduction every Euclidean-shortest vector is a small combination
  bool found = false;
  Int best_norm;
  ExponentPair best{0, 0};
  for (long x = -2; x <= 2; ++x)
    for (long y = -2; y <= 2; ++y) {
      if (x == 0 && y == 0) continue;
      ExponentPair w = sign_normalized({x * u.m + y * v.m, x * u.n + y * v.n});
      Int norm = w.m * w.m + w.n * w.n;
      if (!found || norm < best_norm || (norm == best_norm && w < best)) {
        found = true;
        best_norm = norm;
        best = w;
      }
    }

  Int r = floor_root(q, 2);
  Int ceil_sqrt = r * r == q ? r : r + 1;
  if (abs(best.m) <= ceil_sqrt && abs(best.n) <= ceil_sqrt) return best;
  // the Euclidean minimum can poke out of the box; the sup-norm one cannot
  return sup_minima({1, smod}, {0, q}).v1;
}

}  // namespace sunitlab
