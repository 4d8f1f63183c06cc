#include "sunitlab/orbit.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "sunitlab/parallel.hpp"

namespace sunitlab {

namespace {

Int gcd_int(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

// residues of x^e for e in [-emax, emax], indexed by e + emax
std::vector<Int> power_table(const Int& x, long emax, const Int& Q) {
  std::vector<Int> tab(2 * emax + 1);
  tab[emax] = 1;
  Int xi = mod_inverse(x, Q);
  for (long e = 1; e <= emax; ++e) {
    tab[emax + e] = tab[emax + e - 1] * x % Q;
    tab[emax - e] = tab[emax - e + 1] * xi % Q;
  }
  return tab;
}

// largest e >= 0 with base^e <= bound
long exponent_cap(const Int& base, const Int& bound) {
  long e = 0;
  Int v = base;
  while (v <= bound) {
    v *= base;
    ++e;
  }
  return e;
}

}  // namespace

OrbitParams OrbitParams::make(const Int& p, const Int& q, const Int& modulus,
                              const Rat& beta, long k_bound) {
  if (!is_prime(p) || !is_prime(q) || p == q)
    throw std::domain_error("orbit params: p, q must be distinct primes");
  if (modulus < 2)
    throw std::domain_error("orbit params: modulus must be >= 2");
  if (gcd_int(modulus, p * q) != 1)
    throw std::domain_error("orbit params: modulus not coprime to pq");
  if (beta <= 0 || beta >= 1)
    throw std::domain_error("orbit params: beta must lie in (0,1)");
  if (k_bound < 1) throw std::domain_error("orbit params: K must be >= 1");
  if (!beta.get_num().fits_ulong_p() || !beta.get_den().fits_ulong_p())
    throw std::domain_error("orbit params: beta components too large");
  OrbitParams pr;
  pr.p = p;
  pr.q = q;
  pr.modulus = modulus;
  pr.beta = beta;
  pr.k_bound = k_bound;
  pr.window = floor_root(pow_int(modulus, beta.get_num().get_ui()),
                         beta.get_den().get_ui());
  return pr;
}

std::vector<Int> b_set(const OrbitParams& params) {
  std::set<Int> out;
  Int pq = params.p * params.q;
  // window < modulus for beta < 1, so t and modulus - t are the residues
  for (Int t = 1; t <= params.window; ++t) {
    if (gcd_int(t, pq) != 1) continue;
    out.insert(t);
    out.insert(params.modulus - t);
  }
  return {out.begin(), out.end()};
}

CanonicalRep canonical_rep(const Int& a, const OrbitParams& params) {
  const Int& Q = params.modulus;
  Int a0 = a % Q;
  if (a0 < 0) a0 += Q;
  Int neg = a0 - Q;
  bool lo_ok = a0 <= params.window;
  bool hi_ok = -neg <= params.window;
  Int lift;
  if (lo_ok && hi_ok) {
    lift = (-neg < a0) ? neg : a0;  // smaller magnitude; tie keeps positive
  } else if (lo_ok) {
    lift = a0;
  } else if (hi_ok) {
    lift = neg;
  } else {
    throw std::domain_error("canonical_rep: no lift in the window");
  }
  if (lift == 0) throw std::domain_error("canonical_rep: zero lift");

  long mp = valuation(lift, params.p);
  long nq = valuation(lift, params.q);
  Int pe = pow_int(params.p, static_cast<unsigned long>(mp));
  Int qe = pow_int(params.q, static_cast<unsigned long>(nq));
  if (pe > params.window || qe > params.window)
    throw InternalError("canonical_rep: stripped power exceeds the window");
  Int rest = lift / (pe * qe);
  Int ap = rest % Q;
  if (ap < 0) ap += Q;
  return {ap, Int(mp), Int(nq)};
}

bool uniqueness_check(const OrbitParams& params) {
  if (params.beta >= Rat(1, 3))
    throw std::domain_error("uniqueness_check: beta must be < 1/3");
  const Int& Q = params.modulus;
  long cap_m = exponent_cap(params.p, params.window);
  long cap_n = exponent_cap(params.q, params.window);
  auto pm = power_table(params.p, cap_m, Q);
  auto qn = power_table(params.q, cap_n, Q);
  std::map<Int, long> counts;
  for (const Int& ap : b_set(params))
    for (const Int& x : pm)
      for (const Int& y : qn) counts[x * y % Q * ap % Q] += 1;
  for (Int t = 1; t <= params.window; ++t) {
    Int other = Q - t;
    for (const Int& a : {t, other}) {
      auto it = counts.find(a);
      if (it == counts.end() || it->second != 1) return false;
    }
  }
  return true;
}

std::vector<ReturnRecord> return_set(const OrbitParams& params) {
  const Int& Q = params.modulus;
  Int qk = pow_int(Q, static_cast<unsigned long>(params.k_bound));
  long cap_m = exponent_cap(params.p, qk);
  long cap_n = exponent_cap(params.q, qk);
  auto bs = b_set(params);
  std::set<Int> members(bs.begin(), bs.end());
  auto pm = power_table(params.p, cap_m, Q);
  auto qn = power_table(params.q, cap_n, Q);
  std::vector<ReturnRecord> out;
  for (long m = -cap_m; m <= cap_m; ++m)
    for (long n = -cap_n; n <= cap_n; ++n) {
      Int r = pm[m + cap_m] * qn[n + cap_n] % Q;
      for (const Int& a : bs) {
        Int b = r * a % Q;
        if (members.count(b)) out.push_back({{m, n}, a, b});
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

CollinearResult is_collinear(const std::vector<ExponentPair>& points) {
  std::vector<ExponentPair> pts = points;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  CollinearResult res;
  if (pts.size() <= 1) {
    res.collinear = true;
    if (pts.size() == 1) res.anchor = pts[0];
    return res;
  }
  ExponentPair d{pts[1].m - pts[0].m, pts[1].n - pts[0].n};
  for (size_t i = 2; i < pts.size(); ++i) {
    Int cm = pts[i].m - pts[0].m;
    Int cn = pts[i].n - pts[0].n;
    if (d.m * cn - d.n * cm != 0) return res;
  }
  res.collinear = true;
  res.anchor = pts[0];
  Int g = gcd_int(d.m, d.n);
  d.m /= g;
  d.n /= g;
  if (d.m < 0 || (d.m == 0 && d.n < 0)) {
    d.m = -d.m;
    d.n = -d.n;
  }
  res.direction = d;
  return res;
}

std::size_t theorem1_scan(const Int& p, const Int& q, long k_bound,
                          const Rat& beta, const Int& q_lo, const Int& q_hi,
                          unsigned jobs,
                          const std::function<void(const Theorem1Row&)>& sink) {
  if (q_lo < 2) throw std::domain_error("theorem1_scan: q_lo must be >= 2");
  if (!is_prime(p) || !is_prime(q) || p == q)
    throw std::domain_error("theorem1_scan: p, q must be distinct primes");
  if (beta <= 0 || beta >= 1)
    throw std::domain_error("theorem1_scan: beta must lie in (0,1)");
  if (k_bound < 1) throw std::domain_error("theorem1_scan: K must be >= 1");

  std::vector<Int> moduli;
  std::size_t skipped = 0;
  Int pq = p * q;
  for (Int Q = q_lo; Q <= q_hi; ++Q) {
    if (gcd_int(Q, pq) == 1)
      moduli.push_back(Q);
    else
      ++skipped;
  }

  auto rows = parallel_map<Theorem1Row>(moduli.size(), jobs, [&](size_t i) {
    auto pr = OrbitParams::make(p, q, moduli[i], beta, k_bound);
    Theorem1Row row;
    row.modulus = moduli[i];
    auto bs = b_set(pr);
    row.b_size = bs.size();
    if (bs.empty()) {
      row.empty_b = true;
      row.line.collinear = true;
      return row;
    }
    auto rs = return_set(pr);
    row.return_size = rs.size();
    std::vector<ExponentPair> pairs;
    pairs.reserve(rs.size());
    for (const auto& rec : rs) pairs.push_back(rec.pair);
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    row.pair_count = pairs.size();
    row.line = is_collinear(pairs);
    return row;
  });
  for (const auto& row : rows) sink(row);
  return skipped;
}

}  // namespace sunitlab
