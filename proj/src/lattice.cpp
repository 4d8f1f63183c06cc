#include "sunitlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
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

Int carmichael(const Int& modulus) {
  Int lambda = 1;
  for (auto& [p, e] : factor_magnitude(modulus)) {
    Int comp;
    if (p == 2) {
      if (e == 1)
        comp = 1;
      else if (e == 2)
        comp = 2;
      else
        comp = pow_int(2, static_cast<unsigned long>(e - 2));
    } else {
      comp = pow_int(p, static_cast<unsigned long>(e - 1)) * (p - 1);
    }
    mpz_lcm(lambda.get_mpz_t(), lambda.get_mpz_t(), comp.get_mpz_t());
  }
  return lambda;
}

Int n2(const ExponentPair& a) { return a.m * a.m + a.n * a.n; }
Int dot2(const ExponentPair& a, const ExponentPair& b) {
  return a.m * b.m + a.n * b.n;
}
Int cross2(const ExponentPair& a, const ExponentPair& b) {
  return a.m * b.n - a.n * b.m;
}
Int sup_norm(const ExponentPair& a) {
  return std::max(Int(abs(a.m)), Int(abs(a.n)));
}

ExponentPair sign_normalized(ExponentPair w) {
  if (w.m < 0 || (w.m == 0 && w.n < 0)) {
    w.m = -w.m;
    w.n = -w.n;
  }
  return w;
}

// nearest integer to t/s for s > 0, ties toward +inf
Int round_div(const Int& t, const Int& s) {
  Int num = 2 * t + s;
  Int den = 2 * s;
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return r;
}

}  // namespace

// Lagrange reduction in the Euclidean norm; afterwards |u|2 <= |v|2 and
// |<u,v>| <= |u|2^2 / 2, which pins coefficient sizes for the sweeps below.
void lagrange_reduce(ExponentPair& u, ExponentPair& v) {
  if (n2(v) < n2(u)) std::swap(u, v);
  while (true) {
    Int mu = round_div(dot2(u, v), n2(u));
    v.m -= mu * u.m;
    v.n -= mu * u.n;
    if (n2(v) >= n2(u)) break;
    std::swap(u, v);
  }
}

namespace {

// integer a-range solving |a*c + d| <= bound; full range when c == 0 and
// |d| <= bound (caller caps), empty when c == 0 and |d| > bound
struct ARange {
  bool empty = false, full = false;
  Int lo, hi;
};

ARange solve_row(const Int& c, const Int& d, const Int& bound) {
  ARange r;
  if (c == 0) {
    if (abs(d) <= bound)
      r.full = true;
    else
      r.empty = true;
    return r;
  }
  Int lo = -bound - d, hi = bound - d;  // lo <= a*c <= hi
  Int cc = c;
  if (cc < 0) {
    cc = -cc;
    Int t = -lo;
    lo = -hi;
    hi = t;
  }
  mpz_cdiv_q(r.lo.get_mpz_t(), lo.get_mpz_t(), cc.get_mpz_t());
  mpz_fdiv_q(r.hi.get_mpz_t(), hi.get_mpz_t(), cc.get_mpz_t());
  if (r.lo > r.hi) r.empty = true;
  return r;
}

}  // namespace

Int mult_order(const Int& x, const Int& modulus) {
  if (modulus < 2) throw std::domain_error("mult_order: modulus must be >= 2");
  if (gcd_int(x, modulus) != 1)
    throw std::domain_error("mult_order: arguments not coprime");
  Int o = carmichael(modulus);
  for (auto& [f, e] : factor_magnitude(o)) {
    for (long i = 0; i < e; ++i) {
      Int cand = o / f;
      if (pow_mod(x, cand, modulus) != 1) break;
      o = cand;
    }
  }
  return o;
}

RelationLattice relation_lattice(const Int& p, const Int& q,
                                 const Int& modulus) {
  if (modulus < 2)
    throw std::domain_error("relation_lattice: modulus must be >= 2");
  if (!is_prime(p) || !is_prime(q) || p == q)
    throw std::domain_error("relation_lattice: p, q must be distinct primes");
  if (gcd_int(p * q, modulus) != 1)
    throw std::domain_error("relation_lattice: modulus not coprime to pq");

  Int oq = mult_order(q, modulus);
  std::map<Int, Int> qpow;  // power of q -> exponent
  Int v = 1;
  for (Int k = 0; k < oq; ++k) {
    qpow.emplace(v, k);
    v = v * q % modulus;
  }
  Int r = 1;
  Int pv = p % modulus;
  auto it = qpow.find(pv);
  while (it == qpow.end()) {
    pv = pv * p % modulus;
    r += 1;
    it = qpow.find(pv);
  }
  Int u = (oq - it->second) % oq;

  RelationLattice lat;
  lat.p = p;
  lat.q = q;
  lat.modulus = modulus;
  lat.row0 = {r, u};
  lat.row1 = {Int(0), oq};
  lat.det = r * oq;
  return lat;
}

Int subgroup_order_enumerated(const Int& p, const Int& q, const Int& modulus) {
  if (modulus < 2)
    throw std::domain_error("subgroup_order: modulus must be >= 2");
  if (gcd_int(p * q, modulus) != 1)
    throw std::domain_error("subgroup_order: modulus not coprime to pq");

  if (modulus.fits_ulong_p() && modulus.get_ui() <= (1u << 26)) {
    uint64_t m = modulus.get_ui();
    uint64_t pp = mpz_fdiv_ui(p.get_mpz_t(), m);
    uint64_t qq = mpz_fdiv_ui(q.get_mpz_t(), m);
    std::vector<uint8_t> seen(m, 0);
    std::vector<uint64_t> stack{1};
    seen[1] = 1;
    size_t count = 1;
    while (!stack.empty()) {
      uint64_t a = stack.back();
      stack.pop_back();
      for (uint64_t g : {pp, qq}) {
        uint64_t b = static_cast<uint64_t>(
            static_cast<unsigned __int128>(a) * g % m);
        if (!seen[b]) {
          seen[b] = 1;
          ++count;
          stack.push_back(b);
        }
      }
    }
    return Int(static_cast<unsigned long>(count));
  }

  std::set<Int> seen{Int(1)};
  std::vector<Int> stack{Int(1)};
  Int pp = p % modulus, qq = q % modulus;
  while (!stack.empty()) {
    Int a = stack.back();
    stack.pop_back();
    for (const Int& g : {pp, qq}) {
      Int b = a * g % modulus;
      if (seen.insert(b).second) stack.push_back(b);
    }
  }
  return Int(static_cast<unsigned long>(seen.size()));
}

Int ord_q(const Int& p, const Int& q, const Int& modulus) {
  Int by_det = relation_lattice(p, q, modulus).det;
  Int by_enum = subgroup_order_enumerated(p, q, modulus);
  if (by_det != by_enum)
    throw InternalError(
        "ord_q: lattice determinant disagrees with closure enumeration");
  return by_det;
}

std::vector<ExponentPair> vectors_of_sup_norm(ExponentPair u, ExponentPair v,
                                              const Int& norm) {
  if (cross2(u, v) == 0)
    throw std::domain_error("vectors_of_sup_norm: basis vectors dependent");
  if (norm < 1) throw std::domain_error("vectors_of_sup_norm: norm must be >= 1");
  lagrange_reduce(u, v);
  // w = a u + b v with |w|oo <= norm forces b^2 (4|v|2^2 - |u|2^2) <= 8 norm^2
  Int denom = 4 * n2(v) - n2(u);
  Int bmax = floor_root(8 * norm * norm / denom, 2) + 1;

  std::vector<ExponentPair> out;
  for (Int b = 0; b <= bmax; ++b) {
    ARange rm = solve_row(u.m, b * v.m, norm);
    ARange rn = solve_row(u.n, b * v.n, norm);
    if (rm.empty || rn.empty) continue;
    // u != 0, so at most one of the two rows is unconstrained
    if (rm.full && rn.full) throw InternalError("vectors_of_sup_norm: zero basis row");
    Int lo = rm.full ? rn.lo : rm.lo;
    Int hi = rm.full ? rn.hi : rm.hi;
    if (!rm.full && !rn.full) {
      lo = std::max(rm.lo, rn.lo);
      hi = std::min(rm.hi, rn.hi);
    }
    for (Int a = lo; a <= hi; ++a) {
      if (b == 0 && a == 0) continue;
      ExponentPair w{a * u.m + b * v.m, a * u.n + b * v.n};
      if (sup_norm(w) == norm) out.push_back(sign_normalized(w));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MinimaPair sup_minima(ExponentPair u, ExponentPair v) {
  if (cross2(u, v) == 0)
    throw std::domain_error("sup_minima: basis vectors dependent");
  lagrange_reduce(u, v);

  // Candidate sweep over rows w = a u + b v. After reduction any vector
  // within sup-norm max(|u|oo, |v|oo) has |b| <= 2; within each row the
  // sup-norm is convex piecewise-linear in a, so its integer minimizers sit
  // next to the real breakpoints.
  std::vector<std::pair<Int, ExponentPair>> cands;
  auto push = [&](const Int& a, const Int& b) {
    ExponentPair w{a * u.m + b * v.m, a * u.n + b * v.n};
    if (w.m == 0 && w.n == 0) return;
    cands.emplace_back(sup_norm(w), sign_normalized(w));
  };
  auto push_around = [&](const Int& num, const Int& den, const Int& b) {
    // integers within 1 of num/den
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    for (Int a = f - 1; a <= f + 2; ++a) push(a, b);
  };
  for (Int b = 0; b <= 2; ++b) {
    for (long a = -2; a <= 2; ++a) push(Int(a), b);
    // breakpoints of max(|a u.m + b v.m|, |a u.n + b v.n|)
    if (u.m != 0) push_around(-b * v.m, u.m, b);
    if (u.n != 0) push_around(-b * v.n, u.n, b);
    if (u.m != u.n) push_around(-b * (v.m - v.n), u.m - u.n, b);
    if (u.m != -u.n) push_around(-b * (v.m + v.n), u.m + u.n, b);
  }

  Int lambda1 = cands.front().first;
  for (const auto& c : cands) lambda1 = std::min(lambda1, c.first);

  auto shell1 = vectors_of_sup_norm(u, v, lambda1);
  MinimaPair mp;
  mp.lambda1 = lambda1;
  mp.v1 = shell1.front();

  for (const auto& w : shell1) {
    if (cross2(w, mp.v1) != 0) {
      mp.lambda2 = lambda1;
      mp.v2 = w;
      return mp;
    }
  }

  bool have = false;
  Int lambda2;
  for (const auto& c : cands) {
    if (cross2(c.second, mp.v1) == 0) continue;
    if (!have || c.first < lambda2) {
      lambda2 = c.first;
      have = true;
    }
  }
  if (!have) throw InternalError("sup_minima: no independent candidate");
  for (const auto& w : vectors_of_sup_norm(u, v, lambda2)) {
    if (cross2(w, mp.v1) != 0) {
      mp.lambda2 = lambda2;
      mp.v2 = w;
      return mp;
    }
  }
  throw InternalError("sup_minima: shell lost the lambda2 attainer");
}

MinimaPair gauss_reduce(const RelationLattice& lat) {
  return sup_minima(lat.row0, lat.row1);
}

bool lambda1_lower_bound_check(const RelationLattice& lat) {
  auto mp = gauss_reduce(lat);
  for (const auto& w : vectors_of_sup_norm(lat.row0, lat.row1, mp.lambda1)) {
    Int am = abs(w.m), an = abs(w.n);
    Int lhs = pow_int(lat.p, am.get_ui()) * pow_int(lat.q, an.get_ui());
    if (lhs < lat.modulus) return false;
  }
  return true;
}

void corollary_trace(const Int& p, const Int& q, const Int& q_max,
                     const Int& q0, unsigned jobs,
                     const std::function<void(const OrderTraceRow&)>& sink) {
  if (q_max < 2)
    throw std::domain_error("corollary_trace: q_max must be >= 2");
  std::vector<Int> moduli;
  for (Int Q = 2; Q <= q_max; ++Q)
    if (gcd_int(p * q, Q) == 1) moduli.push_back(Q);

  auto rows = parallel_map<OrderTraceRow>(
      moduli.size(), jobs, [&](size_t i) {
        OrderTraceRow row;
        row.lat = relation_lattice(p, q, moduli[i]);
        if (row.lat.det != subgroup_order_enumerated(p, q, moduli[i]))
          throw InternalError(
              "corollary_trace: lattice determinant disagrees with closure "
              "enumeration");
        row.minima = sup_minima(row.lat.row0, row.lat.row1);
        Int prod = row.minima.lambda1 * row.minima.lambda2;
        row.minkowski_ok = 2 * prod >= row.lat.det && prod <= row.lat.det;
        double lq = std::log(moduli[i].get_d());
        row.ratio = row.lat.det.get_d() / (lq * lq);
        return row;
      });

  bool seen_tail = false;
  double running = 0;
  for (auto& row : rows) {
    if (row.lat.modulus >= q0) {
      row.in_tail = true;
      running = seen_tail ? std::min(running, row.ratio) : row.ratio;
      seen_tail = true;
      row.running_min = running;
    }
    sink(row);
  }
}

}  // namespace sunitlab
