#include "sunitlab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>

namespace sunitlab {

namespace {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, b, m);
    b = mulmod_u64(b, b, m);
    e >>= 1;
  }
  return r;
}

// Deterministic for all 64-bit inputs with this witness set.
bool miller_rabin_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Brent-cycle Pollard rho with deterministic parameters. n odd, composite,
// no factor <= trial bound. Returns a nontrivial factor or throws.
Int rho_split(const Int& n, const FactorOptions& opts) {
  for (unsigned c = 1; c <= opts.rho_rounds; ++c) {
    Int y = 2, q = 1, g = 1, x, ys;
    unsigned long r = 1, steps = 0;
    const unsigned long batch = 128;
    while (g == 1 && steps < opts.rho_iteration_cap) {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
      unsigned long k = 0;
      while (k < r && g == 1 && steps < opts.rho_iteration_cap) {
        ys = y;
        unsigned long lim = std::min(batch, r - k);
        for (unsigned long i = 0; i < lim; ++i) {
          y = (y * y + c) % n;
          q = q * abs(x - y) % n;
          ++steps;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += lim;
      }
      r *= 2;
    }
    if (g == n) {
      do {  // the batch overshot; replay one step at a time
        ys = (ys * ys + c) % n;
        Int diff = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != 1 && g != n) return g;
  }
  throw IncompleteFactorization("cannot split cofactor " + n.get_str() +
                                " within the factorization budget");
}

void factor_into(Int n, std::map<Int, long>& out, const FactorOptions& opts) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  Int d = rho_split(n, opts);
  factor_into(d, out, opts);
  factor_into(n / d, out, opts);
}

// Closed interval [lo, hi] containing log2 of a positive integer.
void log2_bounds(const Int& m, Int& lo, Int& hi) {
  size_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);
  lo = static_cast<unsigned long>(bits - 1);
  hi = (mpz_popcount(m.get_mpz_t()) == 1) ? lo : Int(static_cast<unsigned long>(bits));
}

unsigned long to_ulong_checked(const Int& n, const char* what) {
  if (!n.fits_ulong_p()) throw std::domain_error(std::string("exponent too large in ") + what);
  return n.get_ui();
}

}  // namespace

bool is_prime(const Int& n) {
  if (n < 2) return false;
  if (n.fits_ulong_p()) return miller_rabin_u64(n.get_ui());
  return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
}

Place Place::finite(Int prime) {
  if (!is_prime(prime)) throw std::domain_error("Place::finite: " + prime.get_str() + " is not prime");
  return Place(true, std::move(prime));
}

Place Place::infinity() { return Place(false, 0); }

const Int& Place::prime() const {
  if (!finite_) throw std::domain_error("Place::prime: archimedean place");
  return prime_;
}

bool Place::operator<(const Place& o) const {
  if (finite_ != o.finite_) return finite_;  // finite sorts before infinity
  if (!finite_) return false;
  return prime_ < o.prime_;
}

bool Place::operator==(const Place& o) const {
  return finite_ == o.finite_ && (!finite_ || prime_ == o.prime_);
}

std::string Place::str() const { return finite_ ? prime_.get_str() : "inf"; }

PlaceSet::PlaceSet() { places_.push_back(Place::infinity()); }

PlaceSet PlaceSet::of_primes(std::vector<Int> primes) {
  std::sort(primes.begin(), primes.end());
  for (size_t i = 0; i + 1 < primes.size(); ++i) {
    if (primes[i] == primes[i + 1])
      throw std::domain_error("PlaceSet: duplicate prime " + primes[i].get_str());
  }
  PlaceSet s;
  s.places_.clear();
  for (auto& p : primes) {
    s.places_.push_back(Place::finite(p));
    s.finite_.push_back(std::move(p));
  }
  s.places_.push_back(Place::infinity());
  return s;
}

PlaceSet PlaceSet::of_primes(std::initializer_list<long> primes) {
  std::vector<Int> v;
  for (long p : primes) v.emplace_back(p);
  return of_primes(std::move(v));
}

bool PlaceSet::has_finite(const Int& p) const {
  return std::binary_search(finite_.begin(), finite_.end(), p);
}

bool PlaceSet::coprime_to_finite(const Int& n) const {
  for (const Int& p : finite_) {
    if (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) return false;
  }
  return true;
}

PlaceSet PlaceSet::without(const std::vector<Int>& drop) const {
  std::vector<Int> keep;
  for (const Int& p : finite_) {
    if (std::find(drop.begin(), drop.end(), p) == drop.end()) keep.push_back(p);
  }
  return of_primes(std::move(keep));
}

long valuation(const Int& n, const Int& p) {
  if (n == 0) throw std::domain_error("valuation: zero input");
  Int rest;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

Rat v_abs(const Rat& x, const Place& v) {
  if (x == 0) throw std::domain_error("v_abs: zero input");
  if (!v.is_finite()) return abs(x);
  long m = valuation(x.get_num(), v.prime()) - valuation(x.get_den(), v.prime());
  Int pm = pow_int(v.prime(), static_cast<unsigned long>(m >= 0 ? m : -m));
  Rat r = m >= 0 ? Rat(1, pm) : Rat(pm);
  r.canonicalize();
  return r;
}

Rat s_product(const Rat& x, const PlaceSet& s) {
  if (x == 0) throw std::domain_error("s_product: zero input");
  Rat acc = 1;
  for (const Place& v : s.places()) acc *= v_abs(x, v);
  return acc;
}

bool is_smooth(const Int& n, const PlaceSet& s) {
  if (n < 1) throw std::domain_error("is_smooth: input must be >= 1");
  Int rest = n;
  for (const Int& p : s.finite_primes()) {
    Int tmp;
    mpz_remove(tmp.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
    rest = tmp;
  }
  return rest == 1;
}

SPartSplit s_part_split(const Int& n, const PlaceSet& s) {
  if (n == 0) throw std::domain_error("s_part_split: zero input");
  SPartSplit out;
  out.sign = sgn(n) < 0 ? -1 : 1;
  Int rest = abs(n);
  out.s_part = 1;
  for (const Int& p : s.finite_primes()) {
    Int reduced;
    auto e = mpz_remove(reduced.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
    if (e > 0) out.s_part *= pow_int(p, static_cast<unsigned long>(e));
    rest = reduced;
  }
  out.residual = rest;
  return out;
}

std::map<Int, long> factor_magnitude(Int n, const FactorOptions& opts) {
  if (n < 1) throw std::domain_error("factor_magnitude: input must be >= 1");
  std::map<Int, long> out;
  if (n == 1) return out;
  for (unsigned long p = 2; p <= opts.trial_bound; p = (p == 2 ? 3 : p + 2)) {
    if (Int(p) * p > n) break;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      Int reduced;
      auto e = mpz_remove(reduced.get_mpz_t(), n.get_mpz_t(), Int(p).get_mpz_t());
      out[Int(p)] = static_cast<long>(e);
      n = reduced;
    }
  }
  if (n > 1) {
    if (n <= Int(opts.trial_bound) * Int(opts.trial_bound)) {
      ++out[n];  // below the trial square, the cofactor is prime
    } else {
      factor_into(n, out, opts);
    }
  }
  return out;
}

Rat Factorization::value() const {
  Rat v = sign;
  for (const auto& [p, e] : exponents) {
    Int pe = pow_int(p, static_cast<unsigned long>(e >= 0 ? e : -e));
    if (e >= 0)
      v *= Rat(pe);
    else
      v /= Rat(pe);
  }
  return v;
}

Factorization exponent_vector(const Rat& x, const FactorOptions& opts) {
  if (x == 0) throw std::domain_error("exponent_vector: zero input");
  Factorization f;
  f.sign = sgn(x) < 0 ? -1 : 1;
  for (const auto& [p, e] : factor_magnitude(abs(x.get_num()), opts)) f.exponents[p] += e;
  for (const auto& [p, e] : factor_magnitude(x.get_den(), opts)) f.exponents[p] -= e;
  std::erase_if(f.exponents, [](const auto& kv) { return kv.second == 0; });
  return f;
}

SRational SRational::from_rational(const Rat& x, const PlaceSet& s) {
  if (x == 0) throw std::domain_error("SRational: zero input");
  SRational r;
  r.sign_ = sgn(x) < 0 ? -1 : 1;
  for (const Int& p : s.finite_primes()) {
    long e = valuation(x.get_num(), p) - valuation(x.get_den(), p);
    if (e != 0) r.exps_[p] = e;
  }
  r.rnum_ = s_part_split(x.get_num(), s).residual;
  r.rden_ = s_part_split(x.get_den(), s).residual;
  return r;
}

Rat SRational::value() const {
  Rat v(rnum_, rden_);
  v.canonicalize();
  if (sign_ < 0) v = -v;
  for (const auto& [p, e] : exps_) {
    Int pe = pow_int(p, static_cast<unsigned long>(e >= 0 ? e : -e));
    if (e >= 0)
      v *= Rat(pe);
    else
      v /= Rat(pe);
  }
  return v;
}

Int height(std::span<const Int> v) {
  if (v.empty()) throw std::domain_error("height: empty vector");
  Int h = 0;
  for (const Int& x : v) h = std::max(h, Int(abs(x)));
  return h;
}

Int pow_int(const Int& b, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

Int pow_mod(const Int& b, const Int& e, const Int& m) {
  if (m < 2) throw std::domain_error("pow_mod: modulus must be >= 2");
  Int base = b;
  Int exp = e;
  if (exp < 0) {
    base = mod_inverse(b, m);
    exp = -exp;
  }
  Int r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
  return r;
}

Int mod_inverse(const Int& a, const Int& m) {
  if (m < 2) throw std::domain_error("mod_inverse: modulus must be >= 2");
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("mod_inverse: argument not invertible");
  return r;
}

int cmp_pow(const Rat& x, const Rat& base, const Rat& e) {
  if (x <= 0 || base <= 0) throw std::domain_error("cmp_pow: positive arguments required");
  const Int& n = e.get_num();
  unsigned long d = to_ulong_checked(e.get_den(), "cmp_pow");

  // Interval bound on d*log2(x) - n*log2(base); decides unless 0 is inside.
  Int xn_lo, xn_hi, xd_lo, xd_hi, bn_lo, bn_hi, bd_lo, bd_hi;
  log2_bounds(x.get_num(), xn_lo, xn_hi);
  log2_bounds(x.get_den(), xd_lo, xd_hi);
  log2_bounds(base.get_num(), bn_lo, bn_hi);
  log2_bounds(base.get_den(), bd_lo, bd_hi);
  Int lx_lo = xn_lo - xd_hi, lx_hi = xn_hi - xd_lo;
  Int lb_lo = bn_lo - bd_hi, lb_hi = bn_hi - bd_lo;
  Int nb_lo = n >= 0 ? Int(n * lb_lo) : Int(n * lb_hi);
  Int nb_hi = n >= 0 ? Int(n * lb_hi) : Int(n * lb_lo);
  Int diff_lo = Int(d) * lx_lo - nb_hi;
  Int diff_hi = Int(d) * lx_hi - nb_lo;
  if (diff_hi < 0) return -1;
  if (diff_lo > 0) return 1;

  // Exact: x^d vs base^n by clearing denominators.
  unsigned long na = to_ulong_checked(abs(n), "cmp_pow");
  Int lhs = pow_int(x.get_num(), d);
  Int rhs = pow_int(x.get_den(), d);
  if (n >= 0) {
    lhs *= pow_int(base.get_den(), na);
    rhs *= pow_int(base.get_num(), na);
  } else {
    lhs *= pow_int(base.get_num(), na);
    rhs *= pow_int(base.get_den(), na);
  }
  return cmp(lhs, rhs);
}

Int floor_root(const Int& n, unsigned long d) {
  if (n < 0) throw std::domain_error("floor_root: negative input");
  if (d == 0) throw std::domain_error("floor_root: zero degree");
  Int r;
  mpz_root(r.get_mpz_t(), n.get_mpz_t(), d);
  return r;
}

namespace {

// sign of log(g)/log(h) - n/d via g^d vs h^n, all nonnegative.
int cmp_ratio_to_frac(const Int& g, const Int& h, const Int& n, const Int& d) {
  Int lhs = pow_int(g, to_ulong_checked(d, "cmp_log_ratio"));
  Int rhs = pow_int(h, to_ulong_checked(n, "cmp_log_ratio"));
  return cmp(lhs, rhs);
}

// n = base^k with k maximal; nullopt when n has an unfactorable part
std::optional<std::pair<Int, long>> primitive_power(const Int& n) {
  std::map<Int, long> f;
  try {
    f = factor_magnitude(n);
  } catch (const IncompleteFactorization&) {
    return std::nullopt;
  }
  long k = 0;
  for (auto& [p, e] : f) k = k == 0 ? e : std::gcd(k, e);
  Int base = 1;
  for (auto& [p, e] : f) base *= pow_int(p, static_cast<unsigned long>(e / k));
  return std::make_pair(base, k);
}

}  // namespace

int cmp_log_ratio(const Int& g1, const Int& h1, const Int& g2, const Int& h2) {
  if (g1 < 1 || g2 < 1 || h1 < 2 || h2 < 2)
    throw std::domain_error("cmp_log_ratio: need g >= 1 and h >= 2");
  if (g1 == 1 && g2 == 1) return 0;
  if (g1 == 1) return -1;
  if (g2 == 1) return 1;

  if (g1 == g2 && h1 == h2) return 0;

  // Double prefilter with a wide safety margin.
  double a = std::log(g1.get_d()) / std::log(h1.get_d());
  double b = std::log(g2.get_d()) / std::log(h2.get_d());
  if (std::isfinite(a) && std::isfinite(b)) {
    double margin = 1e-9 * (std::abs(a) + std::abs(b) + 1.0);
    if (a < b - margin) return -1;
    if (a > b + margin) return 1;
  }

  // Near-equal ratios: when the pairs are power-compatible the comparison
  // is a rational one and the answer is exact. Without this the walk below
  // chases an irrational tie forever (e.g. (3,2) against (9,4)).
  auto pg1 = primitive_power(g1), ph1 = primitive_power(h1);
  auto pg2 = primitive_power(g2), ph2 = primitive_power(h2);
  if (pg1 && ph1 && pg2 && ph2) {
    bool rat1 = pg1->first == ph1->first;  // ratio1 = e1/f1 exactly
    bool rat2 = pg2->first == ph2->first;
    Int e1(pg1->second), f1(ph1->second), e2(pg2->second), f2(ph2->second);
    if (rat1 && rat2) return cmp(e1 * f2, e2 * f1);
    if (rat1) return -cmp_ratio_to_frac(g2, h2, e1, f1);
    if (rat2) return cmp_ratio_to_frac(g1, h1, e2, f2);
    if (pg1->first == pg2->first && ph1->first == ph2->first)
      return cmp(e1 * f2, e2 * f1);  // shared irrational factor cancels
  }

  // Stern-Brocot walk: compare both ratios against mediants until they
  // separate or both hit the same rational exactly. Mediant size is capped;
  // astronomically deep ties are reported as equal.
  Int lo_n = 0, lo_d = 1, hi_n = 1, hi_d = 0;
  for (int iter = 0; iter < 128; ++iter) {
    Int mn = lo_n + hi_n, md = lo_d + hi_d;
    if (mn > 1000000 || md > 1000000) break;
    int c1 = cmp_ratio_to_frac(g1, h1, mn, md);
    int c2 = cmp_ratio_to_frac(g2, h2, mn, md);
    if (c1 != c2) return c1 < c2 ? -1 : 1;
    if (c1 == 0) return 0;  // both equal the mediant
    if (c1 < 0) {
      hi_n = mn;
      hi_d = md;
    } else {
      lo_n = mn;
      lo_d = md;
    }
  }
  return 0;  // indistinguishable at this depth; treat as a tie
}

std::string rat_str(const Rat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

}  // namespace sunitlab
