#pragma once

// Exact arithmetic substrate: places of Q, valuations, S-smoothness,
// S-part splitting, factorization, heights, and exact power comparisons.
// Everything is GMP-backed; no floating point is used for any decision.

#include <gmpxx.h>

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sunitlab {

using Int = mpz_class;
using Rat = mpq_class;

// Thrown when a cofactor cannot be split within the configured effort
// budget. Callers never receive a silently truncated factorization.
class IncompleteFactorization : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an internal cross-check fails; reaching this is a bug in the
// library, not bad input. The CLI maps it to its own exit code.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Deterministic Miller-Rabin with a fixed witness set for 64-bit inputs,
// GMP's BPSW-based test above that.
bool is_prime(const Int& n);

// A place of Q: a finite prime or the archimedean absolute value.
class Place {
 public:
  static Place finite(Int prime);  // domain_error unless prime is prime
  static Place infinity();

  bool is_finite() const { return finite_; }
  const Int& prime() const;  // finite places only

  // Canonical order: finite primes ascending, infinity last.
  bool operator<(const Place& o) const;
  bool operator==(const Place& o) const;

  std::string str() const;  // "2", "3", ..., "inf"

 private:
  Place(bool finite, Int p) : finite_(finite), prime_(std::move(p)) {}
  bool finite_;
  Int prime_;
};

// Finite set of places, always containing infinity exactly once.
class PlaceSet {
 public:
  PlaceSet();  // just {inf}
  static PlaceSet of_primes(std::vector<Int> primes);
  static PlaceSet of_primes(std::initializer_list<long> primes);

  const std::vector<Place>& places() const { return places_; }        // canonical order
  const std::vector<Int>& finite_primes() const { return finite_; }   // ascending

  bool has_finite(const Int& p) const;
  bool coprime_to_finite(const Int& n) const;          // gcd(n, every p in S_f) = 1
  PlaceSet without(const std::vector<Int>& drop) const;

 private:
  std::vector<Place> places_;
  std::vector<Int> finite_;
};

// p-adic valuation of n != 0.
long valuation(const Int& n, const Int& p);

// Normalized absolute value |x|_v of a nonzero rational: p^{-v_p(x)} at a
// finite place, |x| at infinity.
Rat v_abs(const Rat& x, const Place& v);

// prod over v in S of |x|_v, computed literally over the places of S.
Rat s_product(const Rat& x, const PlaceSet& s);

// True iff n >= 1 has no prime factor outside S_f. is_smooth(1) is true.
bool is_smooth(const Int& n, const PlaceSet& s);

// |n| = s_part * residual with s_part the largest S_f-supported divisor,
// residual coprime to S_f and positive; sign carried separately.
struct SPartSplit {
  Int s_part;
  Int residual;
  int sign;  // +1 or -1
};
SPartSplit s_part_split(const Int& n, const PlaceSet& s);

struct FactorOptions {
  unsigned long trial_bound = 1'000'000;   // trial division up to here
  unsigned rho_rounds = 64;                // Pollard rho polynomial choices
  unsigned long rho_iteration_cap = 1ul << 20;
};

// Full factorization of n >= 1 into prime -> exponent. Trial division up
// to opts.trial_bound, then deterministic Brent-cycle Pollard rho; throws
// IncompleteFactorization when the budget runs out.
std::map<Int, long> factor_magnitude(Int n, const FactorOptions& opts = {});

// Signed factorization of a nonzero rational; denominator primes get
// negative exponents. No zero exponents are stored.
struct Factorization {
  int sign = 1;
  std::map<Int, long> exponents;
  Rat value() const;
};
Factorization exponent_vector(const Rat& x, const FactorOptions& opts = {});

// S-factored form of a nonzero rational: sign * prod p^e over S_f * num/den
// with num, den positive, coprime to S_f and to each other.
class SRational {
 public:
  static SRational from_rational(const Rat& x, const PlaceSet& s);

  int sign() const { return sign_; }
  const std::map<Int, long>& s_exponents() const { return exps_; }  // no zeros
  const Int& residual_num() const { return rnum_; }
  const Int& residual_den() const { return rden_; }
  Rat value() const;

 private:
  int sign_ = 1;
  std::map<Int, long> exps_;
  Int rnum_ = 1, rden_ = 1;
};

// Sup-norm height max |x_i| of a nonempty integer vector.
Int height(std::span<const Int> v);

// b^e for e >= 0.
Int pow_int(const Int& b, unsigned long e);

// b^e mod m for m >= 2; negative e uses the inverse (requires gcd(b,m)=1).
Int pow_mod(const Int& b, const Int& e, const Int& m);

// inverse of a mod m; domain_error when gcd(a,m) != 1.
Int mod_inverse(const Int& a, const Int& m);

// Exact sign of x - base^e for positive rationals x, base and rational e.
// Fast path bounds both sides by exact powers of two; the fallback clears
// the exponent denominator and compares integers.
int cmp_pow(const Rat& x, const Rat& base, const Rat& e);
inline bool le_pow(const Rat& x, const Rat& base, const Rat& e) { return cmp_pow(x, base, e) <= 0; }
inline bool ge_pow(const Rat& x, const Rat& base, const Rat& e) { return cmp_pow(x, base, e) >= 0; }

// floor(n^(1/d)) for n >= 0, d >= 1.
Int floor_root(const Int& n, unsigned long d);

// Exact comparison of log(g1)/log(h1) with log(g2)/log(h2) for g >= 1,
// h >= 2: -1, 0, +1. Used to order observed gcd exponents without floats.
// Walks the Stern-Brocot tree after a safe double prefilter; astronomically
// deep ties are reported as equal.
int cmp_log_ratio(const Int& g1, const Int& h1, const Int& g2, const Int& h2);

std::string rat_str(const Rat& x);  // "num/den", or "num" when den == 1

}  // namespace sunitlab
