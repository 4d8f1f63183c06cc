#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sunitlab/arith.hpp"
#include "sunitlab/gcdlab.hpp"

namespace sunitlab {

// A form value that must be nonzero vanished; message names the colliding
// entries and the place.
class DegenerateFormError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// x1^d1 == x2^(i-k) with Qgcd >= 2; the instance belongs to verdict (c).
class DependenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class CheckStatus { Pass, Fail, NotApplicable, Degenerate };
std::string check_status_name(CheckStatus s);

// One verified inequality. The compared sides are exact: lhs against
// rhs_base^rhs_exp (rhs_exp = 1 for plain rational bounds). Every check is
// an upper bound on lhs except "denominator", which is a lower bound.
struct CheckRecord {
  std::string name;
  CheckStatus status = CheckStatus::NotApplicable;
  Rat lhs;
  Rat rhs_base;
  Rat rhs_exp;
};

std::string check_rhs_str(const CheckRecord& r);  // "b/c" or "b/c^n/d"

struct ProductReport {
  Rat product;  // exact value of the full form product
  std::vector<CheckRecord> checks;
  bool any_fail() const;
};

using IndexPair = std::pair<long, long>;

// Drops the finite places of inst.s that divide Qgcd and rebuilds the
// instance. Legal because such a prime can never divide s1 t1 s2 t2.
GcdInstance strip_shared_places(const GcdInstance& inst);

// entries[l1][l2] = a1^l1 s1^l1 b1^(n-1-l1) t1^(n-1-l1) a2^l2 s2^l2
//                   b2^(n-1-l2) t2^(n-1-l2) / Qgcd
// with every pairwise difference an integer.
struct TildeMatrixT2 {
  long n = 0;
  GcdInstance inst;  // shared S-primes already stripped
  std::vector<std::vector<Rat>> entries;
};

// Strips shared places itself; domain_error when Qgcd = 0 or n < 1, and on
// an integrality failure (possible only for an instance built by hand).
TildeMatrixT2 build_tilde_t2(const GcdInstance& inst, long n);

// For each place the entry index minimizing |entry|_v, ties broken by the
// lexicographically least (l1, l2).
using MinIndexMap = std::map<Place, IndexPair>;

MinIndexMap minimal_indices(const std::vector<std::vector<Rat>>& entries,
                            const PlaceSet& s);

// The form product prod over v in S, (l1,l2) != idx(v) of
// |entry - entry_idx(v)|_v, plus the bound chain. Checks, in order:
//   quotient      product <= 2^(n^2-1) * num / den where num multiplies
//                 |entry|_v over all entries and places, den multiplies
//                 |entry at idx(v)|_v over places
//   numerator     num * Qgcd^(n^2) <= H^(2(n-1) n^2 alpha)     [coeff gate]
//   denominator   den * Qgcd * (s1 t1 s2 t2)^(n-1) >= 1
//   product-small product <= H^(-delta),
//                 2 delta = (n^2-1) eps - 2(n-1) n^2 alpha - 4(n-1)
//                 [hypothesis + coeff + 2^(n^2-1) <= H^delta gates]
//   height        sup height of the integer differences against idx(inf)
//                 <= H^(2(1+alpha)(n-1))        [coeff gate and Qgcd >= 2]
// Gates: hypothesis = Qgcd >= H^eps, coeff = max |a|,|b| <= H^alpha.
// Throws DegenerateFormError when some entry equals the entry at idx(v).
// Requires y.n == c.n_bound.
ProductReport form_product_t2(const TildeMatrixT2& y, const MinIndexMap& idx,
                              const PlaceSet& s, const Constants& c);

// Full pipeline for one instance: strip, build with n = c.n_bound, pick
// minimal indices, run the checks. A degenerate form is reported in-band:
// every check carries status Degenerate and note names the collision.
struct InstanceCertificate {
  GcdInstance inst;  // stripped
  bool degenerate = false;
  std::string note;
  Rat product;
  std::vector<CheckRecord> checks;
};

InstanceCertificate certify_instance(const GcdInstance& inst,
                                     const Constants& c);

// Dense bivariate polynomial over Q; coeff(j1, j2) multiplies x1^j1 x2^j2.
// Construction trims zero high rows and columns, so d1() and d2() are the
// true degrees.
class Poly2 {
 public:
  static Poly2 from_coeffs(std::vector<std::vector<Rat>> c);

  long d1() const { return static_cast<long>(c_.size()) - 1; }
  long d2() const { return static_cast<long>(c_[0].size()) - 1; }
  const Rat& coeff(long j1, long j2) const;  // zero outside the stored box
  Rat eval(const Rat& x1, const Rat& x2) const;

 private:
  Poly2() = default;
  std::vector<std::vector<Rat>> c_;
};

// Window forms of p on the 2d1 x 2d2 grid: forms[m1*d2+m2][l1][l2] is the
// coefficient of y_{l1,l2} in sum_j coeff(j1,j2) y_{j1+m1, j2+m2}, for
// 0 <= m1 < d1, 0 <= m2 < d2. Rejects degree zero in either variable.
std::vector<std::vector<std::vector<Rat>>> psi_forms(const Poly2& p);

// Rank check used by form_sets_p4: the window forms together with the
// coordinates of either pattern must span the full dual of the 2d1 x 2d2
// grid space. InternalError on a deficiency.
void verify_coordinate_bases(const Poly2& p);

// A point of the curve p = 0 with S-unit coordinate data. make computes
// i = least j2 with coeff(0, j2) != 0 and k = greatest j2 with
// coeff(d1, j2) != 0, strips shared S-primes, and validates: both degrees
// >= 1, a nonzero coefficient on each edge of the coefficient box, and
// p(x1, x2) = 0 exactly. Irreducibility of p is the caller's contract.
struct CurveInstance {
  Poly2 p;
  GcdInstance inst;
  long i = 0;
  long k = 0;

  static CurveInstance make(Poly2 p, const GcdInstance& inst);
};

// entries[l1][l2] = a1^l1 s1^l1 b1^(2d1-1-l1) t1^(2d1-1-l1) a2^l2 s2^l2
//                   b2^(2d2-1-l2) t2^(2d2-1-l2), an integer matrix on which
// every window form vanishes.
struct TildeMatrixP4 {
  long d1 = 0, d2 = 0;
  GcdInstance inst;
  std::vector<std::vector<Int>> entries;
};

// domain_error when some window form fails to vanish (off-curve input).
TildeMatrixP4 build_tilde_p4(const CurveInstance& ci);

// Per-place choice between the two 3 d1 d2 coordinate patterns:
//   drop-high = rectangle minus {d1..2d1-1} x {k..k+d2-1}
//   drop-low  = rectangle minus {0..d1-1} x {i..i+d2-1}
// drop-high is chosen when |y_{d1,k}|_v >= |y_{0,i}|_v. set_a is their
// intersection, set_b = drop-high minus drop-low; the rectangle is the
// disjoint union of set_a, set_b and set_b shifted by (d1, k-i). Both
// patterns are verified to induce a coordinate basis of the window-form
// kernel's dual (InternalError otherwise).
struct FormSetsP4 {
  long d1 = 0, d2 = 0, i = 0, k = 0;
  std::vector<std::pair<Place, bool>> drop_high;
  std::vector<IndexPair> set_a, set_b;  // sorted

  std::vector<IndexPair> indices(const Place& v) const;  // selected pattern
};

FormSetsP4 form_sets_p4(const CurveInstance& ci, const TildeMatrixP4& y,
                        const PlaceSet& s);

// prod over v in S of min(|y1|_v, |y2|_v) <= (2/|qd|) prod |y1 y2|_v.
// Preconditions (each reported individually): y1, y2, qd nonzero, y1 != y2,
// qd | y1 - y2. The bound is guaranteed only for qd coprime to the finite
// places of s; a shared prime is not rejected, the verdict just records
// whichever way the comparison lands.
struct LemmaDiffResult {
  bool holds = false;
  Rat lhs, rhs;
};

LemmaDiffResult lemma_diff(const Int& y1, const Int& y2, const Int& qd,
                           const PlaceSet& s);

// The selected-form product prod over v of prod over (l1,l2) in L_v of
// |y_{l1,l2}|_v, equal to the set_a product times the set_b min-product,
// plus the bound chain. Checks, in order:
//   lemma-product product <= (2/Qgcd)^|B| * prod of all |entry|_v
//   entry-product max over entries of prod_v |entry|_v
//                 <= H^((2d1+2d2-2) alpha)                      [coeff gate]
//   product-small product <= H^(-delta d1 d2),
//                 2 delta = eps - 8 (d1+d2-1) alpha
//                 [hypothesis + coeff + 2 <= H^delta gates]
//   height        sup height of the coordinates selected at infinity
//                 <= H^((2d1+2d2-2)(1+alpha))                   [coeff gate]
// Throws DependenceError when x1^d1 = x2^(i-k) and Qgcd >= 2 (the set_b
// pairs collide; verdict (c) holds). With Qgcd = 1 collisions are harmless
// and the bounds hold regardless. Each distinct set_b pair is also pushed
// through lemma_diff; a failure there is an InternalError. Requires
// d1, d2 <= c.n_bound - 1.
ProductReport product_bound_p4(const CurveInstance& ci,
                               const TildeMatrixP4& y, const FormSetsP4& sets,
                               const PlaceSet& s, const Constants& c);

}  // namespace sunitlab
