#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sunitlab/arith.hpp"
#include "sunitlab/orbit.hpp"

namespace sunitlab {

struct Constants {
  Rat epsilon;
  long n_bound = 0;
  Rat alpha;
  bool cond1 = false;  // (N+1) eps > 2 N^2 alpha + 4
  bool cond2 = false;  // eps > 16 (N-1) alpha
  bool valid() const { return cond1 && cond2; }
};

// N = floor(32 / (7 eps)), alpha = 7 eps^2 / 512; conditions evaluated
// exactly and flagged, never silently accepted
Constants constants(const Rat& epsilon);
// user-supplied triple, same condition flags
Constants constants(const Rat& epsilon, long n_bound, const Rat& alpha);

struct GcdInstance {
  Int a1, b1, a2, b2;
  Int s1, t1, s2, t2;
  PlaceSet s;
  Int h;      // max(s1, t1, s2, t2)
  Int q_gcd;  // gcd(a1 s1 - b1 t1, a2 s2 - b2 t2); gcd(0, x) = |x|

  static GcdInstance make(const Int& a1, const Int& b1, const Int& a2,
                          const Int& b2, const Int& s1, const Int& t1,
                          const Int& s2, const Int& t2, const PlaceSet& s);

  Rat x1() const;  // a1 s1 / (b1 t1)
  Rat x2() const;  // a2 s2 / (b2 t2)
};

enum class VerdictTag {
  HypothesisFail,
  HSmall,          // (a)
  CoeffLarge,      // (b)
  MultDep,         // (c)
  BoundViolation,
};

std::string verdict_name(VerdictTag tag);

struct TrichotomyVerdict {
  VerdictTag tag = VerdictTag::HypothesisFail;
  std::string reason;                 // HypothesisFail only
  std::pair<long, long> witness{0, 0};  // MultDep only: x1^n1 = x2^n2
  Int signed_max, abs_max;            // coefficient maxima, always filled
};

// checks in order: gcd hypothesis, (a) H <= threshold, (b) |coeff| max
// >= H^alpha, (c) multiplicative dependence; BoundViolation otherwise
TrichotomyVerdict classify(const GcdInstance& inst, const Constants& c,
                           const Int& c_threshold);

// least witness of x1^n1 = x2^n2, |n1|,|n2| <= n_bound - 1, not both zero;
// ordered by |n1|+|n2|, then n1 descending, then n2 descending
std::optional<std::pair<long, long>> mult_dep_search(const Rat& x1,
                                                     const Rat& x2,
                                                     long n_bound);

// ascending S_f-smooth integers in [1, h_max]
std::vector<Int> smooth_up_to(const PlaceSet& s, const Int& h_max);

struct ScanRow {
  GcdInstance inst;
  TrichotomyVerdict verdict;
};

struct ScanSummary {
  unsigned long long considered = 0;  // octuples passing coprimality
  unsigned long long kept = 0;        // ... and the gcd hypothesis
  unsigned long long count_a = 0;
  unsigned long long count_b = 0;
  unsigned long long count_c = 0;
  unsigned long long count_violation = 0;
  // argmax of log Qgcd / log H over kept non-(c) rows with H >= 2
  bool has_max_eps = false;
  Int max_eps_qgcd, max_eps_h;
  double max_eps_display = 0.0;
};

ScanSummary theorem2_scan(const PlaceSet& s, const Rat& epsilon,
                          const Int& h_max, const Int& a_max,
                          const Int& c_threshold, unsigned jobs,
                          const std::function<void(const ScanRow&)>& sink);

struct GcdRecordRow {
  long n = 0;
  Int g;                 // gcd(a^n - 1, b^n - 1)
  bool record = false;   // strictly exceeds every earlier g
  bool has_stat = false; // n >= 3 and g >= 2
  double stat = 0.0;     // log log g / (log n / log log n)
};

void extremal_gcd_search(const Int& a, const Int& b, long n_max, unsigned jobs,
                         const std::function<void(const GcdRecordRow&)>& sink);

// shortest vector (a, b) of {(a, b) : a s = b mod Q}, sign-normalized;
// satisfies |a|, |b| <= ceil(sqrt(Q))
ExponentPair box_witness(const Int& q, const Int& s);

}  // namespace sunitlab
