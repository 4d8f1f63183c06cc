#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sunitlab/arith.hpp"

namespace sunitlab {

struct ExponentPair {
  Int m, n;

  bool operator==(const ExponentPair& o) const { return m == o.m && n == o.n; }
  bool operator<(const ExponentPair& o) const {
    int c = cmp(m, o.m);
    if (c != 0) return c < 0;
    return n < o.n;
  }
};

struct OrbitParams {
  Int p, q, modulus;
  Rat beta;
  long k_bound = 1;
  // floor(modulus^beta), the half-width of the lift window
  Int window;

  static OrbitParams make(const Int& p, const Int& q, const Int& modulus,
                          const Rat& beta, long k_bound);
};

// residues mod Q with a lift in [-W, W] coprime to pq, ascending
std::vector<Int> b_set(const OrbitParams& params);

struct CanonicalRep {
  Int a_prime;
  Int m_prime, n_prime;
};

// strip p- and q-factors from a windowed lift of a; see uniqueness_check
// for when the result is independent of the chosen lift
CanonicalRep canonical_rep(const Int& a, const OrbitParams& params);

// exhaustively confirms canonical representatives are unique (beta < 1/3)
bool uniqueness_check(const OrbitParams& params);

struct ReturnRecord {
  ExponentPair pair;
  Int a, b;

  bool operator==(const ReturnRecord& o) const {
    return pair == o.pair && a == o.a && b == o.b;
  }
  bool operator<(const ReturnRecord& o) const {
    if (!(pair == o.pair)) return pair < o.pair;
    int c = cmp(a, o.a);
    if (c != 0) return c < 0;
    return b < o.b;
  }
};

// all (m,n,a,b) with p^m q^n a = b mod Q, a,b in B, p^|m| <= Q^K,
// q^|n| <= Q^K; sorted
std::vector<ReturnRecord> return_set(const OrbitParams& params);

struct CollinearResult {
  bool collinear = false;
  // valid when collinear and the set has >= 2 points: anchor is the least
  // point, direction is primitive with first nonzero coordinate positive
  ExponentPair anchor{0, 0};
  ExponentPair direction{0, 0};
};

CollinearResult is_collinear(const std::vector<ExponentPair>& points);

struct Theorem1Row {
  Int modulus;
  std::size_t b_size = 0;
  std::size_t return_size = 0;  // (m,n,a,b) records
  std::size_t pair_count = 0;   // distinct (m,n)
  bool empty_b = false;
  CollinearResult line;
};

// rows for every Q in [q_lo, q_hi] coprime to pq, ascending; returns the
// count of skipped (non-coprime) moduli
std::size_t theorem1_scan(const Int& p, const Int& q, long k_bound,
                          const Rat& beta, const Int& q_lo, const Int& q_hi,
                          unsigned jobs,
                          const std::function<void(const Theorem1Row&)>& sink);

}  // namespace sunitlab
