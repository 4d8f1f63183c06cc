#pragma once

#include <functional>
#include <vector>

#include "sunitlab/arith.hpp"
#include "sunitlab/orbit.hpp"

namespace sunitlab {

// least k >= 1 with x^k = 1 mod modulus
Int mult_order(const Int& x, const Int& modulus);

// {(m,n) : p^m q^n = 1 mod Q} as a row-HNF basis
// [[row0.m, row0.n], [0, row1.n]] with row0.m > 0, 0 <= row0.n < row1.n
struct RelationLattice {
  Int p, q, modulus;
  ExponentPair row0, row1;
  Int det;
};

RelationLattice relation_lattice(const Int& p, const Int& q, const Int& modulus);

// |<p,q>| in (Z/QZ)* by direct closure enumeration
Int subgroup_order_enumerated(const Int& p, const Int& q, const Int& modulus);

// same quantity via the lattice determinant, cross-checked against the
// enumeration; InternalError on disagreement
Int ord_q(const Int& p, const Int& q, const Int& modulus);

struct MinimaPair {
  Int lambda1, lambda2;
  ExponentPair v1, v2;
};

// successive sup-norm minima of the lattice spanned by u, v; attaining
// vectors are sign-normalized (first nonzero coordinate positive) and
// lexicographically least among attainers
MinimaPair sup_minima(ExponentPair u, ExponentPair v);

MinimaPair gauss_reduce(const RelationLattice& lat);

// in-place Lagrange reduction in the Euclidean norm; ends with |u|2 <= |v|2
// and |<u,v>| <= |u|2^2 / 2, so u attains the Euclidean minimum
void lagrange_reduce(ExponentPair& u, ExponentPair& v);

// all lattice vectors of sup-norm exactly `norm`, sign-normalized, sorted
std::vector<ExponentPair> vectors_of_sup_norm(ExponentPair u, ExponentPair v,
                                              const Int& norm);

// every sup-norm-shortest vector (m,n) satisfies p^|m| q^|n| >= Q
bool lambda1_lower_bound_check(const RelationLattice& lat);

struct OrderTraceRow {
  RelationLattice lat;
  MinimaPair minima;
  bool minkowski_ok = false;  // det/2 <= lambda1*lambda2 <= det
  double ratio = 0.0;         // ord / (log Q)^2, display only
  bool in_tail = false;       // modulus >= q0
  double running_min = 0.0;   // min ratio over tail rows so far
};

// rows for every Q in [2, q_max] coprime to pq, ascending
void corollary_trace(const Int& p, const Int& q, const Int& q_max,
                     const Int& q0, unsigned jobs,
                     const std::function<void(const OrderTraceRow&)>& sink);

}  // namespace sunitlab
