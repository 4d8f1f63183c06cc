#include "sunitlab/certificate.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace sunitlab {

namespace {

const char* kT2CheckNames[5] = {"quotient", "numerator", "denominator",
                                "product-small", "height"};

Rat rat_pow(const Rat& x, long e) {
  Rat base = x;
  unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
  if (e < 0) base = Rat(1) / x;
  Rat r = 1;
  for (unsigned long i = 0; i < k; ++i) r *= base;
  return r;
}

Int mod_floor(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

std::string cell(long l1, long l2) {
  return "(" + std::to_string(l1) + "," + std::to_string(l2) + ")";
}

// least nonzero column in row 0 and greatest nonzero column in row d1;
// rejects polynomials divisible by x1 or x2
std::pair<long, long> corner_indices(const Poly2& p) {
  long d1 = p.d1(), d2 = p.d2();
  bool row0 = false, col0 = false;
  for (long j2 = 0; j2 <= d2; ++j2) row0 = row0 || p.coeff(0, j2) != 0;
  for (long j1 = 0; j1 <= d1; ++j1) col0 = col0 || p.coeff(j1, 0) != 0;
  if (!row0)
    throw std::domain_error("x1 divides the polynomial: the j1 = 0 edge is empty");
  if (!col0)
    throw std::domain_error("x2 divides the polynomial: the j2 = 0 edge is empty");
  long i = 0;
  while (p.coeff(0, i) == 0) ++i;
  long k = d2;
  while (k >= 0 && p.coeff(d1, k) == 0) --k;
  if (k < 0) throw InternalError("top row empty after trimming");
  return {i, k};
}

// the 2d1 x 2d2 rectangle minus {d1..2d1-1} x {col..col+d2-1} (high) or
// minus {0..d1-1} x {col..col+d2-1} (low), in lexicographic order
std::vector<IndexPair> pattern_indices(long d1, long d2, long col, bool high) {
  std::vector<IndexPair> out;
  out.reserve(3 * d1 * d2);
  for (long l1 = 0; l1 < 2 * d1; ++l1)
    for (long l2 = 0; l2 < 2 * d2; ++l2) {
      bool in_rows = high ? l1 >= d1 : l1 < d1;
      if (in_rows && l2 >= col && l2 < col + d2) continue;
      out.emplace_back(l1, l2);
    }
  return out;
}

long rank_of(std::vector<std::vector<Rat>> m) {
  long rows = static_cast<long>(m.size());
  long cols = rows ? static_cast<long>(m[0].size()) : 0;
  long r = 0;
  for (long col = 0; col < cols && r < rows; ++col) {
    long piv = -1;
    for (long i = r; i < rows; ++i)
      if (m[i][col] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[r], m[piv]);
    for (long i = r + 1; i < rows; ++i) {
      if (m[i][col] == 0) continue;
      Rat f = m[i][col] / m[r][col];
      for (long j = col; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return r;
}

}  // namespace

std::string check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not-applicable";
    case CheckStatus::Degenerate: return "degenerate";
  }
  throw InternalError("unknown check status");
}

std::string check_rhs_str(const CheckRecord& r) {
  if (r.rhs_exp == 1) return rat_str(r.rhs_base);
  return rat_str(r.rhs_base) + "^" + rat_str(r.rhs_exp);
}

bool ProductReport::any_fail() const {
  for (const auto& ck : checks)
    if (ck.status == CheckStatus::Fail) return true;
  return false;
}

GcdInstance strip_shared_places(const GcdInstance& inst) {
  if (inst.q_gcd == 0)
    throw std::domain_error("cannot reduce places for a vanishing gcd");
  std::vector<Int> drop;
  for (const Int& p : inst.s.finite_primes())
    if (mod_floor(inst.q_gcd, p) == 0) drop.push_back(p);
  if (drop.empty()) return inst;
  return GcdInstance::make(inst.a1, inst.b1, inst.a2, inst.b2, inst.s1,
                           inst.t1, inst.s2, inst.t2, inst.s.without(drop));
}

TildeMatrixT2 build_tilde_t2(const GcdInstance& inst0, long n) {
  if (n < 1) throw std::domain_error("the matrix needs at least one row");
  if (inst0.q_gcd == 0)
    throw DegenerateFormError(
        "a1 s1 = b1 t1 and a2 s2 = b2 t2: every entry difference vanishes");
  TildeMatrixT2 y;
  y.n = n;
  y.inst = strip_shared_places(inst0);
  const GcdInstance& inst = y.inst;
  const Int& q = inst.q_gcd;

  Int u1 = inst.a1 * inst.s1, w1 = inst.b1 * inst.t1;
  Int u2 = inst.a2 * inst.s2, w2 = inst.b2 * inst.t2;
  std::vector<Int> pu1(n), pw1(n), pu2(n), pw2(n);
  pu1[0] = pw1[0] = pu2[0] = pw2[0] = 1;
  for (long l = 1; l < n; ++l) {
    pu1[l] = pu1[l - 1] * u1;
    pw1[l] = pw1[l - 1] * w1;
    pu2[l] = pu2[l - 1] * u2;
    pw2[l] = pw2[l - 1] * w2;
  }

  y.entries.assign(n, std::vector<Rat>(n));
  Int residue;
  bool first = true;
  for (long l1 = 0; l1 < n; ++l1)
    for (long l2 = 0; l2 < n; ++l2) {
      Int m = pu1[l1] * pw1[n - 1 - l1] * pu2[l2] * pw2[n - 1 - l2];
      Int r = mod_floor(m, q);
      if (first) {
        residue = r;
        first = false;
      } else if (r != residue) {
        throw std::domain_error(
            "entry differences are not integral: the congruences of the "
            "instance are violated");
      }
      Rat e(m, q);
      e.canonicalize();
      y.entries[l1][l2] = std::move(e);
    }
  return y;
}

MinIndexMap minimal_indices(const std::vector<std::vector<Rat>>& entries,
                            const PlaceSet& s) {
  if (entries.empty()) throw std::domain_error("empty matrix");
  size_t cols = entries[0].size();
  if (cols == 0) throw std::domain_error("empty matrix");
  for (const auto& row : entries) {
    if (row.size() != cols) throw std::domain_error("ragged matrix");
    for (const auto& e : row)
      if (e == 0) throw std::domain_error("zero entry has no valuation rank");
  }

  MinIndexMap idx;
  for (const auto& v : s.places()) {
    IndexPair best{0, 0};
    Rat bestval = v_abs(entries[0][0], v);
    for (size_t l1 = 0; l1 < entries.size(); ++l1)
      for (size_t l2 = 0; l2 < cols; ++l2) {
        Rat a = v_abs(entries[l1][l2], v);
        if (a < bestval) {
          bestval = std::move(a);
          best = {static_cast<long>(l1), static_cast<long>(l2)};
        }
      }
    idx[v] = best;
  }
  return idx;
}

ProductReport form_product_t2(const TildeMatrixT2& y, const MinIndexMap& idx,
                              const PlaceSet& s, const Constants& c) {
  long n = y.n;
  if (n != c.n_bound)
    throw std::domain_error("matrix size does not match the constants");
  if (y.entries.size() != static_cast<size_t>(n))
    throw std::domain_error("matrix size field disagrees with the entries");
  for (const auto& row : y.entries)
    if (row.size() != static_cast<size_t>(n))
      throw std::domain_error("ragged matrix");
  for (const auto& v : s.places()) {
    auto it = idx.find(v);
    if (it == idx.end())
      throw std::domain_error("no minimal index for place " + v.str());
    auto [i1, i2] = it->second;
    if (i1 < 0 || i1 >= n || i2 < 0 || i2 >= n)
      throw std::domain_error("minimal index out of range");
  }

  const GcdInstance& inst = y.inst;
  const Int& q = inst.q_gcd;
  Rat product = 1, num = 1, den = 1;
  for (const auto& v : s.places()) {
    auto [i1, i2] = idx.at(v);
    const Rat& base = y.entries[i1][i2];
    den *= v_abs(base, v);
    for (long l1 = 0; l1 < n; ++l1)
      for (long l2 = 0; l2 < n; ++l2) {
        num *= v_abs(y.entries[l1][l2], v);
        if (l1 == i1 && l2 == i2) continue;
        Rat d = y.entries[l1][l2] - base;
        if (d == 0)
          throw DegenerateFormError("entry " + cell(l1, l2) +
                                    " equals entry " + cell(i1, i2) +
                                    " at place " + v.str());
        product *= v_abs(d, v);
      }
  }

  Rat hr{inst.h};
  Int cmax = abs(inst.a1);
  cmax = std::max(cmax, Int(abs(inst.b1)));
  cmax = std::max(cmax, Int(abs(inst.a2)));
  cmax = std::max(cmax, Int(abs(inst.b2)));
  bool hyp = ge_pow(Rat(q), hr, c.epsilon);
  bool coeff = le_pow(Rat(cmax), hr, c.alpha);
  Rat nn{n};
  Rat delta =
      ((nn * n - 1) * c.epsilon - 2 * (nn - 1) * n * n * c.alpha - 4 * (n - 1)) /
      2;
  bool twop = le_pow(Rat(pow_int(2, static_cast<unsigned long>(n) * n - 1)),
                     hr, delta);

  ProductReport rep;
  rep.product = product;
  auto push = [&rep](const char* name, bool applicable, Rat lhs, Rat base,
                     Rat exp, bool lower_bound) {
    CheckRecord ck;
    ck.name = name;
    ck.lhs = std::move(lhs);
    ck.rhs_base = std::move(base);
    ck.rhs_exp = std::move(exp);
    if (!applicable) {
      ck.status = CheckStatus::NotApplicable;
    } else {
      int cv = cmp_pow(ck.lhs, ck.rhs_base, ck.rhs_exp);
      ck.status = (lower_bound ? cv >= 0 : cv <= 0) ? CheckStatus::Pass
                                                    : CheckStatus::Fail;
    }
    rep.checks.push_back(std::move(ck));
  };

  push("quotient", true, product,
       Rat(pow_int(2, static_cast<unsigned long>(n) * n - 1)) * num / den,
       Rat(1), false);
  push("numerator", coeff,
       num * Rat(pow_int(q, static_cast<unsigned long>(n) * n)), hr,
       2 * (nn - 1) * n * n * c.alpha, false);
  push("denominator", true,
       den * q * pow_int(inst.s1 * inst.t1 * inst.s2 * inst.t2,
                         static_cast<unsigned long>(n) - 1),
       Rat(1), Rat(1), true);
  push("product-small", hyp && coeff && twop, product, hr, -delta, false);

  Rat hexp = 2 * (1 + c.alpha) * (n - 1);
  Rat hlhs = 0;
  if (n >= 2) {
    auto [i1, i2] = idx.at(Place::infinity());
    const Rat& base = y.entries[i1][i2];
    std::vector<Int> imgs;
    for (long l1 = 0; l1 < n; ++l1)
      for (long l2 = 0; l2 < n; ++l2) {
        if (l1 == i1 && l2 == i2) continue;
        Rat d = y.entries[l1][l2] - base;
        if (d.get_den() != 1)
          throw InternalError("non-integral image of the infinite form");
        imgs.push_back(d.get_num());
      }
    hlhs = Rat(height(imgs));
  }
  push("height", coeff && q >= 2 && n >= 2, hlhs, hr, hexp, false);
  return rep;
}

InstanceCertificate certify_instance(const GcdInstance& inst,
                                     const Constants& c) {
  InstanceCertificate out;
  out.inst = inst.q_gcd != 0 ? strip_shared_places(inst) : inst;
  try {
    auto y = build_tilde_t2(out.inst, c.n_bound);
    auto idx = minimal_indices(y.entries, y.inst.s);
    auto rep = form_product_t2(y, idx, y.inst.s, c);
    out.product = std::move(rep.product);
    out.checks = std::move(rep.checks);
  } catch (const DegenerateFormError& e) {
    out.degenerate = true;
    out.note = e.what();
    out.product = 0;
    out.checks.clear();
    for (const char* name : kT2CheckNames) {
      CheckRecord ck;
      ck.name = name;
      ck.status = CheckStatus::Degenerate;
      out.checks.push_back(std::move(ck));
    }
  }
  return out;
}

Poly2 Poly2::from_coeffs(std::vector<std::vector<Rat>> c) {
  if (c.empty() || c[0].empty())
    throw std::domain_error("empty coefficient table");
  size_t cols = c[0].size();
  for (const auto& row : c)
    if (row.size() != cols) throw std::domain_error("ragged coefficient table");

  auto row_zero = [](const std::vector<Rat>& row) {
    return std::all_of(row.begin(), row.end(),
                       [](const Rat& x) { return x == 0; });
  };
  while (c.size() > 1 && row_zero(c.back())) c.pop_back();
  auto col_zero = [&c](size_t j) {
    return std::all_of(c.begin(), c.end(),
                       [j](const std::vector<Rat>& row) { return row[j] == 0; });
  };
  while (cols > 1 && col_zero(cols - 1)) {
    --cols;
    for (auto& row : c) row.pop_back();
  }
  if (c.size() == 1 && cols == 1 && c[0][0] == 0)
    throw std::domain_error("the zero polynomial has no degree");

  Poly2 p;
  p.c_ = std::move(c);
  return p;
}

const Rat& Poly2::coeff(long j1, long j2) const {
  static const Rat kZero{0};
  if (j1 < 0 || j2 < 0 || j1 >= static_cast<long>(c_.size()) ||
      j2 >= static_cast<long>(c_[0].size()))
    return kZero;
  return c_[j1][j2];
}

Rat Poly2::eval(const Rat& x1, const Rat& x2) const {
  Rat total = 0, p1 = 1;
  for (const auto& row : c_) {
    Rat sum = 0, p2 = 1;
    for (const auto& cj : row) {
      if (cj != 0) sum += cj * p2;
      p2 *= x2;
    }
    total += sum * p1;
    p1 *= x1;
  }
  return total;
}

std::vector<std::vector<std::vector<Rat>>> psi_forms(const Poly2& p) {
  long d1 = p.d1(), d2 = p.d2();
  if (d1 < 1 || d2 < 1)
    throw std::domain_error("degree zero in a variable: no window forms");
  std::vector<std::vector<std::vector<Rat>>> forms(
      d1 * d2,
      std::vector<std::vector<Rat>>(2 * d1, std::vector<Rat>(2 * d2, Rat(0))));
  for (long m1 = 0; m1 < d1; ++m1)
    for (long m2 = 0; m2 < d2; ++m2) {
      auto& f = forms[m1 * d2 + m2];
      for (long j1 = 0; j1 <= d1; ++j1)
        for (long j2 = 0; j2 <= d2; ++j2) f[j1 + m1][j2 + m2] = p.coeff(j1, j2);
    }
  return forms;
}

void verify_coordinate_bases(const Poly2& p) {
  long d1 = p.d1(), d2 = p.d2();
  auto forms = psi_forms(p);
  auto [i, k] = corner_indices(p);
  long dim = 4 * d1 * d2;
  for (int high = 0; high < 2; ++high) {
    std::vector<std::vector<Rat>> m;
    m.reserve(d1 * d2 + 3 * d1 * d2);
    for (const auto& f : forms) {
      std::vector<Rat> row;
      row.reserve(dim);
      for (const auto& frow : f) row.insert(row.end(), frow.begin(), frow.end());
      m.push_back(std::move(row));
    }
    for (auto [l1, l2] : pattern_indices(d1, d2, high ? k : i, high != 0)) {
      std::vector<Rat> row(dim, Rat(0));
      row[l1 * 2 * d2 + l2] = 1;
      m.push_back(std::move(row));
    }
    if (rank_of(std::move(m)) != dim)
      throw InternalError(
          "a coordinate pattern fails to span the window-form dual");
  }
}

CurveInstance CurveInstance::make(Poly2 p, const GcdInstance& inst0) {
  long d1 = p.d1(), d2 = p.d2();
  if (d1 < 1 || d2 < 1)
    throw std::domain_error(
        "the curve must have positive degree in both variables");
  auto [i, k] = corner_indices(p);
  GcdInstance inst = strip_shared_places(inst0);
  if (p.eval(inst.x1(), inst.x2()) != 0)
    throw std::domain_error("the point does not lie on the curve");
  return CurveInstance{std::move(p), std::move(inst), i, k};
}

TildeMatrixP4 build_tilde_p4(const CurveInstance& ci) {
  long d1 = ci.p.d1(), d2 = ci.p.d2();
  const GcdInstance& inst = ci.inst;
  Int u1 = inst.a1 * inst.s1, w1 = inst.b1 * inst.t1;
  Int u2 = inst.a2 * inst.s2, w2 = inst.b2 * inst.t2;
  std::vector<Int> pu1(2 * d1), pw1(2 * d1), pu2(2 * d2), pw2(2 * d2);
  pu1[0] = pw1[0] = pu2[0] = pw2[0] = 1;
  for (long l = 1; l < 2 * d1; ++l) {
    pu1[l] = pu1[l - 1] * u1;
    pw1[l] = pw1[l - 1] * w1;
  }
  for (long l = 1; l < 2 * d2; ++l) {
    pu2[l] = pu2[l - 1] * u2;
    pw2[l] = pw2[l - 1] * w2;
  }

  TildeMatrixP4 y;
  y.d1 = d1;
  y.d2 = d2;
  y.inst = inst;
  y.entries.assign(2 * d1, std::vector<Int>(2 * d2));
  for (long l1 = 0; l1 < 2 * d1; ++l1)
    for (long l2 = 0; l2 < 2 * d2; ++l2)
      y.entries[l1][l2] =
          pu1[l1] * pw1[2 * d1 - 1 - l1] * pu2[l2] * pw2[2 * d2 - 1 - l2];

  for (long m1 = 0; m1 < d1; ++m1)
    for (long m2 = 0; m2 < d2; ++m2) {
      Rat sum = 0;
      for (long j1 = 0; j1 <= d1; ++j1)
        for (long j2 = 0; j2 <= d2; ++j2) {
          const Rat& cj = ci.p.coeff(j1, j2);
          if (cj != 0) sum += cj * y.entries[j1 + m1][j2 + m2];
        }
      if (sum != 0)
        throw std::domain_error(
            "a window form does not vanish on the matrix: the point is off "
            "the curve");
    }
  return y;
}

std::vector<IndexPair> FormSetsP4::indices(const Place& v) const {
  for (const auto& [place, high] : drop_high)
    if (!(place < v) && !(v < place))
      return pattern_indices(d1, d2, high ? k : i, high);
  throw std::domain_error("place not covered by the selection");
}

FormSetsP4 form_sets_p4(const CurveInstance& ci, const TildeMatrixP4& y,
                        const PlaceSet& s) {
  long d1 = ci.p.d1(), d2 = ci.p.d2();
  if (y.d1 != d1 || y.d2 != d2 ||
      y.entries.size() != static_cast<size_t>(2 * d1))
    throw std::domain_error("matrix does not match the curve");
  for (const auto& row : y.entries)
    if (row.size() != static_cast<size_t>(2 * d2))
      throw std::domain_error("matrix does not match the curve");
  verify_coordinate_bases(ci.p);

  FormSetsP4 sets;
  sets.d1 = d1;
  sets.d2 = d2;
  sets.i = ci.i;
  sets.k = ci.k;

  auto f1 = pattern_indices(d1, d2, ci.k, true);
  auto f2 = pattern_indices(d1, d2, ci.i, false);
  if (f1.size() != static_cast<size_t>(3 * d1 * d2) || f2.size() != f1.size())
    throw InternalError("pattern size is off");
  std::set_intersection(f1.begin(), f1.end(), f2.begin(), f2.end(),
                        std::back_inserter(sets.set_a));
  std::set_difference(f1.begin(), f1.end(), f2.begin(), f2.end(),
                      std::back_inserter(sets.set_b));

  // the rectangle must be set_a + set_b + set_b shifted by (d1, k - i)
  std::vector<IndexPair> all = sets.set_a;
  for (auto [l1, l2] : sets.set_b) {
    all.emplace_back(l1, l2);
    all.emplace_back(l1 + d1, l2 + ci.k - ci.i);
  }
  std::sort(all.begin(), all.end());
  std::vector<IndexPair> rect;
  for (long l1 = 0; l1 < 2 * d1; ++l1)
    for (long l2 = 0; l2 < 2 * d2; ++l2) rect.emplace_back(l1, l2);
  if (all != rect)
    throw InternalError("the translated block decomposition failed");

  const Int& hi = y.entries[d1][ci.k];
  const Int& lo = y.entries[0][ci.i];
  for (const auto& v : s.places())
    sets.drop_high.emplace_back(v, v_abs(Rat(hi), v) >= v_abs(Rat(lo), v));
  return sets;
}

LemmaDiffResult lemma_diff(const Int& y1, const Int& y2, const Int& qd,
                           const PlaceSet& s) {
  if (y1 == 0 || y2 == 0)
    throw std::domain_error("the compared integers must be nonzero");
  if (qd == 0) throw std::domain_error("the modulus must be nonzero");
  if (y1 == y2) throw std::domain_error("the compared integers must differ");
  if (mod_floor(y1 - y2, qd) != 0)
    throw std::domain_error("the modulus does not divide the difference");

  LemmaDiffResult r;
  r.lhs = 1;
  for (const auto& v : s.places())
    r.lhs *= std::min(v_abs(Rat(y1), v), v_abs(Rat(y2), v));
  r.rhs = Rat(2) / Rat(abs(qd)) * s_product(Rat(y1) * Rat(y2), s);
  r.holds = r.lhs <= r.rhs;
  return r;
}

ProductReport product_bound_p4(const CurveInstance& ci,
                               const TildeMatrixP4& y, const FormSetsP4& sets,
                               const PlaceSet& s, const Constants& c) {
  long d1 = sets.d1, d2 = sets.d2;
  if (ci.p.d1() != d1 || ci.p.d2() != d2 || y.d1 != d1 || y.d2 != d2)
    throw std::domain_error("curve, matrix and form sets disagree");
  if (d1 > c.n_bound - 1 || d2 > c.n_bound - 1)
    throw std::domain_error("curve degrees exceed the exponent box");
  const GcdInstance& inst = y.inst;
  const Int& q = inst.q_gcd;

  if (rat_pow(inst.x1(), d1) == rat_pow(inst.x2(), ci.i - ci.k) && q >= 2)
    throw DependenceError("x1^" + std::to_string(d1) + " = x2^" +
                          std::to_string(ci.i - ci.k) +
                          ": the translated pairs coincide");

  long shift2 = ci.k - ci.i;
  Rat product = 1;
  for (const auto& v : s.places()) {
    for (auto [l1, l2] : sets.set_a) product *= v_abs(Rat(y.entries[l1][l2]), v);
    for (auto [l1, l2] : sets.set_b)
      product *= std::min(v_abs(Rat(y.entries[l1][l2]), v),
                          v_abs(Rat(y.entries[l1 + d1][l2 + shift2]), v));
  }
  Rat direct = 1;
  for (const auto& v : s.places())
    for (auto [l1, l2] : sets.indices(v))
      direct *= v_abs(Rat(y.entries[l1][l2]), v);
  if (direct != product)
    throw InternalError("selected products disagree with the min split");

  for (auto [l1, l2] : sets.set_b) {
    const Int& p1 = y.entries[l1][l2];
    const Int& p2 = y.entries[l1 + d1][l2 + shift2];
    if (p1 == p2) continue;  // only possible with Qgcd = 1, bound is free
    auto lr = lemma_diff(p1, p2, q, s);
    if (!lr.holds) throw InternalError("pair bound failed on a congruent pair");
  }

  Rat prodprod = 1, permax = 0;
  for (long l1 = 0; l1 < 2 * d1; ++l1)
    for (long l2 = 0; l2 < 2 * d2; ++l2) {
      Rat pe = 1;
      for (const auto& v : s.places()) pe *= v_abs(Rat(y.entries[l1][l2]), v);
      prodprod *= pe;
      permax = std::max(permax, pe);
    }

  Rat hr{inst.h};
  Int cmax = abs(inst.a1);
  cmax = std::max(cmax, Int(abs(inst.b1)));
  cmax = std::max(cmax, Int(abs(inst.a2)));
  cmax = std::max(cmax, Int(abs(inst.b2)));
  bool hyp = ge_pow(Rat(q), hr, c.epsilon);
  bool coeff = le_pow(Rat(cmax), hr, c.alpha);
  Rat delta = (c.epsilon - 8 * (Rat(d1) + d2 - 1) * c.alpha) / 2;
  bool twop = le_pow(Rat(2), hr, delta);

  ProductReport rep;
  rep.product = product;
  auto push = [&rep](const char* name, bool applicable, Rat lhs, Rat base,
                     Rat exp) {
    CheckRecord ck;
    ck.name = name;
    ck.lhs = std::move(lhs);
    ck.rhs_base = std::move(base);
    ck.rhs_exp = std::move(exp);
    if (!applicable)
      ck.status = CheckStatus::NotApplicable;
    else
      ck.status = cmp_pow(ck.lhs, ck.rhs_base, ck.rhs_exp) <= 0
                      ? CheckStatus::Pass
                      : CheckStatus::Fail;
    rep.checks.push_back(std::move(ck));
  };

  push("lemma-product", true, product,
       rat_pow(Rat(2) / q, static_cast<long>(sets.set_b.size())) * prodprod,
       Rat(1));
  push("entry-product", coeff, permax, hr, (2 * Rat(d1) + 2 * d2 - 2) * c.alpha);
  push("product-small", hyp && coeff && twop, product, hr, -delta * d1 * d2);

  std::vector<Int> sel;
  for (auto [l1, l2] : sets.indices(Place::infinity()))
    sel.push_back(y.entries[l1][l2]);
  push("height", coeff, Rat(height(sel)), hr,
       (2 * Rat(d1) + 2 * d2 - 2) * (1 + c.alpha));
  return rep;
}

}  // namespace sunitlab
