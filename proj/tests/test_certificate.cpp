#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "sunitlab/certificate.hpp"
#include "sunitlab/gcdlab.hpp"

using namespace sunitlab;

namespace {

Rat rat_pow(const Rat& x, long e) {
  Rat base = x;
  unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
  if (e < 0) base = Rat(1) / x;
  Rat r = 1;
  for (unsigned long i = 0; i < k; ++i) r *= base;
  return r;
}

// form product straight from the definition, no shortcuts
Rat direct_t2_product(const std::vector<std::vector<Rat>>& e,
                      const MinIndexMap& idx, const PlaceSet& s) {
  Rat prod = 1;
  for (const auto& v : s.places()) {
    auto [i1, i2] = idx.at(v);
    for (size_t l1 = 0; l1 < e.size(); ++l1)
      for (size_t l2 = 0; l2 < e[l1].size(); ++l2) {
        if (static_cast<long>(l1) == i1 && static_cast<long>(l2) == i2)
          continue;
        prod *= v_abs(e[l1][l2] - e[i1][i2], v);
      }
  }
  return prod;
}

Rat direct_p4_product(const TildeMatrixP4& y, const FormSetsP4& sets,
                      const PlaceSet& s) {
  Rat prod = 1;
  for (const auto& v : s.places())
    for (const auto& [l1, l2] : sets.indices(v))
      prod *= v_abs(Rat(y.entries[l1][l2]), v);
  return prod;
}

const CheckRecord& check_named(const ProductReport& rep, const char* name) {
  for (const auto& ck : rep.checks)
    if (ck.name == name) return ck;
  REQUIRE(false);
  return rep.checks.front();
}

// x1^n1 = x2^n2 with n1 >= 1, n2 != 0, turned into the vanishing binomial
Poly2 binomial_curve(long n1, long n2) {
  long d2 = n2 > 0 ? n2 : -n2;
  std::vector<std::vector<Rat>> c(n1 + 1, std::vector<Rat>(d2 + 1, Rat(0)));
  if (n2 > 0) {
    c[n1][0] = 1;
    c[0][d2] = -1;
  } else {
    c[n1][d2] = 1;
    c[0][0] = -1;
  }
  return Poly2::from_coeffs(std::move(c));
}

}  // namespace

TEST_SUITE("certificate") {

TEST_CASE("lemma on integer differences") {
  auto s = PlaceSet::of_primes({2, 3});

  auto r = lemma_diff(16, 1, 5, s);
  CHECK(r.holds);
  CHECK(r.lhs == Rat(1, 16));
  CHECK(r.rhs == Rat(2, 5));

  // the modulus 2 sits inside S; the sides are still exact and compare true
  r = lemma_diff(3, 1, 2, s);
  CHECK(r.holds);
  CHECK(r.lhs == Rat(1, 3));
  CHECK(r.rhs == Rat(1));

  // without coprimality the bound can genuinely fail, and says so
  r = lemma_diff(pow_int(2, 10), pow_int(2, 11), pow_int(2, 10),
                 PlaceSet::of_primes({2}));
  CHECK(!r.holds);
  CHECK(r.lhs == Rat(1, 2));
  CHECK(r.rhs == Rat(1, 512));

  // each precondition on its own
  CHECK_THROWS_AS(lemma_diff(7, 7, 1, s), std::domain_error);
  CHECK_THROWS_AS(lemma_diff(0, 7, 7, s), std::domain_error);
  CHECK_THROWS_AS(lemma_diff(7, 0, 7, s), std::domain_error);
  CHECK_THROWS_AS(lemma_diff(7, 3, 0, s), std::domain_error);
  CHECK_THROWS_AS(lemma_diff(7, 3, 3, s), std::domain_error);  // 3 does not divide 4
}

TEST_CASE("lemma holds on random admissible triples") {
  std::mt19937_64 rng(20240517);
  std::uniform_int_distribution<long long> ydist(1, 1000000000000000LL);
  std::uniform_int_distribution<long long> qdist(1, 1000000000LL);
  std::uniform_int_distribution<long long> kdist(1, 1000000LL);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<PlaceSet> sets = {PlaceSet::of_primes({2, 3}),
                                PlaceSet::of_primes({2, 3, 5}),
                                PlaceSet::of_primes({5, 7})};
  for (int it = 0; it < 10000; ++it) {
    const auto& s = sets[it % sets.size()];
    Int y1 = Int(static_cast<long>(ydist(rng))) * (coin(rng) ? 1 : -1);
    Int qd = Int(static_cast<long>(qdist(rng))) * (coin(rng) ? 1 : -1);
    while (!s.coprime_to_finite(qd)) qd += 1;
    Int y2 = y1 - Int(static_cast<long>(kdist(rng))) * qd;
    if (y2 == 0 || y2 == y1) continue;
    auto r = lemma_diff(y1, y2, qd, s);
    CHECK(r.holds);
    if (!r.holds) return;  // one counterexample is enough noise
  }
}

TEST_CASE("stripping drops exactly the places dividing the gcd") {
  auto s = PlaceSet::of_primes({2, 3});
  // Qgcd = gcd(3, 15) = 3 shares the place 3
  auto inst = GcdInstance::make(1, 1, 1, 1, 4, 1, 16, 1, s);
  REQUIRE(inst.q_gcd == 3);
  auto stripped = strip_shared_places(inst);
  CHECK(stripped.s.finite_primes() == std::vector<Int>{2});
  CHECK(stripped.q_gcd == 3);
  CHECK(stripped.h == inst.h);

  // already coprime: unchanged
  auto coprime = GcdInstance::make(1, 1, 1, 1, 2, 1, 3, 1, s);
  REQUIRE(coprime.q_gcd == 1);
  CHECK(strip_shared_places(coprime).s.finite_primes() ==
        std::vector<Int>({2, 3}));

  auto both_equal = GcdInstance::make(1, 1, 1, 1, 1, 1, 1, 1, s);
  REQUIRE(both_equal.q_gcd == 0);
  CHECK_THROWS_AS(strip_shared_places(both_equal), std::domain_error);
}

TEST_CASE("tilde matrix for the gcd bound") {
  auto s = PlaceSet::of_primes({2, 3});

  auto y = build_tilde_t2(GcdInstance::make(1, 1, 1, 1, 2, 1, 3, 1, s), 2);
  CHECK(y.n == 2);
  CHECK(y.entries ==
        std::vector<std::vector<Rat>>{{Rat(1), Rat(3)}, {Rat(2), Rat(6)}});

  // Qgcd = 5: entries are fifths but differences stay integral
  y = build_tilde_t2(GcdInstance::make(1, 1, 1, 1, 16, 1, 81, 1, s), 2);
  CHECK(y.entries == std::vector<std::vector<Rat>>{{Rat(1, 5), Rat(81, 5)},
                                                   {Rat(16, 5), Rat(1296, 5)}});
  for (long a = 0; a < 2; ++a)
    for (long b = 0; b < 2; ++b)
      for (long c = 0; c < 2; ++c)
        for (long d = 0; d < 2; ++d) {
          Rat diff = y.entries[a][b] - y.entries[c][d];
          CHECK(diff.get_den() == 1);
        }

  CHECK_THROWS_AS(build_tilde_t2(y.inst, 0), std::domain_error);
  CHECK_THROWS_AS(
      build_tilde_t2(GcdInstance::make(1, 1, 1, 1, 1, 1, 1, 1, s), 3),
      DegenerateFormError);
}

TEST_CASE("tilde matrix entries and integrality on random instances") {
  std::mt19937_64 rng(911003);
  std::uniform_int_distribution<int> edist(0, 5);
  std::uniform_int_distribution<int> ndist(2, 6);
  std::uniform_int_distribution<int> cdist(-25, 25);
  auto s = PlaceSet::of_primes({2, 3});

  auto coeff = [&]() {
    for (;;) {
      int c = cdist(rng);
      if (c != 0 && c % 2 != 0 && c % 3 != 0) return Int(c);
    }
  };
  auto gcd_int = [](const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
  };

  int built = 0;
  while (built < 1000) {
    int e1 = edist(rng), f1 = edist(rng), e2 = edist(rng), f2 = edist(rng);
    Int s1 = pow_int(2, e1) * pow_int(3, f1);
    Int t1 = pow_int(2, e1 > 0 ? 0 : edist(rng)) *
             pow_int(3, f1 > 0 ? 0 : edist(rng));
    Int s2 = pow_int(2, e2) * pow_int(3, f2);
    Int t2 = pow_int(2, e2 > 0 ? 0 : edist(rng)) *
             pow_int(3, f2 > 0 ? 0 : edist(rng));
    Int a1 = coeff(), b1 = coeff(), a2 = coeff(), b2 = coeff();
    if (gcd_int(a1, b1) != 1 || gcd_int(a2, b2) != 1) continue;
    GcdInstance inst;
    try {
      inst = GcdInstance::make(a1, b1, a2, b2, s1, t1, s2, t2, s);
    } catch (const std::domain_error&) {
      continue;
    }
    if (inst.q_gcd == 0) continue;
    long n = ndist(rng);
    auto y = build_tilde_t2(inst, n);
    ++built;

    REQUIRE(y.entries.size() == static_cast<size_t>(n));
    Rat q{y.inst.q_gcd};
    std::uniform_int_distribution<long> pick(0, n - 1);
    long l1 = pick(rng), l2 = pick(rng);
    Rat want = rat_pow(Rat(a1) * s1, l1) * rat_pow(Rat(b1) * t1, n - 1 - l1) *
               rat_pow(Rat(a2) * s2, l2) * rat_pow(Rat(b2) * t2, n - 1 - l2) / q;
    CHECK(y.entries[l1][l2] == want);
    CHECK(y.entries[l1][l2] != 0);

    // every pairwise difference is an integer
    const Rat& base = y.entries[0][0];
    for (long u = 0; u < n; ++u)
      for (long w = 0; w < n; ++w) {
        Rat diff = y.entries[u][w] - base;
        CHECK(diff.get_den() == 1);
      }

    // the reported minimum really is one
    auto idx = minimal_indices(y.entries, y.inst.s);
    for (const auto& v : y.inst.s.places()) {
      auto [i1, i2] = idx.at(v);
      Rat m = v_abs(y.entries[i1][i2], v);
      for (long u = 0; u < n; ++u)
        for (long w = 0; w < n; ++w) CHECK(v_abs(y.entries[u][w], v) >= m);
    }
  }
}

TEST_CASE("minimal indices with lexicographic ties") {
  auto s = PlaceSet::of_primes({2, 3});
  auto y = build_tilde_t2(GcdInstance::make(1, 1, 1, 1, 2, 1, 3, 1, s), 2);
  auto idx = minimal_indices(y.entries, s);
  CHECK(idx.at(Place::infinity()) == IndexPair{0, 0});
  // |2|_2 = |6|_2 = 1/2: (1,0) beats (1,1)
  CHECK(idx.at(Place::finite(2)) == IndexPair{1, 0});
  // |3|_3 = |6|_3 = 1/3: (0,1) beats (1,1)
  CHECK(idx.at(Place::finite(3)) == IndexPair{0, 1});
}

TEST_CASE("form product bound, worked two by two matrix") {
  auto s = PlaceSet::of_primes({2, 3});
  auto y = build_tilde_t2(GcdInstance::make(1, 1, 1, 1, 2, 1, 3, 1, s), 2);
  auto idx = minimal_indices(y.entries, s);
  auto c = constants(Rat(1, 2), 2, Rat(1, 8));
  auto rep = form_product_t2(y, idx, s, c);

  // (|3-1| |2-1| |6-1|) * (|1-2|_2 |3-2|_2 |6-2|_2) * (|1-3|_3 |2-3|_3 |6-3|_3)
  //   = 10 * 1/4 * 1/3
  CHECK(rep.product == Rat(5, 6));
  CHECK(rep.product == direct_t2_product(y.entries, idx, s));

  REQUIRE(rep.checks.size() == 5);
  CHECK(rep.checks[0].name == "quotient");
  CHECK(rep.checks[1].name == "numerator");
  CHECK(rep.checks[2].name == "denominator");
  CHECK(rep.checks[3].name == "product-small");
  CHECK(rep.checks[4].name == "height");

  const auto& quot = check_named(rep, "quotient");
  CHECK(quot.status == CheckStatus::Pass);
  CHECK(quot.lhs == Rat(5, 6));
  // 2^(n^2-1) * num / den = 8 * 1 / (1/6)
  CHECK(quot.rhs_base == Rat(48));
  CHECK(quot.rhs_exp == Rat(1));

  const auto& num = check_named(rep, "numerator");
  CHECK(num.status == CheckStatus::Pass);
  CHECK(num.lhs == Rat(1));
  CHECK(num.rhs_base == Rat(3));
  CHECK(num.rhs_exp == Rat(1));  // 2 (n-1) n^2 alpha = 8/8

  // den * Qgcd * (s1 t1 s2 t2)^(n-1) = 1/6 * 1 * 6: an exact boundary
  const auto& den = check_named(rep, "denominator");
  CHECK(den.status == CheckStatus::Pass);
  CHECK(den.lhs == Rat(1));
  CHECK(den.rhs_base == Rat(1));

  // Qgcd = 1 fails the gcd hypothesis and is below 2
  CHECK(check_named(rep, "product-small").status ==
        CheckStatus::NotApplicable);
  CHECK(check_named(rep, "height").status == CheckStatus::NotApplicable);
  CHECK(!rep.any_fail());
}

TEST_CASE("form product bound with every gate open") {
  // Qgcd = 2^18 + 1 beats H = 2^18 exactly, and with eps = 1 the two-power
  // gate 2^15 <= H^(27/32) = 2^15.1875 scrapes through
  auto s = PlaceSet::of_primes({2});
  Int big = pow_int(2, 18);
  auto inst = GcdInstance::make(1, -1, 1, -1, big, 1, big, 1, s);
  REQUIRE(inst.q_gcd == big + 1);

  auto c = constants(Rat(1));
  REQUIRE(c.n_bound == 4);
  auto y = build_tilde_t2(inst, 4);
  auto idx = minimal_indices(y.entries, s);
  CHECK(idx.at(Place::infinity()) == IndexPair{0, 0});
  CHECK(idx.at(Place::finite(2)) == IndexPair{3, 3});

  auto rep = form_product_t2(y, idx, s, c);
  for (const auto& ck : rep.checks) {
    CAPTURE(ck.name);
    CHECK(ck.status == CheckStatus::Pass);
  }
  CHECK(rep.product == direct_t2_product(y.entries, idx, s));

  // the dyadic share alone is 2^-756: sum of 18 (l1+l2) over the grid
  // minus the minimizing cell
  Rat dyadic = 1;
  auto [i1, i2] = idx.at(Place::finite(2));
  for (long l1 = 0; l1 < 4; ++l1)
    for (long l2 = 0; l2 < 4; ++l2) {
      if (l1 == i1 && l2 == i2) continue;
      dyadic *= v_abs(y.entries[l1][l2] - y.entries[i1][i2],
                      Place::finite(2));
    }
  CHECK(dyadic == Rat(Int(1), pow_int(2, 756)));
}

TEST_CASE("degenerate forms are named, not zeroed") {
  auto s = PlaceSet::of_primes({2, 3});
  // x1 = 1 collapses the rows; Qgcd = 80 strips the place 2
  auto inst = GcdInstance::make(1, 1, 1, 1, 1, 1, 81, 1, s);
  auto y = build_tilde_t2(inst, 2);
  CHECK(y.inst.s.finite_primes() == std::vector<Int>{3});
  auto idx = minimal_indices(y.entries, y.inst.s);
  auto c = constants(Rat(1, 2), 2, Rat(1, 8));
  CHECK_THROWS_AS(form_product_t2(y, idx, y.inst.s, c), DegenerateFormError);
  try {
    form_product_t2(y, idx, y.inst.s, c);
  } catch (const DegenerateFormError& e) {
    CHECK(std::string(e.what()).find("(1,1)") != std::string::npos);
    CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
  }
}

TEST_CASE("certificate pipeline for single instances") {
  auto s = PlaceSet::of_primes({2, 3});
  auto c = constants(Rat(1));

  auto cert =
      certify_instance(GcdInstance::make(1, -1, 1, -1, pow_int(2, 18), 1,
                                         pow_int(2, 18), 1,
                                         PlaceSet::of_primes({2})),
                       c);
  CHECK(!cert.degenerate);
  CHECK(cert.note.empty());
  REQUIRE(cert.checks.size() == 5);
  for (const auto& ck : cert.checks) CHECK(ck.status == CheckStatus::Pass);
  CHECK(cert.product > 0);

  // x1 = 1: every certificate field goes through the degenerate branch
  auto deg = certify_instance(GcdInstance::make(1, 1, 1, 1, 1, 1, 81, 1, s), c);
  CHECK(deg.degenerate);
  CHECK(!deg.note.empty());
  REQUIRE(deg.checks.size() == 5);
  for (const auto& ck : deg.checks)
    CHECK(ck.status == CheckStatus::Degenerate);

  // x1 = x2 = 1 degenerates at the build step already
  auto flat = certify_instance(GcdInstance::make(1, 1, 1, 1, 1, 1, 1, 1, s), c);
  CHECK(flat.degenerate);
}

TEST_CASE("certificates across a scan never fail a check") {
  auto s = PlaceSet::of_primes({2, 3});
  auto c = constants(Rat(1, 3));
  std::vector<ScanRow> rows;
  theorem2_scan(s, Rat(1, 3), 32, 1, 1, 2,
                [&](const ScanRow& r) { rows.push_back(r); });
  REQUIRE(!rows.empty());

  size_t degenerate = 0, passing = 0;
  for (const auto& row : rows) {
    auto cert = certify_instance(row.inst, c);
    if (cert.degenerate) {
      ++degenerate;
      // a collapsed form means two grid cells share a value, which is a
      // multiplicative relation within the same exponent box
      CHECK(mult_dep_search(row.inst.x1(), row.inst.x2(), c.n_bound)
                .has_value());
      continue;
    }
    ++passing;
    for (const auto& ck : cert.checks) {
      CAPTURE(ck.name);
      CHECK(ck.status != CheckStatus::Fail);
    }
    CHECK(check_named({cert.product, cert.checks}, "quotient").status ==
          CheckStatus::Pass);
    CHECK(check_named({cert.product, cert.checks}, "denominator").status ==
          CheckStatus::Pass);
    if (cert.inst.q_gcd >= 2)
      CHECK(check_named({cert.product, cert.checks}, "height").status ==
            CheckStatus::Pass);
  }
  CHECK(degenerate > 0);
  CHECK(passing > 0);
}

TEST_CASE("window forms read off the polynomial") {
  // x1 x2 - 1
  auto p = Poly2::from_coeffs({{Rat(-1), Rat(0)}, {Rat(0), Rat(1)}});
  CHECK(p.d1() == 1);
  CHECK(p.d2() == 1);
  CHECK(p.eval(Rat(2), Rat(1, 2)) == 0);
  CHECK(p.eval(Rat(2), Rat(2)) == Rat(3));
  auto forms = psi_forms(p);
  REQUIRE(forms.size() == 1);
  CHECK(forms[0][0][0] == Rat(-1));
  CHECK(forms[0][1][1] == Rat(1));
  CHECK(forms[0][0][1] == Rat(0));
  CHECK(forms[0][1][0] == Rat(0));

  // x1 - x2
  auto q = Poly2::from_coeffs({{Rat(0), Rat(-1)}, {Rat(1), Rat(0)}});
  auto qf = psi_forms(q);
  REQUIRE(qf.size() == 1);
  CHECK(qf[0][1][0] == Rat(1));
  CHECK(qf[0][0][1] == Rat(-1));

  // x1^3 x2^3 - x1 x2^2 - x2 - 494: nine forms on a 6 x 6 grid, each a
  // shifted copy of the coefficients
  auto r = Poly2::from_coeffs({{Rat(-494), Rat(-1), Rat(0), Rat(0)},
                               {Rat(0), Rat(0), Rat(-1), Rat(0)},
                               {Rat(0), Rat(0), Rat(0), Rat(0)},
                               {Rat(0), Rat(0), Rat(0), Rat(1)}});
  CHECK(r.d1() == 3);
  CHECK(r.d2() == 3);
  auto rf = psi_forms(r);
  REQUIRE(rf.size() == 9);
  for (long m1 = 0; m1 < 3; ++m1)
    for (long m2 = 0; m2 < 3; ++m2) {
      const auto& f = rf[m1 * 3 + m2];
      REQUIRE(f.size() == 6);
      REQUIRE(f[0].size() == 6);
      CHECK(f[0 + m1][0 + m2] == Rat(-494));
      CHECK(f[0 + m1][1 + m2] == Rat(-1));
      CHECK(f[1 + m1][2 + m2] == Rat(-1));
      CHECK(f[3 + m1][3 + m2] == Rat(1));
    }

  // high zero rows and columns are trimmed
  auto t = Poly2::from_coeffs(
      {{Rat(1), Rat(1), Rat(0)}, {Rat(0), Rat(0), Rat(0)}});
  CHECK(t.d1() == 0);
  CHECK(t.d2() == 1);
  CHECK(t.coeff(5, 5) == Rat(0));

  // degree zero in a variable has no window forms
  auto lin = Poly2::from_coeffs({{Rat(-2)}, {Rat(1)}});
  CHECK_THROWS_AS(psi_forms(lin), std::domain_error);
  CHECK_THROWS_AS(Poly2::from_coeffs({{Rat(0), Rat(0)}}), std::domain_error);
  CHECK_THROWS_AS(Poly2::from_coeffs({}), std::domain_error);
}

TEST_CASE("curve instances pin the corner coefficients") {
  auto s2 = PlaceSet::of_primes({2});
  auto hyper = Poly2::from_coeffs({{Rat(-1), Rat(0)}, {Rat(0), Rat(1)}});

  // (2, 1/2) on x1 x2 = 1
  auto inst = GcdInstance::make(1, 1, 1, 1, 2, 1, 1, 2, s2);
  auto ci = CurveInstance::make(hyper, inst);
  CHECK(ci.i == 0);
  CHECK(ci.k == 1);

  auto line = Poly2::from_coeffs({{Rat(-1), Rat(1)}, {Rat(1), Rat(0)}});
  auto li = CurveInstance::make(
      line, GcdInstance::make(1, 1, -1, 1, 4, 1, 3, 1, PlaceSet::of_primes({2, 3})));
  CHECK(li.i == 0);
  CHECK(li.k == 0);

  // off the curve
  CHECK_THROWS_AS(
      CurveInstance::make(hyper, GcdInstance::make(1, 1, 1, 1, 2, 1, 2, 1, s2)),
      std::domain_error);

  // x2 (x1 + 1) vanishes at x1 = -1 but has an empty j2 = 0 edge
  auto edge = Poly2::from_coeffs({{Rat(0), Rat(1)}, {Rat(0), Rat(1)}});
  CHECK_THROWS_AS(
      CurveInstance::make(edge,
                          GcdInstance::make(-1, 1, 1, 1, 1, 1, 2, 1, s2)),
      std::domain_error);

  // x1 (x2 + 1): empty j1 = 0 edge
  auto edge1 = Poly2::from_coeffs({{Rat(0), Rat(0)}, {Rat(1), Rat(1)}});
  CHECK_THROWS_AS(
      CurveInstance::make(edge1,
                          GcdInstance::make(1, 1, -1, 1, 2, 1, 1, 1, s2)),
      std::domain_error);

  // degree zero in x2
  auto lin = Poly2::from_coeffs({{Rat(-2)}, {Rat(1)}});
  CHECK_THROWS_AS(
      CurveInstance::make(lin, GcdInstance::make(1, 1, 1, 1, 2, 1, 3, 1,
                                                 PlaceSet::of_primes({2, 3}))),
      std::domain_error);
}

TEST_CASE("tilde matrix on a curve") {
  auto s2 = PlaceSet::of_primes({2});
  auto hyper = Poly2::from_coeffs({{Rat(-1), Rat(0)}, {Rat(0), Rat(1)}});
  auto ci = CurveInstance::make(
      hyper, GcdInstance::make(1, 1, 1, 1, 2, 1, 1, 2, s2));
  auto y = build_tilde_p4(ci);
  CHECK(y.d1 == 1);
  CHECK(y.d2 == 1);
  CHECK(y.entries ==
        std::vector<std::vector<Int>>{{Int(2), Int(1)}, {Int(4), Int(2)}});

  // x1 = x2 at (3, 3): the form y_{1,0} - y_{0,1} vanishes on the matrix
  auto diag = Poly2::from_coeffs({{Rat(0), Rat(-1)}, {Rat(1), Rat(0)}});
  auto di = CurveInstance::make(
      diag, GcdInstance::make(1, 1, 1, 1, 3, 1, 3, 1, PlaceSet::of_primes({3})));
  auto dy = build_tilde_p4(di);
  CHECK(dy.entries ==
        std::vector<std::vector<Int>>{{Int(1), Int(3)}, {Int(3), Int(9)}});

  // swapping in an off-curve point breaks the vanishing
  auto forged = di;
  forged.inst = GcdInstance::make(1, 1, 1, 1, 9, 1, 3, 1, PlaceSet::of_primes({3}));
  CHECK_THROWS_AS(build_tilde_p4(forged), std::domain_error);
}

TEST_CASE("coordinate patterns span the dual on every tested curve") {
  // degrees (1,1), (1,2), (2,3), (3,3)
  verify_coordinate_bases(
      Poly2::from_coeffs({{Rat(-1), Rat(0)}, {Rat(0), Rat(1)}}));
  verify_coordinate_bases(
      Poly2::from_coeffs({{Rat(0), Rat(-1)}, {Rat(1), Rat(0)}}));
  verify_coordinate_bases(
      Poly2::from_coeffs({{Rat(-1), Rat(1)}, {Rat(1), Rat(0)}}));
  verify_coordinate_bases(
      Poly2::from_coeffs({{Rat(0), Rat(0), Rat(-1)}, {Rat(1), Rat(0), Rat(0)}}));
  verify_coordinate_bases(Poly2::from_coeffs(
      {{Rat(0), Rat(0), Rat(0), Rat(-2)},
       {Rat(0), Rat(0), Rat(0), Rat(0)},
       {Rat(1), Rat(0), Rat(0), Rat(0)}}));
  verify_coordinate_bases(
      Poly2::from_coeffs({{Rat(-494), Rat(-1), Rat(0), Rat(0)},
                          {Rat(0), Rat(0), Rat(-1), Rat(0)},
                          {Rat(0), Rat(0), Rat(0), Rat(0)},
                          {Rat(0), Rat(0), Rat(0), Rat(1)}}));
}

TEST_CASE("form sets split the rectangle") {
  auto s23 = PlaceSet::of_primes({2, 3});
  auto line = Poly2::from_coeffs({{Rat(-1), Rat(1)}, {Rat(1), Rat(0)}});
  auto ci = CurveInstance::make(
      line, GcdInstance::make(1, 1, -1, 1, 4, 1, 3, 1, s23));
  auto y = build_tilde_p4(ci);
  CHECK(y.entries ==
        std::vector<std::vector<Int>>{{Int(1), Int(-3)}, {Int(4), Int(-12)}});

  auto sets = form_sets_p4(ci, y, ci.inst.s);
  CHECK(sets.set_b == std::vector<IndexPair>{{0, 0}});
  CHECK(sets.set_a == std::vector<IndexPair>({{0, 1}, {1, 1}}));
  // |y_{1,0}|_2 = 1/4 < 1 = |y_{0,0}|_2, the other places keep the high block
  REQUIRE(sets.drop_high.size() == 3);
  CHECK(sets.drop_high[0] == std::pair<Place, bool>(Place::finite(2), false));
  CHECK(sets.drop_high[1] == std::pair<Place, bool>(Place::finite(3), true));
  CHECK(sets.drop_high[2] == std::pair<Place, bool>(Place::infinity(), true));
  CHECK(sets.indices(Place::finite(2)) ==
        std::vector<IndexPair>({{0, 1}, {1, 0}, {1, 1}}));
  CHECK(sets.indices(Place::infinity()) ==
        std::vector<IndexPair>({{0, 0}, {0, 1}, {1, 1}}));

  // x1 = x2^2 at (16, 4): the dropped blocks shift by (1, -2)
  auto par = Poly2::from_coeffs({{Rat(0), Rat(0), Rat(-1)}, {Rat(1), Rat(0), Rat(0)}});
  auto pi = CurveInstance::make(
      par, GcdInstance::make(1, 1, 1, 1, 16, 1, 4, 1, PlaceSet::of_primes({2})));
  CHECK(pi.i == 2);
  CHECK(pi.k == 0);
  auto py = build_tilde_p4(pi);
  auto ps = form_sets_p4(pi, py, pi.inst.s);
  CHECK(ps.set_b == std::vector<IndexPair>({{0, 2}, {0, 3}}));
  CHECK(ps.set_a ==
        std::vector<IndexPair>({{0, 0}, {0, 1}, {1, 2}, {1, 3}}));
}

TEST_CASE("selection ties pick the high block") {
  // on x1 x2 = 1 at (2, 1/2) the pair entries are equal everywhere
  auto s2 = PlaceSet::of_primes({2});
  auto hyper = Poly2::from_coeffs({{Rat(-1), Rat(0)}, {Rat(0), Rat(1)}});
  auto ci = CurveInstance::make(
      hyper, GcdInstance::make(1, 1, 1, 1, 2, 1, 1, 2, s2));
  auto y = build_tilde_p4(ci);
  auto sets = form_sets_p4(ci, y, ci.inst.s);
  for (const auto& [v, high] : sets.drop_high) CHECK(high);
}

TEST_CASE("product bound on a curve, worked line") {
  auto s23 = PlaceSet::of_primes({2, 3});
  auto line = Poly2::from_coeffs({{Rat(-1), Rat(1)}, {Rat(1), Rat(0)}});
  auto ci = CurveInstance::make(
      line, GcdInstance::make(1, 1, -1, 1, 4, 1, 3, 1, s23));
  auto y = build_tilde_p4(ci);
  auto sets = form_sets_p4(ci, y, ci.inst.s);
  auto c = constants(Rat(1, 2), 5, Rat(1, 8));
  auto rep = product_bound_p4(ci, y, sets, ci.inst.s, c);

  // (1/4 * 1/4) * (1/3 * 1/3) * (1 * 3 * 12), dropping per place
  CHECK(rep.product == Rat(1, 4));
  CHECK(rep.product == direct_p4_product(y, sets, ci.inst.s));

  REQUIRE(rep.checks.size() == 4);
  CHECK(rep.checks[0].name == "lemma-product");
  CHECK(rep.checks[1].name == "entry-product");
  CHECK(rep.checks[2].name == "product-small");
  CHECK(rep.checks[3].name == "height");

  const auto& lem = check_named(rep, "lemma-product");
  CHECK(lem.status == CheckStatus::Pass);
  CHECK(lem.lhs == Rat(1, 4));
  CHECK(lem.rhs_base == Rat(2));  // (2/1)^1 * full product 1
  CHECK(lem.rhs_exp == Rat(1));

  const auto& ent = check_named(rep, "entry-product");
  CHECK(ent.status == CheckStatus::Pass);
  CHECK(ent.lhs == Rat(1));
  CHECK(ent.rhs_base == Rat(4));
  CHECK(ent.rhs_exp == Rat(1, 4));  // (2 d1 + 2 d2 - 2) alpha

  CHECK(check_named(rep, "product-small").status ==
        CheckStatus::NotApplicable);

  const auto& ht = check_named(rep, "height");
  CHECK(ht.status == CheckStatus::Pass);
  CHECK(ht.lhs == Rat(12));
  CHECK(ht.rhs_base == Rat(4));
  CHECK(ht.rhs_exp == Rat(9, 4));  // (2 d1 + 2 d2 - 2)(1 + alpha)
}

TEST_CASE("equal pair entries are harmless when the gcd is one") {
  auto s2 = PlaceSet::of_primes({2});
  auto hyper = Poly2::from_coeffs({{Rat(-1), Rat(0)}, {Rat(0), Rat(1)}});
  auto ci = CurveInstance::make(
      hyper, GcdInstance::make(1, 1, 1, 1, 2, 1, 1, 2, s2));
  auto y = build_tilde_p4(ci);
  auto sets = form_sets_p4(ci, y, ci.inst.s);
  auto c = constants(Rat(1, 2), 5, Rat(1, 8));
  auto rep = product_bound_p4(ci, y, sets, ci.inst.s, c);
  CHECK(rep.product == Rat(1));
  CHECK(!rep.any_fail());
  CHECK(check_named(rep, "lemma-product").status == CheckStatus::Pass);
}

TEST_CASE("dependent points raise the dependence error") {
  // x1 = x2 at (3, 3), Qgcd = 2
  auto diag = Poly2::from_coeffs({{Rat(0), Rat(-1)}, {Rat(1), Rat(0)}});
  auto di = CurveInstance::make(
      diag, GcdInstance::make(1, 1, 1, 1, 3, 1, 3, 1, PlaceSet::of_primes({3})));
  auto dy = build_tilde_p4(di);
  auto ds = form_sets_p4(di, dy, di.inst.s);
  auto c = constants(Rat(1, 2), 5, Rat(1, 8));
  CHECK_THROWS_AS(product_bound_p4(di, dy, ds, di.inst.s, c), DependenceError);

  // x1 = x2^2 at (16, 4), Qgcd = 3
  auto par = Poly2::from_coeffs({{Rat(0), Rat(0), Rat(-1)}, {Rat(1), Rat(0), Rat(0)}});
  auto pi = CurveInstance::make(
      par, GcdInstance::make(1, 1, 1, 1, 16, 1, 4, 1, PlaceSet::of_primes({2})));
  auto py = build_tilde_p4(pi);
  auto ps = form_sets_p4(pi, py, pi.inst.s);
  CHECK_THROWS_AS(product_bound_p4(pi, py, ps, pi.inst.s, c), DependenceError);
}

TEST_CASE("product bound with every gate open") {
  // x1 x2 - x1 - x2 - 3824 through (256, 16): Qgcd = 15 >= 256^(1/3) and
  // 2 <= 256^delta with 2 delta = 1/3 - 8 alpha
  auto s2 = PlaceSet::of_primes({2});
  auto p = Poly2::from_coeffs({{Rat(-3824), Rat(-1)}, {Rat(-1), Rat(1)}});
  auto inst = GcdInstance::make(1, 1, 1, 1, 256, 1, 16, 1, s2);
  REQUIRE(inst.q_gcd == 15);
  auto ci = CurveInstance::make(p, inst);
  CHECK(ci.i == 0);
  CHECK(ci.k == 1);
  auto y = build_tilde_p4(ci);
  CHECK(y.entries == std::vector<std::vector<Int>>{{Int(1), Int(16)},
                                                   {Int(256), Int(4096)}});
  auto sets = form_sets_p4(ci, y, ci.inst.s);
  auto c = constants(Rat(1, 3));
  auto rep = product_bound_p4(ci, y, sets, ci.inst.s, c);
  CHECK(rep.product == Rat(1, 4096));
  for (const auto& ck : rep.checks) {
    CAPTURE(ck.name);
    CHECK(ck.status == CheckStatus::Pass);
  }
}

TEST_CASE("dependence duality against the trichotomy") {
  auto s23 = PlaceSet::of_primes({2, 3});
  auto c = constants(Rat(1, 2));
  std::vector<ScanRow> rows;
  theorem2_scan(s23, Rat(1, 2), 36, 1, 1, 2,
                [&](const ScanRow& r) { rows.push_back(r); });
  REQUIRE(!rows.empty());

  size_t dependent_raised = 0, independent_clean = 0, small_gate_open = 0;
  for (const auto& row : rows) {
    if (row.verdict.tag == VerdictTag::MultDep) {
      auto [n1, n2] = row.verdict.witness;
      // n1 = 0 or n2 = 0 witnesses have no curve of positive bidegree
      if (n1 < 1 || n2 == 0) continue;
      auto ci = CurveInstance::make(binomial_curve(n1, n2), row.inst);
      CHECK(ci.i - ci.k == n2);
      auto y = build_tilde_p4(ci);
      auto sets = form_sets_p4(ci, y, ci.inst.s);
      CHECK_THROWS_AS(product_bound_p4(ci, y, sets, ci.inst.s, c),
                      DependenceError);
      ++dependent_raised;
    } else {
      Rat x1 = row.inst.x1(), x2 = row.inst.x2();
      if (x1 == 1 || x2 == 1 || x1 * x2 == 1) continue;
      // hyperbola x1 x2 - x1 - x2 + c0 through the point; its pair relation
      // is x1 x2 = 1, which the filter above rules out
      Rat c0 = x1 + x2 - x1 * x2;
      auto p = Poly2::from_coeffs({{c0, Rat(-1)}, {Rat(-1), Rat(1)}});
      auto ci = CurveInstance::make(p, row.inst);
      auto y = build_tilde_p4(ci);
      auto sets = form_sets_p4(ci, y, ci.inst.s);
      auto rep = product_bound_p4(ci, y, sets, ci.inst.s, c);
      CHECK(!rep.any_fail());
      if (check_named(rep, "product-small").status == CheckStatus::Pass)
        ++small_gate_open;
      ++independent_clean;
    }
  }
  CHECK(dependent_raised > 0);
  CHECK(independent_clean > 0);
  CHECK(small_gate_open > 0);
}

}  // TEST_SUITE
