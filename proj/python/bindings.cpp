// Python bindings for the main operations. Integers cross the boundary as
// python ints, rationals as fractions.Fraction; both exact via decimal
// strings, never through doubles.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "sunitlab/arith.hpp"
#include "sunitlab/certificate.hpp"
#include "sunitlab/gcdlab.hpp"
#include "sunitlab/lattice.hpp"
#include "sunitlab/orbit.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace sunitlab;

namespace pybind11::detail {

template <>
struct type_caster<mpz_class> {
  PYBIND11_TYPE_CASTER(mpz_class, const_name("int"));

  bool load(handle src, bool) {
    if (!PyLong_Check(src.ptr()) && !PyIndex_Check(src.ptr())) return false;
    PyObject* n = PyNumber_Long(src.ptr());
    if (!n) {
      PyErr_Clear();
      return false;
    }
    PyObject* s = PyObject_Str(n);
    Py_DECREF(n);
    if (!s) {
      PyErr_Clear();
      return false;
    }
    const char* text = PyUnicode_AsUTF8(s);
    bool ok = text && mpz_set_str(value.get_mpz_t(), text, 10) == 0;
    Py_DECREF(s);
    return ok;
  }

  static handle cast(const mpz_class& v, return_value_policy, handle) {
    return PyLong_FromString(v.get_str().c_str(), nullptr, 10);
  }
};

template <>
struct type_caster<mpq_class> {
  PYBIND11_TYPE_CASTER(mpq_class, const_name("Fraction"));

  bool load(handle src, bool) {
    if (PyFloat_Check(src.ptr())) return false;
    if (!hasattr(src, "numerator") || !hasattr(src, "denominator")) return false;
    make_caster<mpz_class> num, den;
    if (!num.load(src.attr("numerator"), false)) return false;
    if (!den.load(src.attr("denominator"), false)) return false;
    mpz_class d = cast_op<mpz_class>(den);
    if (d == 0) return false;
    value = mpq_class(cast_op<mpz_class>(num), d);
    value.canonicalize();
    return true;
  }

  static handle cast(const mpq_class& v, return_value_policy, handle) {
    object fraction = module_::import("fractions").attr("Fraction");
    return fraction(v.get_str()).release();
  }
};

}  // namespace pybind11::detail

namespace {

py::tuple pair_tuple(const ExponentPair& p) { return py::make_tuple(p.m, p.n); }

PlaceSet place_set(const std::vector<Int>& primes) {
  return PlaceSet::of_primes(primes);
}

py::dict constants_dict(const Constants& c) {
  return py::dict("epsilon"_a = c.epsilon, "n"_a = c.n_bound, "alpha"_a = c.alpha,
                  "cond1"_a = c.cond1, "cond2"_a = c.cond2);
}

GcdInstance instance_of(const Int& a1, const Int& b1, const Int& a2, const Int& b2,
                        const Int& s1, const Int& t1, const Int& s2, const Int& t2,
                        const std::vector<Int>& primes) {
  return GcdInstance::make(a1, b1, a2, b2, s1, t1, s2, t2, place_set(primes));
}

py::list check_list(const std::vector<CheckRecord>& checks) {
  py::list out;
  for (const CheckRecord& ck : checks)
    out.append(py::dict("name"_a = ck.name, "status"_a = check_status_name(ck.status),
                        "lhs"_a = ck.lhs, "rhs_base"_a = ck.rhs_base,
                        "rhs_exp"_a = ck.rhs_exp));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact S-unit scans, lattices, and gcd certificates";

  py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

  m.def(
      "constants", [](const Rat& epsilon) { return constants_dict(constants(epsilon)); },
      py::arg("epsilon"), "N and alpha for a given epsilon, with condition flags");
  m.def(
      "constants",
      [](const Rat& epsilon, long n, const Rat& alpha) {
        return constants_dict(constants(epsilon, n, alpha));
      },
      py::arg("epsilon"), py::arg("n"), py::arg("alpha"));

  m.def(
      "relation_lattice",
      [](const Int& p, const Int& q, const Int& modulus) {
        RelationLattice lat = relation_lattice(p, q, modulus);
        return py::dict(
            "Q"_a = lat.modulus,
            "hnf"_a = py::make_tuple(pair_tuple(lat.row0), pair_tuple(lat.row1)),
            "det"_a = lat.det);
      },
      py::arg("p"), py::arg("q"), py::arg("modulus"),
      "row-HNF basis and determinant of {(m,n): p^m q^n = 1 mod Q}");
  m.def("subgroup_order", &subgroup_order_enumerated, py::arg("p"), py::arg("q"),
        py::arg("modulus"), "|<p,q>| in (Z/QZ)* by closure enumeration");
  m.def("ord", &ord_q, py::arg("p"), py::arg("q"), py::arg("modulus"),
        "same order via the lattice determinant, cross-checked");
  m.def(
      "lattice_minima",
      [](const Int& p, const Int& q, const Int& modulus) {
        RelationLattice lat = relation_lattice(p, q, modulus);
        MinimaPair mins = gauss_reduce(lat);
        Int prod = mins.lambda1 * mins.lambda2;
        return py::dict("det"_a = lat.det, "lambda1"_a = mins.lambda1,
                        "lambda2"_a = mins.lambda2, "v1"_a = pair_tuple(mins.v1),
                        "v2"_a = pair_tuple(mins.v2),
                        "minkowski_ok"_a = (2 * prod >= lat.det && prod <= lat.det));
      },
      py::arg("p"), py::arg("q"), py::arg("modulus"),
      "successive sup-norm minima of the relation lattice");

  m.def(
      "orbit_row",
      [](const Int& p, const Int& q, const Int& modulus, const Rat& beta, long k) {
        OrbitParams params = OrbitParams::make(p, q, modulus, beta, k);
        std::vector<Int> b = b_set(params);
        std::vector<ReturnRecord> recs = return_set(params);
        std::vector<ExponentPair> pairs;
        for (const ReturnRecord& r : recs)
          if (pairs.empty() || !(pairs.back() == r.pair)) pairs.push_back(r.pair);
        CollinearResult line = is_collinear(pairs);
        py::list returns, pair_list;
        for (const ReturnRecord& r : recs)
          returns.append(py::make_tuple(r.pair.m, r.pair.n, r.a, r.b));
        for (const ExponentPair& pr : pairs) pair_list.append(pair_tuple(pr));
        py::object witness = py::none();
        if (line.collinear && !(line.direction == ExponentPair{0, 0}))
          witness = py::make_tuple(pair_tuple(line.anchor), pair_tuple(line.direction));
        return py::dict("Q"_a = modulus, "b_set"_a = b, "returns"_a = returns,
                        "pairs"_a = pair_list, "collinear"_a = line.collinear,
                        "line"_a = witness);
      },
      py::arg("p"), py::arg("q"), py::arg("modulus"), py::arg("beta"), py::arg("k") = 1,
      "B-set, return set, and collinearity verdict for one modulus");

  m.def(
      "theorem1_scan",
      [](const Int& p, const Int& q, long k, const Rat& beta, const Int& q_lo,
         const Int& q_hi, unsigned jobs) {
        py::list rows;
        std::size_t skipped = theorem1_scan(
            p, q, k, beta, q_lo, q_hi, jobs, [&](const Theorem1Row& row) {
              py::object witness = py::none();
              if (row.line.collinear && !(row.line.direction == ExponentPair{0, 0}))
                witness = py::make_tuple(pair_tuple(row.line.anchor),
                                         pair_tuple(row.line.direction));
              rows.append(py::dict("Q"_a = row.modulus, "b_size"_a = row.b_size,
                                   "pair_count"_a = row.pair_count,
                                   "collinear"_a = row.line.collinear,
                                   "line"_a = witness));
            });
        return py::make_tuple(rows, skipped);
      },
      py::arg("p"), py::arg("q"), py::arg("k"), py::arg("beta"), py::arg("q_lo"),
      py::arg("q_hi"), py::arg("jobs") = 1,
      "orbit rows for every coprime modulus in the range, plus the skip count");

  m.def(
      "classify",
      [](const Int& a1, const Int& b1, const Int& a2, const Int& b2, const Int& s1,
         const Int& t1, const Int& s2, const Int& t2, const std::vector<Int>& primes,
         const Rat& epsilon, const Int& c_threshold) {
        GcdInstance inst = instance_of(a1, b1, a2, b2, s1, t1, s2, t2, primes);
        TrichotomyVerdict v = classify(inst, constants(epsilon), c_threshold);
        py::object witness = py::none();
        if (v.tag == VerdictTag::MultDep)
          witness = py::make_tuple(v.witness.first, v.witness.second);
        return py::dict("H"_a = inst.h, "Qgcd"_a = inst.q_gcd,
                        "verdict"_a = verdict_name(v.tag), "reason"_a = v.reason,
                        "witness"_a = witness, "signed_max"_a = v.signed_max,
                        "abs_max"_a = v.abs_max);
      },
      py::arg("a1"), py::arg("b1"), py::arg("a2"), py::arg("b2"), py::arg("s1"),
      py::arg("t1"), py::arg("s2"), py::arg("t2"), py::arg("primes"),
      py::arg("epsilon"), py::arg("c_threshold"),
      "trichotomy verdict for one octuple");

  m.def(
      "mult_dep_search",
      [](const Rat& x1, const Rat& x2, long n_bound) -> py::object {
        auto w = mult_dep_search(x1, x2, n_bound);
        if (!w) return py::none();
        return py::make_tuple(w->first, w->second);
      },
      py::arg("x1"), py::arg("x2"), py::arg("n_bound"),
      "least (n1,n2) with x1^n1 = x2^n2, or None");

  m.def(
      "theorem2_scan",
      [](const std::vector<Int>& primes, const Rat& epsilon, const Int& h_max,
         const Int& a_max, const Int& c_threshold, unsigned jobs) {
        py::list rows;
        ScanSummary sum = theorem2_scan(
            place_set(primes), epsilon, h_max, a_max, c_threshold, jobs,
            [&](const ScanRow& r) {
              py::object witness = py::none();
              if (r.verdict.tag == VerdictTag::MultDep)
                witness = py::make_tuple(r.verdict.witness.first,
                                         r.verdict.witness.second);
              rows.append(py::dict(
                  "octuple"_a = py::make_tuple(r.inst.a1, r.inst.b1, r.inst.a2,
                                               r.inst.b2, r.inst.s1, r.inst.t1,
                                               r.inst.s2, r.inst.t2),
                  "H"_a = r.inst.h, "Qgcd"_a = r.inst.q_gcd,
                  "verdict"_a = verdict_name(r.verdict.tag), "witness"_a = witness));
            });
        py::dict summary("considered"_a = sum.considered, "kept"_a = sum.kept,
                         "h_small"_a = sum.count_a, "coeff_large"_a = sum.count_b,
                         "mult_dep"_a = sum.count_c,
                         "bound_violation"_a = sum.count_violation);
        if (sum.has_max_eps) {
          summary["max_eps_qgcd"] = py::cast(sum.max_eps_qgcd);
          summary["max_eps_h"] = py::cast(sum.max_eps_h);
          summary["max_eps"] = sum.max_eps_display;
        }
        return py::make_tuple(summary, rows);
      },
      py::arg("primes"), py::arg("epsilon"), py::arg("h_max"), py::arg("a_max"),
      py::arg("c_threshold"), py::arg("jobs") = 1,
      "exhaustive octuple scan; returns (summary, kept rows)");

  m.def(
      "certify",
      [](const Int& a1, const Int& b1, const Int& a2, const Int& b2, const Int& s1,
         const Int& t1, const Int& s2, const Int& t2, const std::vector<Int>& primes,
         const Rat& epsilon) {
        GcdInstance inst = instance_of(a1, b1, a2, b2, s1, t1, s2, t2, primes);
        InstanceCertificate cert = certify_instance(inst, constants(epsilon));
        return py::dict("H"_a = cert.inst.h, "Qgcd"_a = cert.inst.q_gcd,
                        "degenerate"_a = cert.degenerate, "note"_a = cert.note,
                        "product"_a = cert.product,
                        "checks"_a = check_list(cert.checks));
      },
      py::arg("a1"), py::arg("b1"), py::arg("a2"), py::arg("b2"), py::arg("s1"),
      py::arg("t1"), py::arg("s2"), py::arg("t2"), py::arg("primes"),
      py::arg("epsilon"), "full certificate chain for one octuple");

  m.def(
      "lemma_diff",
      [](const Int& y1, const Int& y2, const Int& qd, const std::vector<Int>& primes) {
        LemmaDiffResult r = lemma_diff(y1, y2, qd, place_set(primes));
        return py::dict("holds"_a = r.holds, "lhs"_a = r.lhs, "rhs"_a = r.rhs);
      },
      py::arg("y1"), py::arg("y2"), py::arg("qd"), py::arg("primes"),
      "min-product bound for a divisible difference");

  m.def(
      "smooth_up_to",
      [](const std::vector<Int>& primes, const Int& h_max) {
        return smooth_up_to(place_set(primes), h_max);
      },
      py::arg("primes"), py::arg("h_max"), "ascending smooth integers in [1, h_max]");

  m.def(
      "gcd_records",
      [](const Int& a, const Int& b, long n_max, unsigned jobs) {
        py::list rows;
        extremal_gcd_search(a, b, n_max, jobs, [&](const GcdRecordRow& r) {
          rows.append(py::dict("n"_a = r.n, "g"_a = r.g, "record"_a = r.record,
                               "stat"_a = r.has_stat ? py::cast(r.stat)
                                                     : py::object(py::none())));
        });
        return rows;
      },
      py::arg("a"), py::arg("b"), py::arg("n_max"), py::arg("jobs") = 1,
      "gcd(a^n-1, b^n-1) rows with running records");

  m.def(
      "box_witness",
      [](const Int& q, const Int& s) {
        ExponentPair w = box_witness(q, s);
        return py::make_tuple(w.m, w.n);
      },
      py::arg("q"), py::arg("s"),
      "shortest (a,b) with a*s = b mod Q, inside the ceil(sqrt(Q)) box");
}
