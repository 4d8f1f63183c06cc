#include "sunitlab/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sunitlab/certificate.hpp"
#include "sunitlab/lattice.hpp"
#include "sunitlab/orbit.hpp"

namespace sunitlab::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string pair_str(const ExponentPair& v) {
  return "(" + v.m.get_str() + "," + v.n.get_str() + ")";
}

std::string hnf_str(const RelationLattice& lat) {
  return "[[" + lat.row0.m.get_str() + "," + lat.row0.n.get_str() + "],[" +
         lat.row1.m.get_str() + "," + lat.row1.n.get_str() + "]]";
}

std::string count_str(unsigned long long v) { return std::to_string(v); }

}  // namespace

Int parse_int(const std::string& text) {
  std::size_t i = (!text.empty() && (text[0] == '-' || text[0] == '+')) ? 1 : 0;
  if (i == text.size())
    throw std::domain_error("not an integer: '" + text + "'");
  for (std::size_t j = i; j < text.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(text[j])))
      throw std::domain_error("not an integer: '" + text + "'");
  return Int(text[0] == '+' ? text.substr(1) : text, 10);
}

Rat parse_rat(const std::string& text) {
  std::size_t slash = text.find('/');
  if (slash == std::string::npos) return Rat(parse_int(text));
  Int num = parse_int(text.substr(0, slash));
  Int den = parse_int(text.substr(slash + 1));
  if (den == 0) throw std::domain_error("zero denominator: '" + text + "'");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

long parse_long(const std::string& text) {
  Int v = parse_int(text);
  if (!v.fits_slong_p())
    throw std::domain_error("value out of range: '" + text + "'");
  return v.get_si();
}

unsigned parse_jobs(const std::string& text) {
  long v = parse_long(text);
  if (v < 1 || v > 4096)
    throw std::domain_error("jobs must lie in [1, 4096]: '" + text + "'");
  return static_cast<unsigned>(v);
}

std::vector<Int> parse_prime_list(const std::string& text) {
  std::vector<Int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = (comma == std::string::npos)
                          ? text.substr(pos)
                          : text.substr(pos, comma - pos);
    out.push_back(parse_int(trim(tok)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

Format parse_format(const std::string& name, bool allow_plain) {
  if (name == "csv") return Format::csv;
  if (name == "jsonl") return Format::jsonl;
  if (name == "plain" && allow_plain) return Format::plain;
  throw std::domain_error("unknown format: '" + name + "'");
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string json_string(const std::string& text) {
  std::string out = "\"";
  for (unsigned char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
  return out;
}

std::string display6(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return std::string("~") + buf;
}

Cell cell(const Int& v) { return {v.get_str(), false}; }
Cell cell(const Rat& v) { return {rat_str(v), false}; }
Cell cell(std::string v) { return {std::move(v), false}; }
Cell cell_bool(bool v) { return {v ? "true" : "false", true}; }
Cell cell_count(unsigned long long v) { return {count_str(v), false}; }

RowWriter::RowWriter(std::ostream& out, Format format, std::string command,
                     std::vector<std::string> columns)
    : out_(out),
      format_(format),
      command_(std::move(command)),
      columns_(std::move(columns)) {}

void RowWriter::header() {
  if (format_ != Format::csv) return;
  out_ << "# sunitlab " << command_ << " v1\n";
  for (std::size_t i = 0; i < columns_.size(); ++i)
    out_ << (i ? "," : "") << csv_field(columns_[i]);
  out_ << "\n";
}

void RowWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_.size())
    throw InternalError("row width does not match the header");
  switch (format_) {
    case Format::csv:
      for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << (i ? "," : "") << csv_field(cells[i].text);
      break;
    case Format::jsonl:
      out_ << "{";
      for (std::size_t i = 0; i < cells.size(); ++i) {
        out_ << (i ? "," : "") << json_string(columns_[i]) << ":";
        out_ << (cells[i].raw ? cells[i].text : json_string(cells[i].text));
      }
      out_ << "}";
      break;
    case Format::plain:
      for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << (i ? " " : "") << cells[i].text;
      break;
  }
  out_ << "\n";
}

void RowWriter::footer(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  if (entries.empty() || format_ == Format::plain) return;
  if (format_ == Format::csv) {
    out_ << "#";
    for (const auto& [k, v] : entries) out_ << " " << k << "=" << v;
  } else {
    out_ << "{";
    bool first = true;
    for (const auto& [k, v] : entries) {
      out_ << (first ? "" : ",") << json_string(k) << ":" << json_string(v);
      first = false;
    }
    out_ << "}";
  }
  out_ << "\n";
}

const std::set<std::string>& known_keys(const std::string& command) {
  static const std::map<std::string, std::set<std::string>> table = {
      {"orbit", {"p", "q", "K", "beta", "qmin", "qmax"}},
      {"lattice", {"p", "q", "qmax"}},
      {"scan", {"primes", "epsilon", "hmax", "amax", "cthreshold"}},
      {"certify", {"epsilon", "nbound", "alpha", "input"}},
      {"records", {"a", "b", "nmax"}},
      {"box", {"Q", "s"}},
  };
  auto it = table.find(command);
  if (it == table.end())
    throw std::domain_error("unknown command: '" + command + "'");
  return it->second;
}

std::string RunConfig::to_text() const {
  std::map<std::string, std::string> all = params;
  all["command"] = command;
  all["format"] = format;
  all["output"] = output;
  all["jobs"] = jobs;
  std::string out;
  for (const auto& [k, v] : all) out += k + "=" + v + "\n";
  return out;
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> all;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::domain_error("config line " + std::to_string(lineno) +
                              ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::domain_error("config line " + std::to_string(lineno) +
                              ": empty key");
    if (!all.emplace(key, value).second)
      throw std::domain_error("config line " + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
  }
  return all;
}

RunConfig RunConfig::from_text(const std::string& text) {
  std::map<std::string, std::string> all = parse_kv(text);
  auto cmd = all.find("command");
  if (cmd == all.end()) throw std::domain_error("config: missing command key");
  RunConfig cfg;
  cfg.command = cmd->second;
  const std::set<std::string>& known = known_keys(cfg.command);
  all.erase(cmd);
  for (auto& [k, v] : all) {
    if (k == "format") cfg.format = v;
    else if (k == "output") cfg.output = v;
    else if (k == "jobs") cfg.jobs = v;
    else if (known.count(k)) cfg.params[k] = v;
    else throw std::domain_error("config: unknown key '" + k + "'");
  }
  return cfg;
}

void run_orbit(const OrbitArgs& a, Format format, unsigned jobs,
               std::ostream& out) {
  RowWriter w(out, format, "orbit",
              {"Q", "beta", "K", "bSetSize", "returnSetSize", "collinear",
               "lineWitness"});
  w.header();
  std::size_t skipped = theorem1_scan(
      a.p, a.q, a.k_bound, a.beta, a.q_lo, a.q_hi, jobs,
      [&](const Theorem1Row& r) {
        std::string witness;
        if (r.line.collinear && !(r.line.direction == ExponentPair{0, 0}))
          witness = pair_str(r.line.anchor) + "+t" + pair_str(r.line.direction);
        w.row({cell(r.modulus), cell(a.beta), cell(Int(a.k_bound)),
               cell_count(r.b_size), cell_count(r.pair_count),
               cell_bool(r.line.collinear), cell(witness)});
      });
  w.footer({{"skipped", count_str(skipped)}});
}

void run_lattice(const LatticeArgs& a, Format format, unsigned jobs,
                 std::ostream& out) {
  RowWriter w(out, format, "lattice",
              {"Q", "ord", "hnf", "lambda1", "lambda2", "minkowskiOK",
               "ratioDisplay", "ordVsEnum"});
  w.header();
  bool mismatch = false;
  corollary_trace(a.p, a.q, a.q_max, Int(2), jobs,
                  [&](const OrderTraceRow& r) {
                    Int en = subgroup_order_enumerated(a.p, a.q, r.lat.modulus);
                    bool agree = en == r.lat.det;
                    if (!agree) mismatch = true;
                    w.row({cell(r.lat.modulus), cell(r.lat.det),
                           cell(hnf_str(r.lat)), cell(r.minima.lambda1),
                           cell(r.minima.lambda2), cell_bool(r.minkowski_ok),
                           cell(display6(r.ratio)),
                           cell(agree ? "agree" : "disagree")});
                  });
  if (mismatch)
    throw InternalError(
        "lattice determinant disagrees with subgroup enumeration");
}

void run_scan(const ScanArgs& a, Format format, unsigned jobs,
              std::ostream& out) {
  PlaceSet s = PlaceSet::of_primes(a.primes);
  RowWriter w(out, format, "scan",
              {"a1", "b1", "a2", "b2", "s1", "t1", "s2", "t2", "H", "Qgcd",
               "verdict", "witness"});
  w.header();
  ScanSummary sum = theorem2_scan(
      s, a.epsilon, a.h_max, a.a_max, a.c_threshold, jobs,
      [&](const ScanRow& r) {
        std::string witness;
        if (r.verdict.tag == VerdictTag::MultDep)
          witness = "(" + std::to_string(r.verdict.witness.first) + "," +
                    std::to_string(r.verdict.witness.second) + ")";
        w.row({cell(r.inst.a1), cell(r.inst.b1), cell(r.inst.a2),
               cell(r.inst.b2), cell(r.inst.s1), cell(r.inst.t1),
               cell(r.inst.s2), cell(r.inst.t2), cell(r.inst.h),
               cell(r.inst.q_gcd), cell(verdict_name(r.verdict.tag)),
               cell(witness)});
      });
  std::vector<std::pair<std::string, std::string>> foot = {
      {"considered", count_str(sum.considered)},
      {"kept", count_str(sum.kept)},
      {"hSmall", count_str(sum.count_a)},
      {"coeffLarge", count_str(sum.count_b)},
      {"multDep", count_str(sum.count_c)},
      {"boundViolation", count_str(sum.count_violation)},
  };
  if (sum.has_max_eps) {
    foot.emplace_back("maxEpsQgcd", sum.max_eps_qgcd.get_str());
    foot.emplace_back("maxEpsH", sum.max_eps_h.get_str());
    foot.emplace_back("maxEpsDisplay", display6(sum.max_eps_display));
  }
  w.footer(foot);
}

int run_certify(std::istream& in, const Constants& consts, Format format,
                std::ostream& out, std::ostream& err) {
  RowWriter w(out, format, "certify",
              {"line", "a1", "b1", "a2", "b2", "s1", "t1", "s2", "t2", "H",
               "Qgcd", "degenerate", "product", "quotient", "numerator",
               "denominator", "product-small", "height", "note"});
  w.header();
  std::string line;
  long lineno = 0;
  bool partial = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;
    try {
      auto bar = std::find(tokens.begin(), tokens.end(), "|");
      if (bar == tokens.end())
        throw std::domain_error("missing '|' separator");
      if (bar - tokens.begin() != 8)
        throw std::domain_error("expected 8 integers before '|'");
      Int v[8];
      for (int i = 0; i < 8; ++i) v[i] = parse_int(tokens[i]);
      std::vector<Int> primes;
      for (auto it = bar + 1; it != tokens.end(); ++it)
        primes.push_back(parse_int(*it));
      GcdInstance inst =
          GcdInstance::make(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7],
                            PlaceSet::of_primes(primes));
      InstanceCertificate cert = certify_instance(inst, consts);
      auto status = [&](const char* name) -> std::string {
        for (const auto& ck : cert.checks)
          if (ck.name == name) return check_status_name(ck.status);
        throw InternalError("certificate is missing a check record");
      };
      w.row({cell(Int(lineno)), cell(v[0]), cell(v[1]), cell(v[2]),
             cell(v[3]), cell(v[4]), cell(v[5]), cell(v[6]), cell(v[7]),
             cell(inst.h), cell(inst.q_gcd), cell_bool(cert.degenerate),
             cell(cert.product), cell(status("quotient")),
             cell(status("numerator")), cell(status("denominator")),
             cell(status("product-small")), cell(status("height")),
             cell(cert.note)});
    } catch (const InternalError&) {
      throw;
    } catch (const std::exception& e) {
      err << "line " << lineno << ": " << e.what() << "\n";
      partial = true;
    }
  }
  return partial ? 3 : 0;
}

void run_records(const RecordsArgs& a, Format format, unsigned jobs,
                 std::ostream& out) {
  RowWriter w(out, format, "records", {"n", "g", "record", "stat"});
  w.header();
  extremal_gcd_search(a.a, a.b, a.n_max, jobs, [&](const GcdRecordRow& r) {
    w.row({cell(Int(r.n)), cell(r.g), cell_bool(r.record),
           cell(r.has_stat ? display6(r.stat) : std::string())});
  });
}

void run_box(const Int& q, const Int& s, Format format, std::ostream& out) {
  ExponentPair v = box_witness(q, s);
  RowWriter w(out, format, "box", {"a", "b"});
  w.header();
  w.row({cell(v.m), cell(v.n)});
}

}  // namespace sunitlab::cli
