#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sunitlab/arith.hpp"
#include "sunitlab/gcdlab.hpp"

namespace sunitlab::cli {

// exact parameter parsing; only decimal integers and num/den fractions
Int parse_int(const std::string& text);
Rat parse_rat(const std::string& text);
long parse_long(const std::string& text);
unsigned parse_jobs(const std::string& text);
std::vector<Int> parse_prime_list(const std::string& text);  // comma-separated

enum class Format { plain, csv, jsonl };

// allow_plain: only box has a bare space-separated form
Format parse_format(const std::string& name, bool allow_plain);

std::string csv_field(const std::string& text);
std::string json_string(const std::string& text);
// rounded display value: ~ prefix, six significant digits, never exact
std::string display6(double x);

struct Cell {
  std::string text;
  bool raw = false;  // jsonl: emitted without quotes (booleans)
};

Cell cell(const Int& v);
Cell cell(const Rat& v);
Cell cell(std::string v);
Cell cell_bool(bool v);
Cell cell_count(unsigned long long v);

// csv: "# sunitlab <command> v1" comment, header row, data rows, then a
// "# key=value ..." footer; jsonl: one object per row, keys in column order,
// footer as a final short object; plain: space-joined fields, no frame
class RowWriter {
 public:
  RowWriter(std::ostream& out, Format format, std::string command,
            std::vector<std::string> columns);

  void header();
  void row(const std::vector<Cell>& cells);
  void footer(const std::vector<std::pair<std::string, std::string>>& entries);

 private:
  std::ostream& out_;
  Format format_;
  std::string command_;
  std::vector<std::string> columns_;
};

// flat key=value lines with # comments; duplicate keys rejected
std::map<std::string, std::string> parse_kv(const std::string& text);

// flat key=value image of one run; parses back exactly, unknown keys rejected
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> params;  // exact decimal/rational strings
  std::string format = "csv";
  std::string output;  // empty: stdout
  std::string jobs = "1";

  std::string to_text() const;
  static RunConfig from_text(const std::string& text);
};

// parameter names accepted per command (format/output/jobs are implied)
const std::set<std::string>& known_keys(const std::string& command);

// command drivers; every emitter below is ordered and deterministic, so the
// bytes written do not depend on the worker count

struct OrbitArgs {
  Int p, q;
  long k_bound = 1;
  Rat beta;
  Int q_lo, q_hi;
};
void run_orbit(const OrbitArgs& a, Format format, unsigned jobs,
               std::ostream& out);

struct LatticeArgs {
  Int p, q, q_max;
};
void run_lattice(const LatticeArgs& a, Format format, unsigned jobs,
                 std::ostream& out);

struct ScanArgs {
  std::vector<Int> primes;
  Rat epsilon;
  Int h_max, a_max, c_threshold;
};
void run_scan(const ScanArgs& a, Format format, unsigned jobs,
              std::ostream& out);

// one report row per instance line; rejected lines are logged to err with
// their line number and skipped; returns 3 if anything was rejected, else 0
int run_certify(std::istream& in, const Constants& consts, Format format,
                std::ostream& out, std::ostream& err);

struct RecordsArgs {
  Int a, b;
  long n_max = 0;
};
void run_records(const RecordsArgs& a, Format format, unsigned jobs,
                 std::ostream& out);

void run_box(const Int& q, const Int& s, Format format, std::ostream& out);

}  // namespace sunitlab::cli
