#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sunitlab/arith.hpp"
#include "sunitlab/cli.hpp"
#include "sunitlab/gcdlab.hpp"

namespace {

namespace cli = sunitlab::cli;
using sunitlab::Int;
using sunitlab::Rat;

struct Common {
  std::string format, output, jobs, config, dump;
};

void add_common(CLI::App* sub, Common& c, bool plain_default) {
  c.format = plain_default ? "plain" : "csv";
  sub->add_option("--format", c.format,
                  plain_default ? "plain, csv, or jsonl" : "csv or jsonl");
  sub->add_option("--output", c.output, "write to this file instead of stdout");
  sub->add_option("--jobs", c.jobs,
                  "worker count; default $SUNITLAB_JOBS, then 1");
  sub->add_option("--config", c.config,
                  "flat key=value file mirroring the flags; flags win");
  sub->add_option("--dump-config", c.dump,
                  "write the effective config to this path ('-' for stdout) "
                  "and exit");
}

unsigned resolve_jobs(const std::string& flag) {
  std::string v = flag;
  if (v.empty()) {
    const char* env = std::getenv("SUNITLAB_JOBS");
    if (env) v = env;
  }
  if (v.empty()) return 1;
  return cli::parse_jobs(v);
}

bool flag_present(const std::vector<std::string>& args,
                  const std::string& key) {
  std::string full = "--" + key;
  std::string pre = full + "=";
  for (const auto& a : args)
    if (a == full || a.rfind(pre, 0) == 0) return true;
  return false;
}

// turns config entries into trailing --key=value args; command-line flags win
std::vector<std::string> config_args(const std::string& path,
                                     const std::string& command,
                                     const std::vector<std::string>& given) {
  std::ifstream f(path);
  if (!f) throw std::domain_error("cannot open config file: '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  std::map<std::string, std::string> kv = cli::parse_kv(buf.str());
  auto cmd = kv.find("command");
  if (cmd != kv.end()) {
    if (cmd->second != command)
      throw std::domain_error("config is for command '" + cmd->second + "'");
    kv.erase(cmd);
  }
  const std::set<std::string>& known = cli::known_keys(command);
  std::vector<std::string> extra;
  for (const auto& [k, v] : kv) {
    if (!known.count(k) && k != "format" && k != "output" && k != "jobs")
      throw std::domain_error("config: unknown key '" + k + "'");
    // an empty value means "keep the default"; CLI11 would misread --key=
    if (!flag_present(given, k) && !v.empty())
      extra.push_back("--" + k + "=" + v);
  }
  return extra;
}

int write_dump(const std::string& path, const cli::RunConfig& cfg) {
  if (path == "-") {
    std::cout << cfg.to_text();
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::domain_error("cannot open output file: '" + path + "'");
  f << cfg.to_text();
  return 0;
}

int with_output(const std::string& path,
                const std::function<int(std::ostream&)>& fn) {
  if (path.empty()) {
    int rc = fn(std::cout);
    std::cout.flush();
    return rc;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::domain_error("cannot open output file: '" + path + "'");
  int rc = fn(f);
  f.flush();
  if (!f) throw std::domain_error("error writing output file: '" + path + "'");
  return rc;
}

cli::RunConfig base_config(const std::string& command, const Common& c,
                           std::map<std::string, std::string> params) {
  cli::RunConfig cfg;
  cfg.command = command;
  cfg.params = std::move(params);
  cfg.format = c.format;
  cfg.output = c.output;
  cfg.jobs = std::to_string(resolve_jobs(c.jobs));
  return cfg;
}

struct OrbitOpts {
  std::string p, q, k = "1", beta = "1/4", qmin = "2", qmax;
};

int do_orbit(const OrbitOpts& o, const Common& c) {
  if (!c.dump.empty())
    return write_dump(c.dump, base_config("orbit", c,
                                          {{"p", o.p},
                                           {"q", o.q},
                                           {"K", o.k},
                                           {"beta", o.beta},
                                           {"qmin", o.qmin},
                                           {"qmax", o.qmax}}));
  cli::OrbitArgs a;
  a.p = cli::parse_int(o.p);
  a.q = cli::parse_int(o.q);
  a.k_bound = cli::parse_long(o.k);
  a.beta = cli::parse_rat(o.beta);
  a.q_lo = cli::parse_int(o.qmin);
  a.q_hi = cli::parse_int(o.qmax);
  cli::Format f = cli::parse_format(c.format, false);
  unsigned jobs = resolve_jobs(c.jobs);
  return with_output(c.output, [&](std::ostream& out) {
    cli::run_orbit(a, f, jobs, out);
    return 0;
  });
}

struct LatticeOpts {
  std::string p, q, qmax;
};

int do_lattice(const LatticeOpts& o, const Common& c) {
  if (!c.dump.empty())
    return write_dump(c.dump, base_config("lattice", c,
                                          {{"p", o.p},
                                           {"q", o.q},
                                           {"qmax", o.qmax}}));
  cli::LatticeArgs a;
  a.p = cli::parse_int(o.p);
  a.q = cli::parse_int(o.q);
  a.q_max = cli::parse_int(o.qmax);
  cli::Format f = cli::parse_format(c.format, false);
  unsigned jobs = resolve_jobs(c.jobs);
  return with_output(c.output, [&](std::ostream& out) {
    cli::run_lattice(a, f, jobs, out);
    return 0;
  });
}

struct ScanOpts {
  std::string primes, epsilon, hmax, amax = "1", cthreshold;
};

int do_scan(const ScanOpts& o, const Common& c) {
  std::string cthr = o.cthreshold.empty() ? o.hmax : o.cthreshold;
  if (!c.dump.empty())
    return write_dump(c.dump, base_config("scan", c,
                                          {{"primes", o.primes},
                                           {"epsilon", o.epsilon},
                                           {"hmax", o.hmax},
                                           {"amax", o.amax},
                                           {"cthreshold", cthr}}));
  cli::ScanArgs a;
  a.primes = cli::parse_prime_list(o.primes);
  a.epsilon = cli::parse_rat(o.epsilon);
  a.h_max = cli::parse_int(o.hmax);
  a.a_max = cli::parse_int(o.amax);
  a.c_threshold = cli::parse_int(cthr);
  cli::Format f = cli::parse_format(c.format, false);
  unsigned jobs = resolve_jobs(c.jobs);
  return with_output(c.output, [&](std::ostream& out) {
    cli::run_scan(a, f, jobs, out);
    return 0;
  });
}

struct CertifyOpts {
  std::string epsilon, nbound, alpha, input;
};

int do_certify(const CertifyOpts& o, const Common& c) {
  if (!c.dump.empty())
    return write_dump(c.dump, base_config("certify", c,
                                          {{"epsilon", o.epsilon},
                                           {"nbound", o.nbound},
                                           {"alpha", o.alpha},
                                           {"input", o.input}}));
  Rat eps = cli::parse_rat(o.epsilon);
  if (o.nbound.empty() != o.alpha.empty())
    throw std::domain_error("nbound and alpha must be given together");
  sunitlab::Constants consts =
      o.nbound.empty()
          ? sunitlab::constants(eps)
          : sunitlab::constants(eps, cli::parse_long(o.nbound),
                                cli::parse_rat(o.alpha));
  if (consts.n_bound < 1)
    throw std::domain_error("the exponent box is empty; lower epsilon");
  cli::Format f = cli::parse_format(c.format, false);
  std::ifstream file;
  std::istream* in = &std::cin;
  if (!o.input.empty()) {
    file.open(o.input);
    if (!file)
      throw std::domain_error("cannot open input file: '" + o.input + "'");
    in = &file;
  }
  return with_output(c.output, [&](std::ostream& out) {
    return cli::run_certify(*in, consts, f, out, std::cerr);
  });
}

struct RecordsOpts {
  std::string a, b, nmax;
};

int do_records(const RecordsOpts& o, const Common& c) {
  if (!c.dump.empty())
    return write_dump(c.dump, base_config("records", c,
                                          {{"a", o.a},
                                           {"b", o.b},
                                           {"nmax", o.nmax}}));
  cli::RecordsArgs a;
  a.a = cli::parse_int(o.a);
  a.b = cli::parse_int(o.b);
  a.n_max = cli::parse_long(o.nmax);
  cli::Format f = cli::parse_format(c.format, false);
  unsigned jobs = resolve_jobs(c.jobs);
  return with_output(c.output, [&](std::ostream& out) {
    cli::run_records(a, f, jobs, out);
    return 0;
  });
}

struct BoxOpts {
  std::string q, s;
};

int do_box(const BoxOpts& o, const Common& c) {
  if (!c.dump.empty())
    return write_dump(c.dump,
                      base_config("box", c, {{"Q", o.q}, {"s", o.s}}));
  Int q = cli::parse_int(o.q);
  Int s = cli::parse_int(o.s);
  cli::Format f = cli::parse_format(c.format, true);
  return with_output(c.output, [&](std::ostream& out) {
    cli::run_box(q, s, f, out);
    return 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);

  static const std::set<std::string> commands = {"orbit",   "lattice", "scan",
                                                 "certify", "records", "box"};
  std::string subname;
  for (const auto& a : args)
    if (!a.empty() && a[0] != '-') {
      if (commands.count(a)) subname = a;
      break;
    }
  std::string cfgpath;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) cfgpath = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) cfgpath = args[i].substr(9);
  }
  if (!cfgpath.empty() && !subname.empty()) {
    try {
      std::vector<std::string> extra = config_args(cfgpath, subname, args);
      args.insert(args.end(), extra.begin(), extra.end());
    } catch (const std::exception& e) {
      std::cerr << "sunitlab: " << e.what() << "\n";
      return 1;
    }
  }

  CLI::App app{"exact scans, lattice cross-checks, and gcd certificates "
               "for S-unit points"};
  app.require_subcommand(1);

  OrbitOpts oo;
  Common oc;
  CLI::App* orbit = app.add_subcommand("orbit", "return-set scan over moduli");
  orbit->add_option("--p", oo.p, "first prime")->required();
  orbit->add_option("--q", oo.q, "second prime")->required();
  orbit->add_option("--K", oo.k, "exponent budget: p^|m|, q^|n| <= Q^K");
  orbit->add_option("--beta", oo.beta, "lift window exponent in (0,1)");
  orbit->add_option("--qmin", oo.qmin, "first modulus, >= 2");
  orbit->add_option("--qmax", oo.qmax, "last modulus")->required();
  add_common(orbit, oc, false);

  LatticeOpts lo;
  Common lc;
  CLI::App* lattice =
      app.add_subcommand("lattice", "relation-lattice trace with cross-check");
  lattice->add_option("--p", lo.p, "first prime")->required();
  lattice->add_option("--q", lo.q, "second prime")->required();
  lattice->add_option("--qmax", lo.qmax, "last modulus")->required();
  add_common(lattice, lc, false);

  ScanOpts so;
  Common sc;
  CLI::App* scan =
      app.add_subcommand("scan", "trichotomy scan over S-unit gcd instances");
  scan->add_option("--primes", so.primes, "finite places, comma-separated")
      ->required();
  scan->add_option("--epsilon", so.epsilon, "gcd exponent, e.g. 1/3")
      ->required();
  scan->add_option("--hmax", so.hmax, "height bound for smooth parts")
      ->required();
  scan->add_option("--amax", so.amax, "coefficient bound");
  scan->add_option("--cthreshold", so.cthreshold,
                   "case (a) height threshold; default hmax");
  add_common(scan, sc, false);

  CertifyOpts co;
  Common cc;
  CLI::App* certify =
      app.add_subcommand("certify", "product-bound certificates per instance");
  certify->add_option("--epsilon", co.epsilon, "gcd exponent, e.g. 1/3")
      ->required();
  certify->add_option("--nbound", co.nbound, "override the box size N");
  certify->add_option("--alpha", co.alpha, "override the coefficient gate");
  certify->add_option("--input", co.input,
                      "instance file; default stdin "
                      "(a1 b1 a2 b2 s1 t1 s2 t2 | p1 p2 ...)");
  add_common(certify, cc, false);

  RecordsOpts ro;
  Common rc;
  CLI::App* records =
      app.add_subcommand("records", "gcd(a^n-1, b^n-1) record table");
  records->add_option("--a", ro.a, "first base, >= 2")->required();
  records->add_option("--b", ro.b, "second base, >= 2")->required();
  records->add_option("--nmax", ro.nmax, "last exponent")->required();
  add_common(records, rc, false);

  BoxOpts bo;
  Common bc;
  CLI::App* box =
      app.add_subcommand("box", "short vector with a s = b mod Q");
  box->add_option("--Q", bo.q, "modulus, >= 2")->required();
  box->add_option("--s", bo.s, "residue coprime to Q")->required();
  add_common(box, bc, true);

  std::vector<const char*> cargv;
  cargv.push_back(argv[0]);
  for (const auto& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*orbit) return do_orbit(oo, oc);
    if (*lattice) return do_lattice(lo, lc);
    if (*scan) return do_scan(so, sc);
    if (*certify) return do_certify(co, cc);
    if (*records) return do_records(ro, rc);
    if (*box) return do_box(bo, bc);
  } catch (const sunitlab::InternalError& e) {
    std::cerr << "sunitlab: internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "sunitlab: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "sunitlab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "sunitlab: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
