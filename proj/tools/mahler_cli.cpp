// Command line surface: one-shot measure/substitute/rho/bound/sublevel/pd
// computations and convergence scans emitting CSV.
#include <atomic>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mm/bounds.hpp"
#include "mm/dilog.hpp"
#include "mm/errors.hpp"
#include "mm/laurent.hpp"
#include "mm/lattice.hpp"
#include "mm/measure.hpp"
#include "mm/pd_family.hpp"

namespace {

// exit codes: 0 ok, 2 parse/input error, 3 numeric failure, 4 precondition
constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitPrecondition = 4;

struct Defaults {
  int grid = 256;
  long long samples = 1'000'000;
  std::uint64_t seed = 1;
  int threads = 1;
};

void load_config(const std::string& path, Defaults* d) {
  std::ifstream in(path);
  if (!in) throw mm::parse_error("cannot open config file " + path, 0);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
      return s;
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    try {
      if (key == "grid") d->grid = std::stoi(val);
      else if (key == "samples") d->samples = std::stoll(val);
      else if (key == "seed") d->seed = std::stoull(val);
      else if (key == "threads") d->threads = std::stoi(val);
      else throw mm::parse_error("unknown config key '" + key + "'", 0);
    } catch (const std::invalid_argument&) {
      throw mm::parse_error("bad config value for '" + key + "'", 0);
    }
  }
}

mm::LaurentPoly load_poly(const std::string& arg, int n) {
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw mm::parse_error("cannot open polynomial file " + arg.substr(1), 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return mm::poly_from_json(ss.str());
  }
  std::size_t i = 0;
  while (i < arg.size() && std::isspace(static_cast<unsigned char>(arg[i]))) ++i;
  if (i < arg.size() && arg[i] == '{') return mm::poly_from_json(arg);
  if (n <= 0) throw mm::parse_error("--n is required for polynomial expressions", 0);
  return mm::parse_poly(arg, n);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// affine integer expression in the symbol d: INT | [INT*]d[(+|-)INT]
struct AffineExpr {
  long long slope = 0;
  long long offset = 0;
  long long eval(long long d) const { return slope * d + offset; }
};

AffineExpr parse_affine(const std::string& tok) {
  AffineExpr e;
  std::size_t i = 0;
  auto read_int = [&]() {
    std::size_t start = i;
    if (i < tok.size() && (tok[i] == '+' || tok[i] == '-')) ++i;
    std::size_t digits_from = i;
    while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
    if (i == digits_from) throw mm::parse_error("bad matrix template entry '" + tok + "'", start);
    return std::stoll(tok.substr(start, i - start));
  };
  if (tok.find('d') == std::string::npos) {
    e.offset = read_int();
  } else {
    if (tok[i] == 'd') {
      e.slope = 1;
      ++i;
    } else {
      long long c = read_int();
      if (i < tok.size() && tok[i] == '*') ++i;
      if (i >= tok.size() || tok[i] != 'd')
        throw mm::parse_error("bad matrix template entry '" + tok + "'", i);
      e.slope = c;
      ++i;
    }
    if (i < tok.size()) e.offset = read_int();
  }
  if (i != tok.size()) throw mm::parse_error("bad matrix template entry '" + tok + "'", i);
  return e;
}

struct MatrixTemplate {
  int rows = 0, cols = 0;
  std::vector<AffineExpr> cells;

  mm::SubstMatrix instantiate(long long d) const {
    std::vector<long long> entries;
    entries.reserve(cells.size());
    for (const auto& c : cells) entries.push_back(c.eval(d));
    return mm::make_subst_matrix(rows, cols, entries);
  }
};

MatrixTemplate parse_template(const std::string& text) {
  MatrixTemplate t;
  std::stringstream all(text);
  std::string row;
  std::vector<std::vector<AffineExpr>> rows;
  while (std::getline(all, row, ';')) {
    for (auto& ch : row)
      if (ch == ',') ch = ' ';
    std::stringstream rs(row);
    std::string tok;
    std::vector<AffineExpr> cells;
    while (rs >> tok) cells.push_back(parse_affine(tok));
    if (!cells.empty()) rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw mm::parse_error("empty matrix template", 0);
  for (const auto& r : rows)
    if (r.size() != rows[0].size()) throw mm::parse_error("ragged matrix template", 0);
  t.rows = static_cast<int>(rows.size());
  t.cols = static_cast<int>(rows[0].size());
  for (const auto& r : rows) t.cells.insert(t.cells.end(), r.begin(), r.end());
  return t;
}

// reports go to stdout unless a global --out path is given
struct Report {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Report(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw mm::numeric_error("cannot open output file " + path);
      os = &file;
    }
  }
  template <typename T>
  Report& operator<<(const T& v) {
    *os << v;
    return *this;
  }
};

mm::MeasureResult run_measure(const mm::LaurentPoly& p, const std::string& method, int grid,
                              long long samples, std::uint64_t seed) {
  if (method == "exact") return mm::measure_univariate_exact(p);
  if (method == "iterated") return mm::measure_iterated(p, grid);
  if (method == "mc") return mm::measure_mc(p, samples, seed);
  if (method == "auto") return mm::measure_auto(p, grid, samples, seed);
  throw mm::parse_error("unknown method '" + method + "'", 0);
}

int cmd_measure(const std::string& poly_text, int n, const std::string& method,
                const std::string& out_path, const Defaults& dft) {
  mm::LaurentPoly p = load_poly(poly_text, n);
  if (p.is_zero()) {
    std::cerr << "error: zero polynomial\n";
    return kExitParse;
  }
  mm::MeasureResult r = run_measure(p, method, dft.grid, dft.samples, dft.seed);
  Report out(out_path);
  out << "value = " << fmt(r.value) << "\n";
  out << "method = " << mm::measure_method_name(r.method) << "\n";
  out << "error_estimate = " << fmt(r.error_estimate) << "\n";
  if (r.method == mm::MeasureMethod::iterated_quadrature)
    out << "grid = " << r.grid << "\n";
  else if (r.method == mm::MeasureMethod::monte_carlo)
    out << "samples = " << r.samples << "\n";
  else
    out << "roots = " << r.roots << "\n";
  return kExitOk;
}

int cmd_substitute(const std::string& poly_text, int n, const std::string& matrix_text,
                   bool as_json, const std::string& out_path) {
  mm::LaurentPoly p = load_poly(poly_text, n);
  mm::SubstMatrix a = mm::parse_matrix(matrix_text);
  mm::LaurentPoly q = mm::substitute(p, a);
  if (q.is_zero()) std::cerr << "note: substitution produced the zero polynomial\n";
  std::string payload = as_json ? mm::poly_to_json(q) : q.to_string();
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << payload << "\n";
  } else {
    std::cout << payload << "\n";
  }
  return kExitOk;
}

int cmd_rho(const std::string& matrix_text, const std::string& out_path) {
  mm::SubstMatrix a = mm::parse_matrix(matrix_text);
  Report out(out_path);
  out << "d = " << a.d << "\n";
  for (const auto& b : a.kernel) {
    out << "basis =";
    for (auto x : b) out << " " << x;
    out << "\n";
  }
  if (a.rho == mm::kRhoInfinity)
    out << "rho = inf\n";
  else
    out << "rho = " << a.rho << "\n";
  return kExitOk;
}

int cmd_bound(const std::string& poly_text, int n, double rho, const std::string& out_path) {
  mm::LaurentPoly p = load_poly(poly_text, n);
  if (p.is_zero()) {
    std::cerr << "error: zero polynomial\n";
    return kExitParse;
  }
  mm::BoundReport rep = mm::main_error_bound(mm::stats(p), rho);
  Report out(out_path);
  out << "rho0 = " << fmt(rep.rho0) << "\n";
  out << "applicable = " << (rep.applicable ? "true" : "false") << "\n";
  out << "bound = " << fmt(rep.bound_value) << "\n";
  for (const auto& [k, v] : rep.components) out << k << " = " << fmt(v) << "\n";
  return kExitOk;
}

int cmd_sublevel(const std::string& poly_text, int n, double r, const std::string& out_path,
                 const Defaults& dft) {
  mm::LaurentPoly p = load_poly(poly_text, n);
  if (p.is_zero()) {
    std::cerr << "error: zero polynomial\n";
    return kExitParse;
  }
  mm::SublevelEstimate est = mm::sublevel_measure(p, r, dft.samples, dft.seed);
  Report out(out_path);
  out << "estimate = " << fmt(est.value) << "\n";
  out << "ci99 = [" << fmt(est.ci_low) << ", " << fmt(est.ci_high) << "]\n";
  out << "samples = " << est.samples << "\n";
  return kExitOk;
}

int cmd_pd(int d, const std::string& mode, int expansion_k, const std::string& out_path,
           const Defaults& dft) {
  Report out(out_path);
  if (mode == "exact") {
    out << "value = " << fmt(mm::mpd_exact(d)) << "\n";
  } else if (mode == "numeric") {
    if (d < 1) throw mm::precondition_error("pd numeric needs d >= 1");
    mm::MeasureResult r = mm::measure_iterated(mm::pd_polynomial(d), dft.grid);
    out << "value = " << fmt(r.value) << "\n";
    out << "error_estimate = " << fmt(r.error_estimate) << "\n";
  } else if (mode == "asymptotic") {
    out << "value = " << fmt(mm::mpd_asymptotic(d, expansion_k)) << "\n";
  } else {
    throw mm::parse_error("unknown pd mode '" + mode + "'", 0);
  }
  return kExitOk;
}

struct ScanRow {
  long long d = 0;
  std::string rho = "NA";
  std::string m_pa = "NA";
  std::string m_p = "NA";
  std::string diff = "NA";
  std::string bound = "NA";
  std::string applicable = "NA";
  std::string warning;
};

int cmd_scan(const std::string& poly_text, int n, const std::string& template_text,
             long long d_from, long long d_to, long long d_step, const std::string& out_path,
             const std::string& method, bool resume, const Defaults& dft) {
  if (d_step <= 0) throw mm::precondition_error("scan step must be positive");
  if (out_path.empty()) throw mm::parse_error("scan requires --out", 0);
  mm::LaurentPoly p = load_poly(poly_text, n);
  if (p.is_zero()) {
    std::cerr << "error: zero polynomial\n";
    return kExitParse;
  }
  MatrixTemplate tpl = parse_template(template_text);
  if (tpl.cols != p.vars()) throw mm::precondition_error("template column count != n");

  std::set<long long> done;
  bool file_exists = std::filesystem::exists(out_path) && std::filesystem::file_size(out_path) > 0;
  if (resume && file_exists) {
    std::ifstream in(out_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 'd') continue;
      try {
        done.insert(std::stoll(line.substr(0, line.find(','))));
      } catch (...) {
      }
    }
  }

  std::vector<long long> ds;
  for (long long d = d_from; d <= d_to; d += d_step)
    if (!done.count(d)) ds.push_back(d);

  // reference m(P), computed once at the finest requested grid
  mm::MeasureResult ref = (p.vars() == 1)
                              ? mm::measure_univariate_exact(p)
                              : (method == "mc" ? mm::measure_mc(p, dft.samples, dft.seed)
                                                : mm::measure_iterated(p, dft.grid));
  const double m_p = ref.value;
  std::optional<mm::PolyStats> pstats;
  try {
    pstats = mm::stats(p);
  } catch (...) {
  }

  auto compute_row = [&](long long d) {
    ScanRow row;
    row.d = d;
    row.m_p = fmt(m_p);
    try {
      mm::SubstMatrix a = tpl.instantiate(d);
      row.rho = (a.rho == mm::kRhoInfinity) ? "inf" : std::to_string(a.rho);
      if (pstats && pstats->k >= 2 && pstats->n >= 2 && a.rho != mm::kRhoInfinity && a.rho > 1) {
        mm::BoundReport rep = mm::main_error_bound(*pstats, static_cast<double>(a.rho));
        row.bound = fmt(rep.bound_value);
        row.applicable = rep.applicable ? "true" : "false";
      }
      mm::LaurentPoly pa = mm::substitute(p, a);
      if (pa.is_zero()) {
        row.warning = "substitution produced the zero polynomial";
        return row;
      }
      mm::MeasureResult r =
          (pa.vars() == 1 && method != "mc")
              ? mm::measure_univariate_exact(pa)
              : (method == "mc"
                     ? mm::measure_mc(pa, dft.samples, dft.seed + static_cast<std::uint64_t>(d))
                     : mm::measure_iterated(pa, dft.grid));
      row.m_pa = fmt(r.value);
      row.diff = fmt(r.value - m_p);
    } catch (const std::exception& e) {
      row.warning = e.what();
    }
    return row;
  };

  // rows computed in parallel, output buffered in order
  std::vector<ScanRow> rows(ds.size());
  int threads = std::max(1, dft.threads);
  if (threads == 1 || ds.size() <= 1) {
    for (std::size_t i = 0; i < ds.size(); ++i) rows[i] = compute_row(ds[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= ds.size()) break;
        rows[i] = compute_row(ds[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::ofstream out(out_path, file_exists && resume ? std::ios::app : std::ios::trunc);
  if (!out) throw mm::numeric_error("cannot open output file " + out_path);
  if (!(file_exists && resume)) {
    out << "# poly = " << p.to_string() << "\n";
    out << "# n = " << p.vars() << "\n";
    out << "# template = " << template_text << "\n";
    out << "# method = " << method << ", grid = " << dft.grid << ", samples = " << dft.samples
        << ", seed = " << dft.seed << "\n";
    out << "# m_P = " << fmt(m_p) << " (error_estimate " << fmt(ref.error_estimate) << ")\n";
    out << "d,rho,m_PA,m_P,diff,bound,applicable\n";
  }
  for (const auto& row : rows) {
    if (!row.warning.empty()) std::cerr << "warning: d=" << row.d << ": " << row.warning << "\n";
    out << row.d << "," << row.rho << "," << row.m_pa << "," << row.m_p << "," << row.diff << ","
        << row.bound << "," << row.applicable << "\n";
  }
  std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mahler measures of Laurent polynomials, monomial substitutions and convergence scans"};
  app.require_subcommand(1);
  app.fallthrough();

  Defaults dft;
  int n = 0;
  std::string config_path;
  app.add_option("--n", n, "number of variables for polynomial expressions");
  app.add_option("--seed", dft.seed, "random seed for Monte Carlo paths");
  app.add_option("--threads", dft.threads, "worker threads for scans");
  app.add_option("--grid", dft.grid, "quadrature grid size per dimension");
  app.add_option("--samples", dft.samples, "Monte Carlo sample count");
  std::string out_path;
  app.add_option("--out", out_path, "write the report/CSV to this file");
  app.add_option("--config", config_path, "key=value config file with defaults");

  std::string poly_text, matrix_text, template_text, method = "auto", pd_mode = "exact";
  double rho_arg = 0.0, r_arg = 0.0;
  long long d_from = 0, d_to = 0, d_step = 1;
  int pd_d = 0, expansion_k = 4;
  bool as_json = false, resume = false;

  auto* c_measure = app.add_subcommand("measure", "logarithmic Mahler measure of a polynomial");
  c_measure->add_option("poly", poly_text, "polynomial expression, json, or @file.json")->required();
  c_measure->add_option("--method", method, "auto|exact|iterated|mc");

  auto* c_subst = app.add_subcommand("substitute", "apply a monomial substitution P -> P_A");
  c_subst->add_option("poly", poly_text)->required();
  c_subst->add_option("--matrix", matrix_text, "rows 'a b; c d' acting on exponent vectors")->required();
  c_subst->add_flag("--json", as_json, "emit the sparse interchange format");

  auto* c_rho = app.add_subcommand("rho", "kernel lattice basis and rho(A)");
  c_rho->add_option("matrix", matrix_text)->required();

  auto* c_bound = app.add_subcommand("bound", "convergence error bound report");
  c_bound->add_option("poly", poly_text)->required();
  c_bound->add_option("--rho", rho_arg, "rho(A) value to evaluate the bound at")->required();

  auto* c_scan = app.add_subcommand("scan", "sweep a matrix template over d, emit CSV");
  c_scan->add_option("poly", poly_text)->required();
  c_scan->add_option("--template", template_text, "matrix entries as affine expressions in d")->required();
  c_scan->add_option("--from", d_from)->required();
  c_scan->add_option("--to", d_to)->required();
  c_scan->add_option("--step", d_step);
  c_scan->add_option("--method", method, "auto|iterated|mc for the per-row measures");
  c_scan->add_flag("--resume", resume, "skip rows already present in the output file");

  auto* c_pd = app.add_subcommand("pd", "Mahler measure of the P_d family");
  c_pd->add_option("--d", pd_d)->required();
  c_pd->add_option("--mode", pd_mode, "exact|numeric|asymptotic");
  c_pd->add_option("--K", expansion_k, "expansion truncation order for asymptotic mode");

  auto* c_sub = app.add_subcommand("sublevel", "Monte Carlo measure of S(P,r)");
  c_sub->add_option("poly", poly_text)->required();
  c_sub->add_option("--r", r_arg, "sublevel radius")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (!config_path.empty()) load_config(config_path, &dft);
    if (c_measure->parsed()) return cmd_measure(poly_text, n, method, out_path, dft);
    if (c_subst->parsed()) return cmd_substitute(poly_text, n, matrix_text, as_json, out_path);
    if (c_rho->parsed()) return cmd_rho(matrix_text, out_path);
    if (c_bound->parsed()) return cmd_bound(poly_text, n, rho_arg, out_path);
    if (c_scan->parsed())
      return cmd_scan(poly_text, n, template_text, d_from, d_to, d_step, out_path, method, resume, dft);
    if (c_pd->parsed()) return cmd_pd(pd_d, pd_mode, expansion_k, out_path, dft);
    if (c_sub->parsed()) return cmd_sublevel(poly_text, n, r_arg, out_path, dft);
  } catch (const mm::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const mm::precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const mm::numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
