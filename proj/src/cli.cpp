#include "mtsylv/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mtsylv/error.hpp"
#include "mtsylv/mmio.hpp"
#include "mtsylv/oracles.hpp"
#include "mtsylv/problems.hpp"
#include "mtsylv/solvers.hpp"

namespace mtsylv {

namespace {

namespace fs = std::filesystem;

// Shortest text that reads back to the same double, locale independent.
std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

struct ProblemOptions {
  std::string problem;
  std::string dir;
  Index n = 10;
  Index m = 8;
  Index ell = 1;
  Index n0 = 5;
  Index n0b = 0;  // 0: same as n0
  double beta = 0.1;
  std::uint64_t seed = 0;
};

void add_problem_options(CLI::App* app, ProblemOptions& o, bool allow_files) {
  std::vector<std::string> kinds{"random-dense", "advdiff", "multiterm-sylv"};
  if (allow_files) kinds.emplace_back("files");
  app->add_option("--problem", o.problem, "Problem family")
      ->check(CLI::IsMember(kinds))
      ->required();
  app->add_option("--n", o.n, "Rows of X (random-dense)")->check(CLI::PositiveNumber);
  app->add_option("--m", o.m, "Columns of X (random-dense)")->check(CLI::PositiveNumber);
  app->add_option("--ell", o.ell, "Number of terms N_k X H_k (random-dense)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--n0", o.n0, "Grid parameter (advdiff, multiterm-sylv)")
      ->check(CLI::Range(Index{2}, Index{1} << 20));
  app->add_option("--n0b", o.n0b, "Grid parameter of the B side (multiterm-sylv)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--beta", o.beta, "Weight of the Pi term")->check(CLI::NonNegativeNumber);
  app->add_option("--seed", o.seed, "Generator seed");
  if (allow_files) app->add_option("--dir", o.dir, "Directory written by `gen`");
}

// Flat "key = value" lines; '#' starts a comment line.
std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Coordinate files come back sparse; mostly-dense data is stored dense again
// so that a file round trip reproduces the in-memory arithmetic.
Coefficient load(const fs::path& path) {
  Coefficient c = matrix_market_read(path.string());
  const SparseMatrix* s = c.sparse_ptr();
  if (s && 4 * s->nonZeros() > s->rows() * s->cols()) return Coefficient(c.dense());
  return c;
}

ProblemSpec load_problem(const std::string& dir) {
  if (dir.empty()) {
    throw CLI::ValidationError("--dir", "--problem files requires --dir");
  }
  const fs::path root(dir);
  const auto kv = read_key_values(root / "manifest");
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::Parse, "manifest lacks '" + key + "'");
    return it->second;
  };
  ProblemSpec spec;
  spec.kind = get("kind") == "lyapunov" ? EquationKind::Lyapunov : EquationKind::Sylvester;
  spec.A = load(root / "A.mtx");
  spec.B = load(root / "B.mtx");
  const long ell = std::stol(get("ell"));
  for (long k = 1; k <= ell; ++k) {
    spec.N.push_back(load(root / ("N" + std::to_string(k) + ".mtx")));
    spec.H.push_back(load(root / ("H" + std::to_string(k) + ".mtx")));
  }
  spec.pi_scale = std::stod(get("pi_scale"));
  spec.F = matrix_market_read((root / "F.mtx").string()).dense();
  spec.T = matrix_market_read((root / "T.mtx").string()).dense();
  spec.G = matrix_market_read((root / "G.mtx").string()).dense();
  if (fs::exists(root / "Y.mtx")) spec.Y = matrix_market_read((root / "Y.mtx").string()).dense();
  spec.validate();
  return spec;
}

ProblemSpec build_problem(const ProblemOptions& o) {
  if (o.problem == "files") return load_problem(o.dir);
  if (!o.dir.empty()) {
    throw CLI::ValidationError("--dir", "--dir is only valid with --problem files");
  }
  if (o.problem == "random-dense") {
    GeneratorParams p;
    p.n = o.n;
    p.m = o.m;
    p.ell = o.ell;
    p.beta = o.beta;
    p.seed = o.seed;
    return gen_random_dense(p);
  }
  if (o.problem == "advdiff") return gen_advdiff(o.n0, o.beta);
  return gen_multiterm_sylvester(o.n0, o.n0b > 0 ? o.n0b : o.n0, o.beta);
}

struct SolveOptions {
  Index window = 3;
  std::string inner = "adi";
  double tol_outer = 1e-10;
  double eta = 1e-3;
  double tol_trunc = 1e-10;
  Index max_col = 0;
  Index max_iter = 50;
  Index part_size = 0;
  std::string mode;
  std::string out = "run";
  int threads = 1;
  bool dynamic_trunc = true;
};

void write_trace(const std::string& path, const IterationTrace& trace, bool dense) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  f << "iter,scaled_residual,rank,inner_steps,elapsed_s,extrapolated\n";
  for (const TraceRecord& r : trace.records) {
    f << r.iter << ',' << fmt(r.scaled_residual) << ',';
    if (!dense) f << r.rank;
    f << ',' << r.inner_steps << ',' << fmt(r.elapsed_s) << ','
      << (r.extrapolated ? 1 : 0) << '\n';
  }
  if (!f) throw Error(ErrorKind::Io, "error while writing '" + path + "'");
}

void write_summary(const std::string& path, SolveStatus status,
                   const IterationTrace& trace, bool dense, double wall) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  const TraceRecord* last = trace.records.empty() ? nullptr : &trace.records.back();
  f << "status = " << to_string(status) << '\n'
    << "iters = " << trace.records.size() << '\n'
    << "final_residual = " << (last ? fmt(last->scaled_residual) : "0") << '\n'
    << "final_rank = ";
  if (!dense) f << (last ? last->rank : 0);
  f << '\n' << "wall_s = " << fmt(wall) << '\n';
  if (!f) throw Error(ErrorKind::Io, "error while writing '" + path + "'");
}

int cmd_solve(const ProblemOptions& po, const SolveOptions& so, bool inner_given,
              bool part_given, std::ostream& out) {
  std::string family = po.problem;
  if (family == "files" && !po.dir.empty()) {
    const auto kv = read_key_values(fs::path(po.dir) / "manifest");
    const auto it = kv.find("problem");
    if (it != kv.end()) family = it->second;
  }
  const std::string mode =
      !so.mode.empty() ? so.mode : (family == "random-dense" ? "dense" : "lowrank");
  const bool dense = mode == "dense";
  if (dense && (inner_given || part_given)) {
    throw CLI::ValidationError("--mode", "--inner and --part-size apply to --mode lowrank only");
  }
  const ProblemSpec spec = build_problem(po);

  SolverConfig c;
  c.rre_enabled = so.window > 0;
  c.w = so.window;
  c.tau_outer = so.tol_outer;
  c.eta = so.eta;
  c.tau_trunc = so.tol_trunc;
  c.max_col = so.max_col > 0 ? so.max_col : kNoRankCap;
  c.k_max = so.max_iter;
  c.inner = so.inner == "eksm" ? InnerMethod::Eksm : InnerMethod::Adi;
  c.part_size = so.part_size;
  c.threads = so.threads;
  c.dynamic_trunc = so.dynamic_trunc;
  c.seed = po.seed;

  const auto start = std::chrono::steady_clock::now();
  IterationTrace trace;
  SolveStatus status;
  try {
    if (dense) {
      DenseSolveResult r = stationary_dense_solve(spec, c);
      trace = std::move(r.trace);
      status = r.status;
    } else {
      LowRankSolveResult r = nonstationary_lowrank_solve(spec, c);
      trace = std::move(r.trace);
      status = r.status;
    }
  } catch (const DivergedError& e) {
    trace = e.trace();
    status = SolveStatus::Diverged;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_trace(so.out + ".trace.csv", trace, dense);
  write_summary(so.out + ".summary", status, trace, dense, wall);
  out << "status " << to_string(status) << ", " << trace.records.size()
      << " iterations, scaled residual "
      << (trace.records.empty() ? 0.0 : trace.records.back().scaled_residual) << '\n';
  switch (status) {
    case SolveStatus::Converged: return 0;
    case SolveStatus::MaxIter: return 2;
    case SolveStatus::Diverged: return 3;
  }
  return 1;
}

int cmd_gen(const ProblemOptions& po, const std::string& dir, std::ostream& out) {
  const ProblemSpec spec = build_problem(po);
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + dir + "': " + ec.message());
  matrix_market_write((root / "A.mtx").string(), spec.A);
  matrix_market_write((root / "B.mtx").string(), spec.B);
  for (std::size_t k = 0; k < spec.N.size(); ++k) {
    const std::string idx = std::to_string(k + 1);
    matrix_market_write((root / ("N" + idx + ".mtx")).string(), spec.N[k]);
    matrix_market_write((root / ("H" + idx + ".mtx")).string(), spec.H[k]);
  }
  matrix_market_write((root / "F.mtx").string(), spec.F);
  matrix_market_write((root / "T.mtx").string(), spec.T);
  matrix_market_write((root / "G.mtx").string(), spec.G);
  if (spec.Y) matrix_market_write((root / "Y.mtx").string(), *spec.Y);

  std::ofstream f(root / "manifest");
  f << "kind = " << (spec.kind == EquationKind::Lyapunov ? "lyapunov" : "sylvester") << '\n'
    << "problem = " << po.problem << '\n'
    << "ell = " << spec.ell() << '\n'
    << "beta = " << fmt(po.beta) << '\n'
    << "pi_scale = " << fmt(spec.pi_scale) << '\n'
    << "seed = " << po.seed << '\n'
    << "n = " << spec.n() << '\n'
    << "m = " << spec.m() << '\n'
    << "r = " << spec.rhs_rank() << '\n';
  if (!f) throw Error(ErrorKind::Io, "error while writing the manifest in '" + dir + "'");
  out << "wrote " << dir << '\n';
  return 0;
}

int cmd_spectrum(const ProblemOptions& po, std::ostream& out) {
  const ProblemSpec spec = build_problem(po);
  const oracles::IterationMatrix g = oracles::iteration_spectrum(spec);
  const std::size_t count = std::min<std::size_t>(20, g.moduli.size());
  for (std::size_t i = 0; i < count; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", g.moduli[i]);
    out << buf << '\n';
  }
  return 0;
}

// Turns the entries of a --config file into "--key=value" arguments placed
// before the command-line ones; keys already given as flags are skipped.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty() || args.front() != "solve") return args;
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const std::string& a : rest) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> out{rest.front()};
  for (const auto& [key, value] : read_key_values(path)) {
    if (key == "config") throw Error(ErrorKind::Parse, "config files cannot include others");
    if (!given(key)) out.push_back("--" + key + "=" + value);
  }
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Multi-term Sylvester and Lyapunov-plus-positive solvers", "mtsylv"};
  app.require_subcommand(1);

  ProblemOptions solve_po;
  SolveOptions so;
  CLI::App* solve = app.add_subcommand("solve", "Run a solver and write trace and summary");
  std::string config_path;
  solve->add_option("--config", config_path, "Flat key = value file; flags take precedence");
  add_problem_options(solve, solve_po, true);
  solve->add_option("--window", so.window, "RRE window size, 0 disables RRE")
      ->check(CLI::NonNegativeNumber);
  CLI::Option* inner_opt = solve->add_option("--inner", so.inner, "Inner solver")
                               ->check(CLI::IsMember({"adi", "eksm"}));
  solve->add_option("--tol-outer", so.tol_outer, "Outer tolerance on the scaled residual");
  solve->add_option("--eta", so.eta, "Inner tolerance coupling");
  solve->add_option("--tol-trunc", so.tol_trunc, "Relative truncation tolerance");
  solve->add_option("--max-col", so.max_col, "Rank cap, 0 for none")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--max-iter", so.max_iter, "Maximal number of outer steps")
      ->check(CLI::PositiveNumber);
  CLI::Option* part_opt =
      solve->add_option("--part-size", so.part_size, "Rank of separated RHS parts, 0 for default")
          ->check(CLI::NonNegativeNumber);
  solve->add_option("--mode", so.mode, "dense or lowrank (default by problem)")
      ->check(CLI::IsMember({"dense", "lowrank"}));
  solve->add_option("--out", so.out, "Output prefix");
  solve->add_option("--threads", so.threads, "Threads for separated inner parts")
      ->check(CLI::PositiveNumber);
  solve->add_flag("--dynamic-trunc,!--static-trunc", so.dynamic_trunc,
                  "Couple the truncation tolerance to the residual (default on)");

  ProblemOptions gen_po;
  std::string gen_dir;
  CLI::App* gen = app.add_subcommand("gen", "Write a generated problem as Matrix Market files");
  add_problem_options(gen, gen_po, false);
  gen->add_option("--out", gen_dir, "Output directory")->required();

  ProblemOptions spec_po;
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "Print the leading eigenvalue moduli of the iteration matrix");
  add_problem_options(spectrum, spec_po, true);

  try {
    std::vector<std::string> argv_store{"mtsylv"};
    const std::vector<std::string> expanded = expand_config(args);
    argv_store.insert(argv_store.end(), expanded.begin(), expanded.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (solve->parsed()) {
      return cmd_solve(solve_po, so, inner_opt->count() > 0, part_opt->count() > 0, out);
    }
    if (gen->parsed()) return cmd_gen(gen_po, gen_dir, out);
    return cmd_spectrum(spec_po, out);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    const auto selected = app.get_subcommands();
    err << "error: " << e.what() << "\n\n"
        << (selected.empty() ? app.help() : selected.front()->help());
    return 1;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mtsylv
