// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mtsylv/cli.hpp"
#include "mtsylv/dense.hpp"
#include "mtsylv/error.hpp"
#include "mtsylv/inner.hpp"
#include "mtsylv/lowrank.hpp"
#include "mtsylv/oracles.hpp"
#include "mtsylv/problems.hpp"
#include "mtsylv/rre.hpp"
#include "mtsylv/solvers.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace mtsylv;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ProblemSpec without_coupling(const ProblemSpec& spec) {
  ProblemSpec s = spec;
  s.N.clear();
  s.H.clear();
  return s;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome o;
  double worst_bs = 0.0, worst_dense = 0.0, worst_lr = 0.0;
  for (int seed = 0; seed < 25; ++seed) {
    Rng rng(1000 + seed);
    const Index n = 2 + static_cast<Index>(rng.uniform() * 9);  // 2..10
    const Index m = 2 + static_cast<Index>(rng.uniform() * 7);  // 2..8
    const Index ell = static_cast<Index>(rng.uniform() * 4);    // 0..3
    const ProblemSpec spec = test::random_spec(rng, n, m, ell, 2, 0.4);
    const Matrix ref = oracles::direct_solve_vec(oracles::kron_assemble(spec));

    const ProblemSpec two = without_coupling(spec);
    const Matrix ref2 = oracles::direct_solve_vec(oracles::kron_assemble(two));
    const Matrix bs = dense_sylvester_solve(spec.A.dense(), spec.B.dense(), spec.rhs_dense());
    worst_bs = std::max(worst_bs, spectral_norm(bs - ref2));

    SolverConfig c;
    c.tau_outer = 1e-10;
    c.k_max = 500;
    c.seed = static_cast<std::uint64_t>(seed);
    const DenseSolveResult d = stationary_dense_solve(spec, c);
    const LowRankSolveResult l = nonstationary_lowrank_solve(spec, c);
    if (d.status != SolveStatus::Converged || l.status != SolveStatus::Converged) {
      o.pass = false;
      o.detail += " seed " + std::to_string(seed) + " did not converge;";
    }
    worst_dense = std::max(worst_dense, spectral_norm(d.X - ref));
    worst_lr = std::max(worst_lr, spectral_norm(l.X.dense() - ref));
  }
  o.pass = o.pass && worst_bs <= 1e-7 && worst_dense <= 1e-7 && worst_lr <= 1e-7;
  o.detail = "max err: bartels-stewart " + fmt("%.1e", worst_bs) + ", dense " +
             fmt("%.1e", worst_dense) + ", lowrank " + fmt("%.1e", worst_lr) + o.detail;
  return o;
}

// Distinct moduli d_1..d_k (mixed signs), rotated so N is not diagonal.
std::vector<double> distinct_moduli(Rng& rng, Index k) {
  std::vector<double> d;
  for (Index i = 0; i < k; ++i) {
    const double mod = 0.15 + 0.7 * (static_cast<double>(i) + 0.2 + 0.6 * rng.uniform()) /
                                  static_cast<double>(k);
    d.push_back(rng.uniform() < 0.5 ? -mod : mod);
  }
  return d;
}

Outcome rre_exactness() {
  Outcome o;
  int total_lt = 0, ok_lt = 0, total_eq = 0, ok_eq = 0;
  double worst_eq = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    for (Index w = 2; w <= 5; ++w) {
      for (Index d = 1; d <= w; ++d) {
        Rng rng(2000 + 100 * seed + 10 * w + d);
        std::vector<double> mod = distinct_moduli(rng, d);
        // Each modulus appears twice so the error subspace is not trivial.
        std::vector<double> diag;
        for (double v : mod) diag.insert(diag.end(), {v, v});
        const ProblemSpec spec = test::diagonal_spec(rng, diag, 3, 2, true);
        SolverConfig c;
        c.w = w;
        c.tau_outer = 1e-14;
        c.k_max = w;
        const DenseSolveResult r = stationary_dense_solve(spec, c);
        const double res = r.trace.records.at(static_cast<std::size_t>(w - 1)).scaled_residual;
        const bool ok = res < 1e-8;
        if (d < w) {
          ++total_lt;
          ok_lt += ok;
        } else {
          ++total_eq;
          ok_eq += ok;
          worst_eq = std::max(worst_eq, res);
        }
      }
    }
  }
  o.pass = ok_lt == total_lt && ok_eq == total_eq;
  o.detail = "d <= w-1: " + std::to_string(ok_lt) + "/" + std::to_string(total_lt) +
             ", d = w: " + std::to_string(ok_eq) + "/" + std::to_string(total_eq) +
             " (worst " + fmt("%.1e", worst_eq) + ")";
  return o;
}

Outcome rate_reproduction() {
  Outcome o;
  const Index w = 3;
  int plain_ok = 0, rre_ok = 0;
  std::string worst;
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(3000 + seed);
    const double l1 = 0.5 + 0.3 * rng.uniform();
    std::vector<double> d{l1, l1 * (0.5 + 0.3 * rng.uniform())};
    while (d.size() < 10) d.push_back(l1 * (rng.uniform() - 0.5));
    const ProblemSpec spec = test::diagonal_spec(rng, d, 3, 2, true);
    const std::vector<double> moduli = oracles::iteration_spectrum(spec).moduli;
    const double lam1 = moduli.front();
    const double lamw = moduli[static_cast<std::size_t>(w - 1) * 3];  // multiplicity m = 3

    SolverConfig plain;
    plain.rre_enabled = false;
    plain.k_max = 15;
    plain.tau_outer = 1e-30;
    const DenseSolveResult plain_run = stationary_dense_solve(spec, plain);
    const auto& pr = plain_run.trace.records;
    const double rate = std::pow(pr[14].scaled_residual / pr[4].scaled_residual, 0.1);
    plain_ok += std::abs(rate - lam1) <= 0.15 * lam1;

    SolverConfig c;
    c.w = w;
    c.tau_outer = 1e-12;
    c.k_max = 60;
    const DenseSolveResult rre_run = stationary_dense_solve(spec, c);
    const auto& rr = rre_run.trace.records;
    std::vector<double> at_cycle{1.0};
    for (const TraceRecord& r : rr) {
      if (r.extrapolated) at_cycle.push_back(r.scaled_residual);
    }
    const auto cycles = static_cast<double>(at_cycle.size() - 1);
    const double per_cycle = std::pow(at_cycle.back() / at_cycle.front(), 1.0 / cycles);
    const double bound = std::pow(lamw + 0.1, static_cast<double>(w));
    const bool ok = per_cycle <= bound;
    rre_ok += ok;
    if (!ok) {
      worst += " seed " + std::to_string(seed) + ": " + fmt("%.3g", per_cycle) + " > " +
               fmt("%.3g", bound) + ";";
    }
  }
  o.pass = plain_ok == 10 && rre_ok == 10;
  o.detail = "plain rate within 15%: " + std::to_string(plain_ok) +
             "/10, per-cycle bound: " + std::to_string(rre_ok) + "/10" + worst;
  return o;
}

Outcome divergence_cure() {
  Outcome o;
  Rng rng(4000);
  const ProblemSpec spec = test::diagonal_spec(rng, {1.05, 0.5, 0.1}, 3, 2, true);
  SolverConfig plain;
  plain.rre_enabled = false;
  plain.k_max = 1000;
  bool diverged = false;
  Index plain_steps = 0;
  try {
    const DenseSolveResult r = stationary_dense_solve(spec, plain);
    diverged = r.status == SolveStatus::Diverged;
    plain_steps = static_cast<Index>(r.trace.records.size());
  } catch (const DivergedError& e) {
    diverged = true;
    plain_steps = static_cast<Index>(e.trace().records.size());
  }
  SolverConfig c;
  c.w = 3;
  c.tau_outer = 1e-10;
  c.k_max = 50;
  const DenseSolveResult r = stationary_dense_solve(spec, c);
  const bool converged = r.status == SolveStatus::Converged &&
                         r.trace.records.back().scaled_residual <= 1e-10;
  o.pass = diverged && converged;
  o.detail = std::string("plain ") + (diverged ? "diverged" : "did not diverge") + " after " +
             std::to_string(plain_steps) + " steps; w = 3 " + to_string(r.status) + " in " +
             std::to_string(r.trace.records.size()) + " steps";
  return o;
}

Outcome advdiff_trend() {
  Outcome o;
  const ProblemSpec spec = gen_advdiff(13, 0.8);
  SolverConfig c;
  c.inner = InnerMethod::Adi;
  c.tau_outer = 1e-10;
  c.max_col = 120;
  c.k_max = 300;
  c.w = 5;
  const LowRankSolveResult rre = nonstationary_lowrank_solve(spec, c);
  c.rre_enabled = false;
  LowRankSolveResult plain;
  bool plain_diverged = false;
  Index plain_steps = 0, plain_rank = 0;
  try {
    plain = nonstationary_lowrank_solve(spec, c);
    plain_steps = static_cast<Index>(plain.trace.records.size());
    plain_rank = plain.X.rank();
  } catch (const DivergedError& e) {
    plain_diverged = true;
    plain_steps = static_cast<Index>(e.trace().records.size());
    plain_rank = e.trace().records.back().rank;
  }
  const auto rre_steps = static_cast<Index>(rre.trace.records.size());
  // A plain run that never reaches tau_outer needs more than k_max steps.
  const Index plain_needed = (!plain_diverged && plain.status == SolveStatus::Converged)
                                 ? plain_steps
                                 : c.k_max + 1;
  o.pass = rre.status == SolveStatus::Converged && rre_steps < plain_needed &&
           rre.X.rank() <= 120 && plain_rank <= 120;
  o.detail = std::string("w = 5: ") + to_string(rre.status) + " in " +
             std::to_string(rre_steps) + " steps, rank " + std::to_string(rre.X.rank()) +
             "; no RRE: " + (plain_diverged ? "diverged" : to_string(plain.status)) + " after " +
             std::to_string(plain_steps) + " steps, rank " + std::to_string(plain_rank);
  return o;
}

Outcome lowrank_rre_agreement() {
  Outcome o;
  double worst = 0.0;
  Rng rng(6000);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 5 + static_cast<Index>(rng.uniform() * 56);
    const Index m = 5 + static_cast<Index>(rng.uniform() * 56);
    const Index w = 1 + static_cast<Index>(rng.uniform() * 5);
    std::vector<LowRankTriple> win;
    std::vector<Matrix> dense;
    for (Index i = 0; i <= w; ++i) {
      const Index z = 1 + static_cast<Index>(rng.uniform() * 6);
      win.push_back(test::random_triple(rng, n, m, z));
      dense.push_back(win.back().dense());
    }
    const Matrix ref = extrapolate_dense(dense);
    const Matrix got = extrapolate_lowrank(win, 1e-12).dense();
    worst = std::max(worst, spectral_norm(got - ref));
  }
  o.pass = worst <= 1e-9;
  o.detail = "max spectral difference " + fmt("%.1e", worst);
  return o;
}

Outcome truncation_contract() {
  Outcome o;
  Rng rng(7000);
  int bound_ok = 0, idem_ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 5 + static_cast<Index>(rng.uniform() * 40);
    const Index m = 5 + static_cast<Index>(rng.uniform() * 40);
    const Index z = 1 + static_cast<Index>(rng.uniform() * 8);
    Matrix D = test::random_matrix(rng, z, z);
    for (Index i = 0; i < z; ++i) D.row(i) *= std::pow(10.0, -static_cast<double>(i));
    const LowRankTriple x(test::random_matrix(rng, n, z), D, test::random_matrix(rng, m, z));
    const double tau = std::pow(10.0, -1.0 - 5.0 * rng.uniform());
    const LowRankTriple t = truncate(x, tau);
    const Matrix X = x.dense();
    const double sigma1 = svd(X).S(0);
    bound_ok += spectral_norm(X - t.dense()) <= sigma1 * tau;
    const LowRankTriple tt = truncate(t, tau);
    idem_ok += tt.rank() == t.rank() &&
               spectral_norm(tt.dense() - t.dense()) <= 1e-12 * spectral_norm(t.dense());
  }
  const LowRankTriple zero = truncate(LowRankTriple::zero(7, 4), 1e-8);
  const LowRankTriple zcore(test::random_matrix(rng, 7, 2), Matrix::Zero(2, 2),
                            test::random_matrix(rng, 4, 2));
  const LowRankTriple zt = truncate(zcore, 1e-8);
  const bool zero_ok = zero.rank() == 0 && zero.rows() == 7 && zero.cols() == 4 &&
                       zt.rank() == 0 && zt.rows() == 7 && zt.cols() == 4;
  o.pass = bound_ok == 50 && idem_ok == 50 && zero_ok;
  o.detail = "error bound " + std::to_string(bound_ok) + "/50, idempotent " +
             std::to_string(idem_ok) + "/50, zero rank " + (zero_ok ? "ok" : "wrong");
  return o;
}

Outcome residual_estimator() {
  Outcome o;
  Rng rng(8000);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 5 + static_cast<Index>(rng.uniform() * 56);
    const Index m = 5 + static_cast<Index>(rng.uniform() * 56);
    const Index ell = 1 + static_cast<Index>(rng.uniform() * 3);
    const ProblemSpec spec = test::random_spec(rng, n, m, ell, 2);
    const LowRankTriple x = test::random_triple(rng, n, m, 1 + trial % 5);
    const ResidualEstimate e = estimate_residual_spectral_norm(spec, x, 1e-3, 50, trial);
    const double ref = test::power_norm(spec.rhs_dense() + apply_operator(spec, x.dense()));
    worst = std::max(worst, std::abs(e.value - ref) / ref);
  }
  o.pass = worst <= 0.02;
  o.detail = "max relative deviation " + fmt("%.1e", worst);
  return o;
}

Outcome inner_solvers() {
  Outcome o;
  Rng rng(9000);
  int ok[2] = {0, 0};
  double worst_res[2] = {0.0, 0.0}, worst_dev[2] = {0.0, 0.0};
  for (int trial = 0; trial < 10; ++trial) {
    // Sizes where EKSM stops before its space fills up; a saturated space
    // leaves both residuals at roundoff, where 10% agreement is noise.
    const Index n = 30 + static_cast<Index>(rng.uniform() * 11);
    const Index m = 25 + static_cast<Index>(rng.uniform() * 6);
    const Index r = 1 + static_cast<Index>(rng.uniform() * 2);
    const Matrix A = test::random_stable(rng, n);
    const Matrix B = test::random_stable(rng, m);
    const LowRankTriple rhs = test::random_triple(rng, n, m, r);
    const double rhs_norm = spectral_norm(rhs.dense());
    for (int k = 0; k < 2; ++k) {
      const InnerResult res =
          k == 0 ? lr_adi_solve(A, B, rhs, heuristic_shifts(A, B, 20, 10, 10, trial), 1e-10, 200)
                 : eksm_solve(A, B, rhs, 1e-10, 100);
      const Matrix X = res.solution.dense();
      const double dense_res = spectral_norm(A * X + X * B + rhs.dense());
      const double scaled = res.residual_norm / rhs_norm;
      const double dev = std::abs(res.residual_norm - dense_res) / dense_res;
      worst_res[k] = std::max(worst_res[k], scaled);
      worst_dev[k] = std::max(worst_dev[k], dev);
      ok[k] += res.converged && scaled <= 1e-9 && dev <= 0.1;
    }
  }
  double worst_full = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 4 + trial, m = 3 + trial;
    const Matrix A = test::random_stable(rng, n);
    const Matrix B = test::random_stable(rng, m);
    const LowRankTriple rhs = test::random_triple(rng, n, m, 2);
    ProblemSpec spec;
    spec.A = A;
    spec.B = B;
    spec.F = rhs.left();
    spec.T = rhs.core();
    spec.G = rhs.right();
    const Matrix ref = oracles::direct_solve_vec(oracles::kron_assemble(spec));
    const InnerResult res = eksm_solve(A, B, rhs, 1e-14, 100);
    worst_full = std::max(worst_full, spectral_norm(res.solution.dense() - ref) / spectral_norm(ref));
  }
  o.pass = ok[0] == 10 && ok[1] == 10 && worst_full <= 1e-9;
  o.detail = "adi " + std::to_string(ok[0]) + "/10 (res " + fmt("%.1e", worst_res[0]) +
             ", dev " + fmt("%.1e", worst_dev[0]) + "), eksm " + std::to_string(ok[1]) +
             "/10 (res " + fmt("%.1e", worst_res[1]) + ", dev " + fmt("%.1e", worst_dev[1]) +
             "), eksm full space " + fmt("%.1e", worst_full);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    rows.push_back(f);
  }
  return rows;
}

Outcome cli_round_trip() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "mtsylv_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) {
    out.str("");
    err.str("");
    return run_cli(args, out, err);
  };
  const std::string header = "iter,scaled_residual,rank,inner_steps,elapsed_s,extrapolated";
  const std::vector<std::vector<std::string>> problems{
      {"--problem", "random-dense", "--n", "10", "--m", "8", "--ell", "2", "--beta", "0.4",
       "--seed", "5", "--mode", "lowrank"},
      {"--problem", "advdiff", "--n0", "6", "--beta", "0.6"},
      {"--problem", "multiterm-sylv", "--n0", "5", "--n0b", "4", "--beta", "0.5", "--inner",
       "eksm"},
  };
  int ok = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const std::string g = (dir / ("g" + std::to_string(i))).string();
    std::vector<std::string> gen{"gen"}, mem{"solve"};
    std::vector<std::string> files{"solve", "--problem", "files", "--dir", g};
    for (std::size_t j = 0; j < problems[i].size(); j += 2) {
      const std::string& key = problems[i][j];
      const bool solver_flag = key == "--mode" || key == "--inner";
      if (!solver_flag) gen.insert(gen.end(), {key, problems[i][j + 1]});
      if (solver_flag || key == "--seed") files.insert(files.end(), {key, problems[i][j + 1]});
      mem.insert(mem.end(), {key, problems[i][j + 1]});
    }
    gen.insert(gen.end(), {"--out", g});
    mem.insert(mem.end(), {"--out", (dir / "mem").string()});
    files.insert(files.end(), {"--out", (dir / "files").string()});
    if (run(gen) != 0) {
      o.detail += " gen failed: " + err.str();
      continue;
    }
    const int cm = run(mem);
    const int cf = run(files);
    const auto a = csv_rows(dir / "mem.trace.csv");
    const auto b = csv_rows(dir / "files.trace.csv");
    bool same = cm == 0 && cf == 0 && a.size() == b.size() && a.size() > 1 &&
                slurp(dir / "mem.trace.csv").rfind(header + "\n", 0) == 0;
    for (std::size_t r = 1; same && r < a.size(); ++r) {
      if (a[r].size() != 6 || b[r].size() != 6) {
        same = false;
        break;
      }
      for (std::size_t f = 0; f < 6; ++f) {
        if (f == 4) continue;  // elapsed_s is wall time
        if (a[r][f].empty() || b[r][f].empty()) {
          same = same && a[r][f] == b[r][f];
          continue;
        }
        const double x = std::stod(a[r][f]), y = std::stod(b[r][f]);
        const double d = std::abs(x - y);
        worst = std::max(worst, d);
        same = same && d <= 1e-12;
      }
    }
    ok += same;
  }
  const int missing = run({"solve"});
  const int maxit = run({"solve", "--problem", "random-dense", "--n", "8", "--m", "6", "--ell",
                         "1", "--beta", "0.5", "--max-iter", "1", "--out",
                         (dir / "maxit").string()});
  const int diverged = run({"solve", "--problem", "random-dense", "--n", "8", "--m", "6",
                            "--ell", "3", "--beta", "20", "--window", "0", "--out",
                            (dir / "div").string()});
  const int converged = run({"solve", "--problem", "random-dense", "--n", "8", "--m", "6",
                             "--ell", "1", "--beta", "0.5", "--out", (dir / "conv").string()});
  const bool header_ok = slurp(dir / "conv.trace.csv").rfind(header + "\n", 0) == 0;
  const bool codes_ok = missing == 1 && maxit == 2 && diverged == 3 && converged == 0;
  fs::remove_all(dir);
  o.pass = ok == static_cast<int>(problems.size()) && codes_ok && header_ok;
  o.detail = "round trips " + std::to_string(ok) + "/" + std::to_string(problems.size()) +
             " (max field diff " + fmt("%.1e", worst) + "), exit codes " +
             std::to_string(missing) + "/" + std::to_string(maxit) + "/" +
             std::to_string(diverged) + "/" + std::to_string(converged) + ", header " +
             (header_ok ? "exact" : "wrong") + o.detail;
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", 10, oracle_equivalence},
      {2, "RRE exactness", 5, rre_exactness},
      {3, "rate reproduction", 10, rate_reproduction},
      {4, "divergence cure", 5, divergence_cure},
      {5, "advection-diffusion trend", 60, advdiff_trend},
      {6, "low-rank/dense RRE agreement", 5, lowrank_rre_agreement},
      {7, "truncation contract", 2, truncation_contract},
      {8, "residual estimator", 5, residual_estimator},
      {9, "inner solvers", 20, inner_solvers},
      {10, "CLI round trip", 10, cli_round_trip},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.budget_s) + " s budget";
    }
    failures += !o.pass;
    std::printf("criterion %2d: %s  %-30s %7.2f s  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
