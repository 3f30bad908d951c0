// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit when a
// gating criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rotrook/bench.hpp"
#include "rotrook/matgen.hpp"
#include "rotrook/nullsolve.hpp"
#include "rotrook/rotfact.hpp"

using namespace rotrook;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double metric(const std::vector<SummaryRow>& rows, const std::string& method,
              std::size_t n, const std::string& name, std::optional<double> cond = {}) {
  for (const auto& r : rows)
    if (r.method == method && r.n == n && r.metric == name && (!cond || r.cond == cond))
      return r.mean;
  throw std::runtime_error("missing row " + method + " " + name);
}

BenchOptions options(std::vector<std::size_t> sizes, std::size_t trials,
                     std::vector<Method> methods) {
  BenchOptions o;
  o.sizes = std::move(sizes);
  o.trials = trials;
  o.methods = std::move(methods);
  o.timing = false;
  return o;
}

const std::string rook = "rotated_rook";
const std::string bk = "bunch_kaufman";

Outcome reconstruction_accuracy() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_factor_bench(options({100}, 1000, {Method::rotated_rook}));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double m = metric(rows, rook, 100, "recon_err");
  return {m >= 1.5e-14 && m <= 7e-14 && secs < 120.0,
          fmt("mean=%.4e in [1.5e-14, 7e-14], runtime=%.1fs < 120s", m, secs)};
}

Outcome accuracy_advantage() {
  const auto rows = run_factor_bench(
      options({50, 100}, 1000, {Method::rotated_rook, Method::bunch_kaufman}));
  const double r100 = metric(rows, rook, 100, "recon_err") / metric(rows, bk, 100, "recon_err");
  const double r50 = metric(rows, rook, 50, "recon_err") / metric(rows, bk, 50, "recon_err");
  return {r100 <= 0.75 && r50 <= 0.80,
          fmt("ratio n=100: %.3f <= 0.75, n=50: %.3f <= 0.80", r100, r50)};
}

Outcome condition_insensitivity() {
  BenchOptions o = options({100}, 1000, {Method::rotated_rook});
  o.conds = {1e2, 1e6, 1e10};
  const auto rows = run_cond_bench(o);
  std::vector<double> m;
  for (double c : o.conds) m.push_back(metric(rows, rook, 100, "recon_err", c));
  const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
  const double spread = (*hi - *lo) / *lo;
  return {spread < 0.10, fmt("means %.3e %.3e %.3e, spread=%.2f%% < 10%%", m[0], m[1], m[2],
                             100 * spread)};
}

Outcome solution_scaling() {
  BenchOptions o = options({100}, 1000, {Method::rotated_rook});
  o.conds = {1e2, 1e4, 1e6};
  const auto rows = run_cond_bench(o);
  std::vector<double> lc, le, lsq;
  for (double c : o.conds) {
    const double e = metric(rows, rook, 100, "solution_err", c);
    lc.push_back(std::log10(c));
    le.push_back(std::log10(e));
    lsq.push_back(2 * std::log10(e));
    std::printf("  info: cond=%.0e mean ||x - x_exact||_2 = %.3e, squared = %.3e\n", c, e,
                e * e);
  }
  const double at6 = metric(rows, rook, 100, "solution_err", 1e6);
  const double s = oracle::slope(lc, le);
  std::printf("  info: slope of squared error = %.2f\n", oracle::slope(lc, lsq));
  return {at6 >= 1e-10 && at6 <= 1e-8 && std::abs(s - 1.0) <= 0.3,
          fmt("mean at 1e6=%.3e in [1e-10, 1e-8], slope=%.2f in 1 +- 0.3", at6, s)};
}

Outcome growth_bound() {
  const auto rows = run_growth_check(options({10, 50, 100}, 10000, {Method::rotated_rook}));
  std::size_t exceed = 0;
  std::string maxes;
  for (const auto& r : rows) {
    exceed += r.exceedances;
    maxes += fmt(" n=%g max=%.2f", double(r.n), r.max_rho);
  }
  bool ordered = true;
  for (std::size_t n = 1; n <= 200; ++n)
    ordered = ordered && growth_bound_tight(n) <= growth_bound_analytic(n);
  return {exceed == 0 && ordered,
          "exceedances=" + std::to_string(exceed) + maxes +
              (ordered ? ", tight <= analytic for n <= 200" : ", tight > analytic somewhere")};
}

Outcome rotation_invariants() {
  Rng rng(2718);
  double worst_tr = 0, worst_det = 0, worst_b12 = 0, worst_inflate = 0;
  for (int i = 0; i < 100000; ++i) {
    const double sc = std::ldexp(1.0, static_cast<int>(rng.next_u32() % 41) - 20);
    const double a11 = sc * rng.uniform_pm1(), a12 = sc * rng.uniform_pm1(),
                 a22 = sc * rng.uniform_pm1();
    const double scale = std::max({std::abs(a11), std::abs(a12), std::abs(a22)});
    PackedSymMatrix a(2, {a11, a12, a22});
    auto f = RotatedFactorization::start(a, 0.0);
    apply_rotation(f, 0, compute_rotation(a11, a12, a22));
    const double b11 = f.packed.upper(0, 0), b12 = f.packed.upper(0, 1),
                 b22 = f.packed.upper(1, 1);
    worst_tr = std::max(worst_tr, std::abs((b11 + b22) - (a11 + a22)) / scale);
    worst_det = std::max(worst_det,
                         std::abs(b11 * b22 - (a11 * a22 - a12 * a12)) / (scale * scale));
    worst_b12 = std::max(worst_b12, std::abs(b12) / scale);
    worst_inflate = std::max(worst_inflate, (scale - std::abs(b11)) / scale);
  }
  return {worst_tr <= 1e-13 && worst_det <= 1e-13 && worst_b12 <= 1e-14 &&
              worst_inflate <= 1e-14,
          fmt("trace %.1e, det %.1e, |b12| %.1e, pivot shortfall %.1e (scale-relative)",
              worst_tr, worst_det, worst_b12, worst_inflate)};
}

Outcome null_space() {
  const std::size_t n = 50, r = 25, trials = 500;
  std::size_t rank_ok = 0;
  double worst = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(static_cast<std::uint32_t>(7000 + t));
    const auto p = spectral_rank_deficient(rng, n, r);
    const auto nf = compute_null_basis(factorize(p.a).factors);
    rank_ok += nf.rank() == r;
    const std::size_t m = nf.nullity();
    if (m == 0) continue;
    const auto basis = nf.null_basis();
    double amn = 0, nn = 0;
    std::vector<double> col(n);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        col[i] = basis[i * m + j];
        nn += col[i] * col[i];
      }
      const auto y = sym_matvec(p.a, apply_M(nf.factors(), col));
      for (double v : y) amn += v * v;
    }
    worst = std::max(worst, std::sqrt(amn) / (p.a.frobenius_norm() * std::sqrt(nn)));
  }
  const double frac = double(rank_ok) / trials;
  return {worst <= 1e-10 && frac >= 0.99,
          fmt("max ||AMN||/(||A|| ||N||)=%.2e <= 1e-10, rank match %.1f%% >= 99%%", worst,
              100 * frac)};
}

Outcome lsq_oracle() {
  double worst_x = 0, worst_res = 0, worst_orth = 0;
  for (std::size_t t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 49;
    Rng rng(static_cast<std::uint32_t>(9000 + t));
    const auto p = spectral_rank_deficient(rng, n, n / 2);
    const auto nf = compute_null_basis(factorize(p.a).factors);
    const DenseVector x = solve_min_norm_lsq(nf, p.b).x;
    const auto dense = p.a.to_dense();
    const auto want = oracle::pinv_solve(dense, n, p.b, 1e-10);
    worst_x = std::max(worst_x, oracle::dist(x, want) / oracle::norm(want));

    DenseVector res = sym_matvec(p.a, x);
    for (std::size_t i = 0; i < n; ++i) res[i] = p.b[i] - res[i];
    const double af = p.a.frobenius_norm();
    worst_res = std::max(worst_res,
                         oracle::norm(sym_matvec(p.a, res)) / (af * af * oracle::norm(p.b)));

    const std::size_t m = nf.nullity();
    const auto basis = nf.null_basis();
    const DenseVector mtx = apply_Mt(nf.factors(), x);
    double orth = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += basis[i * m + j] * mtx[i];
      orth += dot * dot;
    }
    worst_orth = std::max(worst_orth, std::sqrt(orth) / (oracle::frobenius(basis) *
                                                         oracle::norm(x)));
  }
  return {worst_x <= 1e-8 && worst_res <= 1e-10 && worst_orth <= 1e-10,
          fmt("oracle distance %.2e, residual optimality %.2e, null orthogonality %.2e",
              worst_x, worst_res, worst_orth)};
}

Outcome branch_consistency() {
  double worst = 0;
  for (std::size_t r : {19u, 21u}) {
    for (std::uint32_t t = 0; t < 100; ++t) {
      Rng rng(11000 + 100 * static_cast<std::uint32_t>(r) + t);
      const auto p = spectral_rank_deficient(rng, 40, r);
      const auto nf = compute_null_basis(factorize(p.a).factors);
      const auto lo = solve_min_norm_lsq(nf, p.b, {RankBranch::low}).x;
      const auto hi = solve_min_norm_lsq(nf, p.b, {RankBranch::high}).x;
      worst = std::max(worst, oracle::dist(lo, hi) / oracle::norm(lo));
    }
  }
  return {worst <= 1e-10, fmt("max relative disagreement %.2e <= 1e-10", worst)};
}

Outcome timing_parity() {
  BenchOptions o = options({500}, 10, {Method::rotated_rook, Method::bunch_kaufman});
  o.timing = true;
  const auto rows = run_factor_bench(o);
  const double tr = metric(rows, rook, 500, "time"), tb = metric(rows, bk, 500, "time");
  return {tr / tb <= 1.3, fmt("rook %.3es / bk %.3es = %.2f <= 1.3 (informational)", tr, tb,
                              tr / tb)};
}

Outcome determinism() {
  auto render = [](const std::vector<SummaryRow>& rows) {
    std::ostringstream s;
    write_csv(s, rows);
    return s.str();
  };
  std::vector<std::function<std::string(const BenchOptions&)>> commands{
      [&](const BenchOptions& o) { return render(run_factor_bench(o)); },
      [&](const BenchOptions& o) { return render(run_cond_bench(o)); },
      [&](const BenchOptions& o) {
        BenchOptions l = o;
        l.methods = {Method::rotated_rook};
        return render(run_lsq_bench(l));
      },
      [&](const BenchOptions& o) { return render(growth_summary(run_growth_check(o))); },
  };
  BenchOptions o = options({10, 37}, 40, {Method::rotated_rook, Method::bunch_kaufman});
  o.conds = {1e3, 1e9};
  o.seed = 99;
  std::size_t same = 0;
  for (const auto& cmd : commands) {
    const std::string first = cmd(o), again = cmd(o);
    BenchOptions par = o;
    par.parallel = true;
    par.threads = 4;
    same += first == again && first == cmd(par) && !first.empty();
  }
  return {same == commands.size(),
          std::to_string(same) + "/" + std::to_string(commands.size()) +
              " commands identical across runs and serial/parallel"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
    bool gating;
  };
  const Criterion criteria[] = {
      {"reconstruction accuracy", reconstruction_accuracy, true},
      {"accuracy advantage over Bunch-Kaufman", accuracy_advantage, true},
      {"condition-number insensitivity", condition_insensitivity, true},
      {"solution-error scaling", solution_scaling, true},
      {"growth bound", growth_bound, true},
      {"rotation invariants", rotation_invariants, true},
      {"null-space correctness", null_space, true},
      {"least-squares oracle equivalence", lsq_oracle, true},
      {"branch consistency", branch_consistency, true},
      {"timing parity", timing_parity, false},
      {"determinism", determinism, true},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("C%d %s %s: %s\n", index, out.pass ? "PASS" : "FAIL", c.name,
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass && c.gating) ++failed;
  }
  std::printf("%d gating criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
