#include "rotrook/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

#include "rotrook/bunch_kaufman.hpp"
#include "rotrook/matgen.hpp"
#include "rotrook/nullsolve.hpp"
#include "rotrook/rotfact.hpp"
#include "rotrook/xprec.hpp"

namespace rotrook {

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::rotated_rook: return "rotated_rook";
    case Method::bunch_kaufman: return "bunch_kaufman";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "rotated_rook" || name == "rook") return Method::rotated_rook;
  if (name == "bunch_kaufman" || name == "bk") return Method::bunch_kaufman;
  return std::nullopt;
}

double RunningStats::std_dev() const noexcept { return std::sqrt(variance()); }

std::vector<std::size_t> default_sizes(bool large) {
  std::vector<std::size_t> s{10, 50, 100};
  if (large) {
    s.push_back(500);
    s.push_back(1000);
  }
  return s;
}

std::vector<double> default_conds() { return {1e2, 1e4, 1e6, 1e8, 1e10}; }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint32_t trial_seed(std::uint32_t base, std::size_t index) {
  return base + static_cast<std::uint32_t>(index);
}

double diff_norm(const DenseVector& x, const DenseVector& y) {
  DenseVector d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  return norm2(d);
}

// Runs body(i) for i in [0, count) and returns the results in index order.
// With parallel set, trials are handed out to worker threads one at a time;
// the first failure (by trial index) is rethrown after all workers stop.
template <class R, class Body>
std::vector<R> run_trials(std::size_t count, const BenchOptions& opt, Body body) {
  std::vector<R> out(count);
  if (!opt.parallel || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = body(i);
    return out;
  }
  unsigned workers = opt.threads ? opt.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        out[i] = body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

TrialReport run_rook(const GeneratedProblem& p, double tol) {
  TrialReport r;
  r.method = Method::rotated_rook;
  r.n = p.a.size();
  r.cond = p.cond;
  r.rank = p.rank;
  const auto t0 = Clock::now();
  FactorizeResult fr = factorize(p.a, tol);
  const double rho = fr.growth.rho;
  NullAugmentedFactorization nf = compute_null_basis(std::move(fr.factors));
  SolveReport sol = solve_min_norm_lsq(nf, p.b);
  r.wall_time = seconds_since(t0);
  r.recon_err = xp_reconstruct_error(p.a, nf.factors());
  r.growth_rho = rho;
  r.solution_err = diff_norm(sol.x, p.x_exact);
  r.detected_rank = sol.rank;
  const DenseVector ax = xp_matvec(p.a, sol.x);
  r.residual_norm = diff_norm(p.b, ax);
  return r;
}

TrialReport run_bk(const GeneratedProblem& p) {
  TrialReport r;
  r.method = Method::bunch_kaufman;
  r.n = p.a.size();
  r.cond = p.cond;
  r.rank = p.rank;
  const auto t0 = Clock::now();
  const BkFactorization f = bk_factorize(p.a);
  const DenseVector x = bk_solve(f, p.b);
  r.wall_time = seconds_since(t0);
  r.recon_err = xp_reconstruct_error(p.a, f);
  r.solution_err = diff_norm(x, p.x_exact);
  r.detected_rank = r.n;
  const DenseVector ax = xp_matvec(p.a, x);
  r.residual_norm = diff_norm(p.b, ax);
  return r;
}

std::vector<TrialReport> run_methods(const GeneratedProblem& p, const BenchOptions& opt) {
  std::vector<TrialReport> out;
  out.reserve(opt.methods.size());
  for (Method m : opt.methods)
    out.push_back(m == Method::rotated_rook ? run_rook(p, opt.tolerance) : run_bk(p));
  return out;
}

void check_common(const BenchOptions& opt) {
  if (opt.sizes.empty()) throw UsageError("no problem sizes given");
  if (opt.trials == 0) throw UsageError("trials must be at least 1");
  if (opt.methods.empty()) throw UsageError("no methods given");
  for (std::size_t n : opt.sizes)
    if (n == 0) throw UsageError("problem sizes must be positive");
}

struct MetricSpec {
  const char* name;
  double TrialReport::*field;
  bool rook_only;
};

void summarize(const std::vector<std::vector<TrialReport>>& trials, const BenchOptions& opt,
               std::size_t n, std::optional<double> cond, std::size_t rank,
               const std::vector<MetricSpec>& metrics, std::vector<SummaryRow>& out) {
  for (std::size_t m = 0; m < opt.methods.size(); ++m) {
    for (const MetricSpec& spec : metrics) {
      if (spec.rook_only && opt.methods[m] != Method::rotated_rook) continue;
      if (!opt.timing && spec.field == &TrialReport::wall_time) continue;
      RunningStats st;
      for (const auto& t : trials) st.add(t[m].*spec.field);
      out.push_back(SummaryRow{method_name(opt.methods[m]), n, cond, rank, spec.name,
                               st.mean(), st.std_dev(), st.count()});
    }
  }
}

const std::vector<MetricSpec>& determinate_metrics() {
  static const std::vector<MetricSpec> m{
      {"recon_err", &TrialReport::recon_err, false},
      {"solution_err", &TrialReport::solution_err, false},
      {"growth_rho", &TrialReport::growth_rho, true},
      {"time", &TrialReport::wall_time, false},
  };
  return m;
}

std::vector<std::vector<TrialReport>> factor_trials_by_index(std::size_t n,
                                                           const BenchOptions& opt) {
  return run_trials<std::vector<TrialReport>>(opt.trials, opt, [&](std::size_t i) {
    Rng rng(trial_seed(opt.seed, i));
    return run_methods(uniform_problem(rng, n), opt);
  });
}

}  // namespace

std::vector<TrialReport> factor_trials(std::size_t n, const BenchOptions& opt) {
  std::vector<TrialReport> flat;
  for (auto& t : factor_trials_by_index(n, opt))
    for (auto& r : t) flat.push_back(r);
  return flat;
}

std::vector<SummaryRow> run_factor_bench(const BenchOptions& opt) {
  check_common(opt);
  std::vector<SummaryRow> rows;
  for (std::size_t n : opt.sizes) {
    const auto trials = factor_trials_by_index(n, opt);
    summarize(trials, opt, n, std::nullopt, n, determinate_metrics(), rows);
  }
  return rows;
}

std::vector<SummaryRow> run_cond_bench(const BenchOptions& opt) {
  check_common(opt);
  const std::vector<double> conds = opt.conds.empty() ? default_conds() : opt.conds;
  for (double c : conds)
    if (!(c >= 1.0) || !std::isfinite(c)) throw UsageError("condition numbers must be >= 1");
  std::vector<SummaryRow> rows;
  for (std::size_t n : opt.sizes) {
    for (double cond : conds) {
      auto trials = run_trials<std::vector<TrialReport>>(opt.trials, opt, [&](std::size_t i) {
        Rng rng(trial_seed(opt.seed, i));
        return run_methods(spectral_conditioned(rng, n, cond), opt);
      });
      summarize(trials, opt, n, cond, n, determinate_metrics(), rows);
    }
  }
  return rows;
}

std::vector<SummaryRow> run_lsq_bench(const BenchOptions& opt) {
  check_common(opt);
  for (Method m : opt.methods)
    if (m != Method::rotated_rook)
      throw UsageError(std::string("lsq-bench does not support method ") + method_name(m));
  static const std::vector<MetricSpec> metrics{
      {"solution_err", &TrialReport::solution_err, false},
      {"residual_norm", &TrialReport::residual_norm, false},
      {"time", &TrialReport::wall_time, false},
  };
  std::vector<SummaryRow> rows;
  for (std::size_t n : opt.sizes) {
    const std::size_t r = opt.rank ? *opt.rank : n / 2;
    if (r > n) throw UsageError("rank exceeds problem size");
    auto trials = run_trials<std::vector<TrialReport>>(opt.trials, opt, [&](std::size_t i) {
      Rng rng(trial_seed(opt.seed, i));
      return run_methods(spectral_rank_deficient(rng, n, r), opt);
    });
    summarize(trials, opt, n, std::nullopt, r, metrics, rows);
    std::size_t matched = 0;
    for (const auto& t : trials) matched += t[0].detected_rank == r ? 1 : 0;
    rows.push_back(SummaryRow{method_name(Method::rotated_rook), n, std::nullopt, r,
                              "rank_match_fraction",
                              static_cast<double>(matched) / static_cast<double>(trials.size()),
                              0.0, trials.size()});
  }
  return rows;
}

std::vector<GrowthRow> run_growth_check(const BenchOptions& opt) {
  if (opt.sizes.empty()) throw UsageError("no problem sizes given");
  if (opt.trials == 0) throw UsageError("trials must be at least 1");
  std::vector<GrowthRow> out;
  for (std::size_t n : opt.sizes) {
    if (n < 2) throw UsageError("growth-check sizes must be at least 2");
    std::vector<double> rho = run_trials<double>(opt.trials, opt, [&](std::size_t i) {
      Rng rng(trial_seed(opt.seed, i));
      return factorize(uniform_sym(rng, n), opt.tolerance).growth.rho;
    });
    GrowthRow row;
    row.n = n;
    row.trials = rho.size();
    row.bound_analytic = growth_bound_analytic(n);
    row.bound_tight = growth_bound_tight(n);
    for (double v : rho) {
      row.rho.add(v);
      row.max_rho = std::max(row.max_rho, v);
      if (v > row.bound_analytic) ++row.exceedances;
    }
    std::sort(rho.begin(), rho.end());
    const std::size_t h = rho.size() / 2;
    row.median_rho = rho.size() % 2 ? rho[h] : 0.5 * (rho[h - 1] + rho[h]);
    out.push_back(row);
  }
  return out;
}

std::vector<SummaryRow> growth_summary(const std::vector<GrowthRow>& rows) {
  std::vector<SummaryRow> out;
  const std::string m = method_name(Method::rotated_rook);
  for (const GrowthRow& g : rows) {
    auto add = [&](const char* metric, double mean, double sd) {
      out.push_back(SummaryRow{m, g.n, std::nullopt, g.n, metric, mean, sd, g.trials});
    };
    add("rho", g.rho.mean(), g.rho.std_dev());
    add("rho_max", g.max_rho, 0.0);
    add("rho_median", g.median_rho, 0.0);
    add("bound_tight", g.bound_tight, 0.0);
    add("bound_analytic", g.bound_analytic, 0.0);
    add("exceed_fraction", static_cast<double>(g.exceedances) / static_cast<double>(g.trials),
        0.0);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "method,n,cond,rank,metric,mean,std,trials\n";
  char buf[256];
  for (const SummaryRow& r : rows) {
    char cond[32] = "";
    if (r.cond) std::snprintf(cond, sizeof cond, "%g", *r.cond);
    std::snprintf(buf, sizeof buf, "%s,%zu,%s,%zu,%s,%.6e,%.6e,%zu\n", r.method.c_str(), r.n,
                  cond, r.rank, r.metric.c_str(), r.mean, r.std_dev, r.trials);
    out << buf;
  }
}

}  // namespace rotrook
