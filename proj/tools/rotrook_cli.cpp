// rotrook: benchmarks and solver front end for the rotated Rook LDL^t
// factorization.
//
//   rotrook factor-bench [--sizes 10,50,100] [--trials N] [--seed S] ...
//   rotrook cond-bench   [--sizes 100] [--cond 1e2,1e6] ...
//   rotrook lsq-bench    [--sizes 12,52] [--rank R] ...
//   rotrook growth-check [--sizes 2,10,50,100] ...
//   rotrook solve MATRIX.mtx RHS [--out x.mtx] [--tolerance T]
//
// Exit status: 0 success, 1 usage, 2 I/O or parse failure, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rotrook/bench.hpp"
#include "rotrook/mmio.hpp"
#include "rotrook/nullsolve.hpp"
#include "rotrook/rotfact.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kNumerical = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::vector<std::size_t> sizes;
  std::size_t trials = 1000;
  std::uint32_t seed = 5489u;
  std::vector<double> conds;
  std::size_t rank = 0;
  std::vector<std::string> methods;
  std::string out;
  bool large = false;
  bool parallel = false;
  bool no_timing = false;
  double tolerance = -1.0;
};

void add_bench_flags(CLI::App* cmd, CommonFlags& f, bool with_methods, bool with_cond,
                     bool with_rank) {
  cmd->add_option("--sizes", f.sizes, "Problem sizes (comma separated)")->delimiter(',');
  cmd->add_option("--trials", f.trials, "Trials per configuration")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Base seed; trial i uses seed+i");
  if (with_methods)
    cmd->add_option("--methods", f.methods, "rotated_rook,bunch_kaufman")->delimiter(',');
  if (with_cond)
    cmd->add_option("--cond", f.conds, "Condition numbers (comma separated)")
        ->delimiter(',');
  if (with_rank) cmd->add_option("--rank", f.rank, "Planted rank (default n/2)");
  cmd->add_option("--out", f.out, "CSV output file (default stdout)");
  cmd->add_flag("--large", f.large, "Add sizes 500 and 1000 to the defaults");
  cmd->add_flag("--parallel", f.parallel, "Run trials on all hardware threads");
  cmd->add_flag("--no-timing", f.no_timing, "Omit timing rows (deterministic output)");
  cmd->add_option("--tolerance", f.tolerance, "Rank tolerance (default n*eps/2*max|a|)");
}

rotrook::BenchOptions to_options(const CommonFlags& f, const CLI::App* cmd,
                                 std::vector<std::size_t> default_sizes) {
  rotrook::BenchOptions o;
  o.sizes = f.sizes.empty() ? std::move(default_sizes) : f.sizes;
  o.trials = f.trials;
  o.seed = f.seed;
  o.conds = f.conds;
  const CLI::Option* rank = cmd->get_option_no_throw("--rank");
  if (rank && rank->count()) o.rank = f.rank;
  o.tolerance = f.tolerance;
  o.parallel = f.parallel;
  o.timing = !f.no_timing;
  if (!f.methods.empty()) {
    o.methods.clear();
    for (const auto& name : f.methods) {
      auto m = rotrook::parse_method(name);
      if (!m) throw rotrook::UsageError("unknown method '" + name + "'");
      o.methods.push_back(*m);
    }
  }
  return o;
}

// Writes through a file when a path is given, stdout otherwise.
class Output {
public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool to_stdout() const { return !file_; }
  void close() {
    stream().flush();
    if (!stream()) throw IoError("write failed");
  }

private:
  std::unique_ptr<std::ofstream> file_;
};

void emit(const CommonFlags& f, const std::vector<rotrook::SummaryRow>& rows) {
  Output out(f.out);
  rotrook::write_csv(out.stream(), rows);
  out.close();
}

int cmd_growth(const CommonFlags& f, const CLI::App* cmd) {
  rotrook::BenchOptions o = to_options(f, cmd, {2, 10, 50, 100});
  const auto rows = rotrook::run_growth_check(o);
  emit(f, rotrook::growth_summary(rows));
  int status = kOk;
  for (const auto& r : rows) {
    if (r.exceedances > 0) {
      std::fprintf(stderr, "growth-check: n=%zu exceeded the bound %.6g in %zu of %zu trials\n",
                   r.n, r.bound_analytic, r.exceedances, r.trials);
      status = kNumerical;
    }
  }
  return status;
}

int cmd_solve(const std::string& matrix_path, const std::string& rhs_path, const CommonFlags& f) {
  rotrook::PackedSymMatrix a;
  rotrook::DenseVector b;
  try {
    a = rotrook::read_matrix_market_file(matrix_path);
  } catch (const rotrook::ParseError& e) {
    throw IoError(matrix_path + ": " + e.what());
  }
  try {
    b = rotrook::read_vector_file(rhs_path);
  } catch (const rotrook::ParseError& e) {
    throw IoError(rhs_path + ": " + e.what());
  }
  if (b.size() != a.size()) {
    throw IoError("dimension mismatch: matrix is " + std::to_string(a.size()) + "x" +
                  std::to_string(a.size()) + " but the right-hand side has " +
                  std::to_string(b.size()) + " entries");
  }

  auto fr = rotrook::factorize(std::move(a), f.tolerance);
  const double tol = fr.factors.tolerance;
  const auto nf = rotrook::compute_null_basis(std::move(fr.factors));
  const auto rep = rotrook::solve_min_norm_lsq(nf, b);

  Output out(f.out);
  rotrook::write_vector(out.stream(), rep.x);
  out.close();
  std::FILE* report = out.to_stdout() ? stderr : stdout;
  std::fprintf(report, "n %zu\nrank %zu\ntolerance %.6e\nresidual_norm %.17g\n", nf.size(),
               rep.rank, tol, rep.residual_norm);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotated Rook LDL^t factorization: benchmarks and solver"};
  app.require_subcommand(1);

  CommonFlags factor_f, cond_f, lsq_f, growth_f, solve_f;
  auto* factor = app.add_subcommand("factor-bench", "Uniform [-1,1] determinate problems");
  add_bench_flags(factor, factor_f, true, false, false);
  auto* cond = app.add_subcommand("cond-bench", "Spectral problems with set condition number");
  add_bench_flags(cond, cond_f, true, true, false);
  auto* lsq = app.add_subcommand("lsq-bench", "Rank-deficient minimum-norm least squares");
  add_bench_flags(lsq, lsq_f, true, false, true);
  auto* growth = app.add_subcommand("growth-check", "Growth factor against the analytic bound");
  add_bench_flags(growth, growth_f, false, false, false);

  std::string matrix_path, rhs_path;
  auto* solve = app.add_subcommand("solve", "Minimum-norm least-squares solve of A x = b");
  solve->add_option("matrix", matrix_path, "Matrix Market symmetric coordinate file")
      ->required();
  solve->add_option("rhs", rhs_path, "Right-hand side vector file")->required();
  solve->add_option("--out", solve_f.out, "Solution output file (default stdout)");
  solve->add_option("--tolerance", solve_f.tolerance, "Rank tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*factor) {
      emit(factor_f, rotrook::run_factor_bench(
                         to_options(factor_f, factor, rotrook::default_sizes(factor_f.large))));
    } else if (*cond) {
      emit(cond_f, rotrook::run_cond_bench(to_options(cond_f, cond, {100})));
    } else if (*lsq) {
      rotrook::BenchOptions o =
          to_options(lsq_f, lsq, rotrook::default_sizes(lsq_f.large));
      if (lsq_f.methods.empty()) o.methods = {rotrook::Method::rotated_rook};
      emit(lsq_f, rotrook::run_lsq_bench(o));
    } else if (*growth) {
      return cmd_growth(growth_f, growth);
    } else if (*solve) {
      return cmd_solve(matrix_path, rhs_path, solve_f);
    }
  } catch (const rotrook::UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const rotrook::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const rotrook::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kIo;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  }
  return kOk;
}
