#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rotrook {

enum class Method { rotated_rook, bunch_kaufman };

const char* method_name(Method m) noexcept;
/// Accepts "rotated_rook"/"rook" and "bunch_kaufman"/"bk".
std::optional<Method> parse_method(const std::string& name);

/// Per-trial measurements for one method on one generated problem.
struct TrialReport {
  Method method = Method::rotated_rook;
  std::size_t n = 0;
  std::optional<double> cond;
  std::size_t rank = 0;
  double recon_err = 0.0;
  double solution_err = 0.0;
  double growth_rho = 0.0;
  double residual_norm = 0.0;
  std::size_t detected_rank = 0;
  double wall_time = 0.0;
};

/// Welford accumulator; std() is the sample standard deviation.
class RunningStats {
public:
  void add(double x) noexcept {
    if (count_ == 0) shift_ = x;
    x -= shift_;
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }
  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return shift_ + mean_; }
  double variance() const noexcept {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double std_dev() const noexcept;

private:
  std::size_t count_ = 0;
  double shift_ = 0.0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct SummaryRow {
  std::string method;
  std::size_t n = 0;
  std::optional<double> cond;
  std::size_t rank = 0;
  std::string metric;
  double mean = 0.0;
  double std_dev = 0.0;
  std::size_t trials = 0;
};

struct BenchOptions {
  std::vector<std::size_t> sizes;
  std::size_t trials = 1000;
  std::uint32_t seed = 5489u;
  std::vector<Method> methods{Method::rotated_rook, Method::bunch_kaufman};
  std::vector<double> conds;
  std::optional<std::size_t> rank;
  double tolerance = -1.0;
  bool parallel = false;
  bool timing = true;
  unsigned threads = 0;  // 0: hardware concurrency
};

std::vector<std::size_t> default_sizes(bool large);
std::vector<double> default_conds();

/// Uniform [-1, 1] determinate problems: reconstruction error, solution
/// error, growth factor (rotated Rook only), time.
std::vector<SummaryRow> run_factor_bench(const BenchOptions& opt);
/// Spectral problems with prescribed condition number.
std::vector<SummaryRow> run_cond_bench(const BenchOptions& opt);
/// Rank-deficient spectral problems (rank n/2 unless opt.rank is set),
/// rotated Rook only.
std::vector<SummaryRow> run_lsq_bench(const BenchOptions& opt);

struct GrowthRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  double max_rho = 0.0;
  double median_rho = 0.0;
  RunningStats rho;
  double bound_analytic = 0.0;
  double bound_tight = 0.0;
  std::size_t exceedances = 0;
};

/// Growth factors of the rotated Rook factorization on uniform matrices.
std::vector<GrowthRow> run_growth_check(const BenchOptions& opt);
std::vector<SummaryRow> growth_summary(const std::vector<GrowthRow>& rows);

void write_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Per-trial raw reports, in trial order, for the given problem family.
/// Exposed so callers can check the streaming summaries against stored logs.
std::vector<TrialReport> factor_trials(std::size_t n, const BenchOptions& opt);

}  // namespace rotrook
