#include "partmi/counting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/container_hash/hash.hpp>

namespace partmi {

namespace {

constexpr Count kFactorialTableMax = 170;
constexpr long double kHalfLogTwoPi = 0.918938533204672741780329736405617639861L;

// ln k! for k <= 170 from the long-double product k!, which stays finite
// and carries ~1e-17 relative error at the top of the range.
const std::array<double, kFactorialTableMax + 1>& factorial_table() {
  static const auto table = [] {
    std::array<double, kFactorialTableMax + 1> t{};
    long double product = 1.0L;
    t[0] = 0.0;
    for (Count k = 1; k <= kFactorialTableMax; ++k) {
      product *= static_cast<long double>(k);
      t[static_cast<std::size_t>(k)] = static_cast<double>(std::log(product));
    }
    return t;
  }();
  return table;
}

// Asymptotic series for ln Gamma(x), accurate to ~1e-16 relative for x >= 15.
long double stirling_log_gamma(long double x) {
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  long double series = inv2 * (-691.0L / 360360.0L);
  series = inv2 * (series + 1.0L / 1188.0L);
  series = inv2 * (series - 1.0L / 1680.0L);
  series = inv2 * (series + 1.0L / 1260.0L);
  series = inv2 * (series - 1.0L / 360.0L);
  series = inv * (series + 1.0L / 12.0L);
  return (x - 0.5L) * std::log(x) - x + kHalfLogTwoPi + series;
}

void check_margins(std::span<const Count> rows, std::span<const Count> cols) {
  if (rows.empty() || cols.empty()) throw InputError("margins must be non-empty");
  for (Count v : rows)
    if (v <= 0) throw InputError("row sums must be positive");
  for (Count v : cols)
    if (v <= 0) throw InputError("column sums must be positive");
  const Count nr = std::accumulate(rows.begin(), rows.end(), Count{0});
  const Count nc = std::accumulate(cols.begin(), cols.end(), Count{0});
  if (nr != nc)
    throw InputError("row and column sums have different totals (" + std::to_string(nr) + " vs " +
                     std::to_string(nc) + ")");
}

// Rough log-size of the reachable state space when `cols` are the columns:
// the number of sub-multisets per block of equal column values.
double state_space_estimate(std::span<const Count> rows, std::vector<Count> cols) {
  std::sort(cols.begin(), cols.end());
  double est = std::log(static_cast<double>(rows.size()));
  for (std::size_t i = 0; i < cols.size();) {
    std::size_t j = i;
    while (j < cols.size() && cols[j] == cols[i]) ++j;
    est += log_binomial(static_cast<Count>(j - i) + cols[i], cols[i]);
    i = j;
  }
  return est;
}

// Depth-first count over rows. Each row is distributed across blocks of
// equal remaining column values, so compositions that lead to the same
// sorted remainder are visited once with a multinomial weight.
class TableCounter {
 public:
  TableCounter(std::vector<Count> rows, std::uint64_t budget) : rows_(std::move(rows)), budget_(budget) {}

  BigCount count(std::vector<Count> cols) {
    normalize(cols);
    return count_from(0, cols);
  }

 private:
  struct Block {
    Count value;
    Count multiplicity;
  };

  struct Frame {
    std::size_t row;
    std::vector<Block> blocks;
    std::vector<Count> capacity;  // suffix sums of value * multiplicity
    std::vector<Count> next;
    BigCount total;
  };

  static void normalize(std::vector<Count>& cols) {
    std::erase(cols, Count{0});
    std::sort(cols.begin(), cols.end(), std::greater<>());
  }

  void tick() {
    if (++nodes_ > budget_)
      throw ResourceError("exact table count exceeded its budget of " + std::to_string(budget_) +
                          " nodes; use effective-columns mode or raise the budget");
  }

  BigCount count_from(std::size_t row, const std::vector<Count>& cols) {
    tick();
    if (row + 1 >= rows_.size()) return 1;

    std::vector<Count> key;
    key.reserve(cols.size() + 1);
    key.push_back(static_cast<Count>(row));
    key.insert(key.end(), cols.begin(), cols.end());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    Frame frame{row, {}, {}, {}, 0};
    for (std::size_t i = 0; i < cols.size();) {
      std::size_t j = i;
      while (j < cols.size() && cols[j] == cols[i]) ++j;
      frame.blocks.push_back({cols[i], static_cast<Count>(j - i)});
      i = j;
    }
    frame.capacity.assign(frame.blocks.size() + 1, 0);
    for (std::size_t b = frame.blocks.size(); b-- > 0;)
      frame.capacity[b] = frame.capacity[b + 1] + frame.blocks[b].value * frame.blocks[b].multiplicity;
    frame.next.reserve(cols.size());

    distribute_block(frame, 0, rows_[row], BigCount(1));
    memo_.emplace(std::move(key), frame.total);
    return frame.total;
  }

  void distribute_block(Frame& f, std::size_t block, Count remaining, const BigCount& weight) {
    if (block == f.blocks.size()) {
      if (remaining != 0) return;
      std::vector<Count> next = f.next;
      normalize(next);
      f.total += weight * count_from(f.row + 1, next);
      return;
    }
    if (remaining > f.capacity[block]) return;
    const Block& b = f.blocks[block];
    distribute_amount(f, block, b.value, b.multiplicity, remaining, weight);
  }

  // Chooses how many of the `left` columns in this block receive `amount`
  // units, then recurses to amount - 1. Amount 0 closes the block.
  void distribute_amount(Frame& f, std::size_t block, Count amount, Count left, Count remaining,
                         const BigCount& weight) {
    const Block& b = f.blocks[block];
    if (amount == 0) {
      const std::size_t mark = f.next.size();
      f.next.insert(f.next.end(), static_cast<std::size_t>(left), b.value);
      distribute_block(f, block + 1, remaining, weight);
      f.next.resize(mark);
      return;
    }
    if (remaining > left * amount + f.capacity[block + 1]) return;
    tick();
    const Count max_k = std::min(left, remaining / amount);
    BigCount choose = 1;  // C(left, k)
    const std::size_t mark = f.next.size();
    for (Count k = 0; k <= max_k; ++k) {
      if (k > 0) {
        choose *= (left - k + 1);
        choose /= k;
        f.next.push_back(b.value - amount);
      }
      distribute_amount(f, block, amount - 1, left - k, remaining - k * amount, k == 0 ? weight : weight * choose);
    }
    f.next.resize(mark);
  }

  std::vector<Count> rows_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::unordered_map<std::vector<Count>, BigCount, boost::hash<std::vector<Count>>> memo_;
};

}  // namespace

double log_factorial(Count k) {
  if (k < 0) throw DomainError("log_factorial of a negative number");
  if (k <= kFactorialTableMax) return factorial_table()[static_cast<std::size_t>(k)];
  return static_cast<double>(stirling_log_gamma(static_cast<long double>(k) + 1.0L));
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma requires a finite positive argument");
  long double y = x;
  long double shift = 1.0L;
  while (y < 15.0L) {
    shift *= y;
    y += 1.0L;
  }
  return static_cast<double>(stirling_log_gamma(y) - std::log(shift));
}

double log_binomial(Count a, Count b) {
  if (a < 0 || b < 0 || b > a)
    throw DomainError("log_binomial(" + std::to_string(a) + ", " + std::to_string(b) + ") is undefined");
  if (b == 0 || b == a) return 0.0;
  return log_factorial(a) - log_factorial(b) - log_factorial(a - b);
}

double log_binomial_real(double top, double bottom) {
  if (!(bottom > -1.0) || !(top - bottom > -1.0))
    throw DomainError("log_binomial_real arguments out of range");
  if (bottom == 0.0 || top == bottom) return 0.0;
  return log_gamma(top + 1.0) - log_gamma(bottom + 1.0) - log_gamma(top - bottom + 1.0);
}

double log_big(const BigCount& value) {
  if (value <= 0) throw DomainError("log of a non-positive count");
  const auto bits = boost::multiprecision::msb(value);
  if (bits < 1000) return std::log(value.convert_to<double>());
  const auto shift = bits - 64;
  const BigCount top = value >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

std::string_view to_string(OmegaMode mode) { return mode == OmegaMode::exact ? "exact" : "effective_columns"; }

OmegaMode parse_omega_mode(std::string_view text) {
  if (text == "exact") return OmegaMode::exact;
  if (text == "ec" || text == "effective-columns" || text == "effective_columns") return OmegaMode::effective_columns;
  throw InputError("unknown omega mode `" + std::string(text) + "` (expected exact or ec)");
}

BigCount count_tables_exact(std::span<const Count> row_sums, std::span<const Count> col_sums,
                            const ExactCountOptions& options) {
  check_margins(row_sums, col_sums);
  std::vector<Count> rows(row_sums.begin(), row_sums.end());
  std::vector<Count> cols(col_sums.begin(), col_sums.end());
  // The count is transpose-invariant; enumerate in the cheaper orientation.
  if (state_space_estimate(cols, rows) < state_space_estimate(rows, cols)) std::swap(rows, cols);
  std::sort(rows.begin(), rows.end(), std::greater<>());
  TableCounter counter(std::move(rows), options.node_budget);
  return counter.count(std::move(cols));
}

OmegaEstimate log_omega_exact(std::span<const Count> row_sums, std::span<const Count> col_sums,
                              const ExactCountOptions& options) {
  return {log_big(count_tables_exact(row_sums, col_sums, options)), OmegaMode::exact, std::nullopt, false};
}

std::optional<double> effective_alpha(std::span<const Count> col_sums, std::size_t q_c) {
  if (q_c == 0) throw DomainError("effective_alpha needs at least one row");
  long double n = 0.0L;
  long double sum_sq = 0.0L;
  for (Count v : col_sums) {
    n += static_cast<long double>(v);
    sum_sq += static_cast<long double>(v) * static_cast<long double>(v);
  }
  const long double denom = sum_sq - n;
  if (denom <= 0.0L) return std::nullopt;
  const long double num = n * n - n + (n * n - sum_sq) / static_cast<long double>(q_c);
  return static_cast<double>(num / denom);
}

OmegaEstimate log_omega_ec(std::span<const Count> row_sums, std::span<const Count> col_sums) {
  check_margins(row_sums, col_sums);
  const Count n = std::accumulate(row_sums.begin(), row_sums.end(), Count{0});
  const std::size_t q_c = row_sums.size();
  const auto alpha = effective_alpha(col_sums, q_c);
  if (!alpha) {
    // Every column is a singleton: each column picks one row, so the count
    // is the multinomial n! / prod_r n_r!.
    double value = log_factorial(n);
    for (Count r : row_sums) value -= log_factorial(r);
    return {value, OmegaMode::effective_columns, std::nullopt, true};
  }
  const double a = *alpha;
  const double qa = static_cast<double>(q_c) * a;
  double value = -log_binomial_real(static_cast<double>(n) + qa - 1.0, qa - 1.0);
  for (Count r : row_sums) value += log_binomial_real(static_cast<double>(r) + a - 1.0, a - 1.0);
  for (Count s : col_sums) value += log_binomial(s + static_cast<Count>(q_c) - 1, static_cast<Count>(q_c) - 1);
  return {value, OmegaMode::effective_columns, a, false};
}

OmegaEstimate log_omega(std::span<const Count> row_sums, std::span<const Count> col_sums, OmegaMode mode,
                        const ExactCountOptions& options) {
  return mode == OmegaMode::exact ? log_omega_exact(row_sums, col_sums, options) : log_omega_ec(row_sums, col_sums);
}

}  // namespace partmi
