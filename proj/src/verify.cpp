#include "partmi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "partmi/measures.hpp"

namespace partmi::verify {

namespace {

// Fills cells in row-major order. A row may only be closed with a zero
// remainder if it already holds a positive entry, and similarly for
// columns on the final row, so no table with an empty line is produced.
class TableWalker {
 public:
  TableWalker(std::size_t q_c, std::size_t q_g, Count n, const std::function<void(const ContingencyTable&)>& visit,
              std::uint64_t max_tables)
      : q_c_(q_c), q_g_(q_g), n_(n), visit_(visit), max_tables_(max_tables), cells_(q_c * q_g, 0),
        row_sum_(q_c, 0), col_sum_(q_g, 0) {}

  std::uint64_t run() {
    if (n_ >= static_cast<Count>(std::max(q_c_, q_g_))) fill(0, n_);
    return visited_;
  }

 private:
  // Lines still needing a positive entry after cell `idx` is filled.
  Count pending_after(std::size_t idx) const {
    const std::size_t r = idx / q_g_;
    const std::size_t s = idx % q_g_;
    Count rows_needed = static_cast<Count>(q_c_ - r - 1);
    Count cols_needed = 0;
    for (std::size_t t = 0; t < q_g_; ++t) {
      // Columns t <= s have seen row r; they can still be filled by later rows
      // unless r is the last row.
      if (col_sum_[t] == 0 && (r + 1 < q_c_ || t > s)) ++cols_needed;
    }
    return std::max(rows_needed, cols_needed);
  }

  void fill(std::size_t idx, Count remaining) {
    if (idx == cells_.size()) {
      if (remaining != 0) return;
      if (visited_ >= max_tables_)
        throw ResourceError("table enumeration stopped after " + std::to_string(visited_) + " tables (q_c=" +
                            std::to_string(q_c_) + ", q_g=" + std::to_string(q_g_) + ", n=" + std::to_string(n_) +
                            ")");
      ++visited_;
      visit_(ContingencyTable(q_c_, q_g_, cells_));
      return;
    }
    const std::size_t r = idx / q_g_;
    const std::size_t s = idx % q_g_;
    const bool last_in_row = s + 1 == q_g_;
    const bool last_row = r + 1 == q_c_;
    const bool last_cell = idx + 1 == cells_.size();

    for (Count v = 0; v <= remaining; ++v) {
      if (last_cell && v != remaining) continue;
      if (last_in_row && row_sum_[r] + v == 0) continue;
      if (last_row && col_sum_[s] + v == 0) continue;
      cells_[idx] = v;
      row_sum_[r] += v;
      col_sum_[s] += v;
      if (remaining - v >= pending_after(idx)) fill(idx + 1, remaining - v);
      row_sum_[r] -= v;
      col_sum_[s] -= v;
    }
    cells_[idx] = 0;
  }

  std::size_t q_c_;
  std::size_t q_g_;
  Count n_;
  const std::function<void(const ContingencyTable&)>& visit_;
  std::uint64_t max_tables_;
  std::uint64_t visited_ = 0;
  std::vector<Count> cells_;
  std::vector<Count> row_sum_;
  std::vector<Count> col_sum_;
};

std::vector<Count> sorted(std::span<const Count> v) {
  std::vector<Count> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool violation_less(const BoundViolation& a, const BoundViolation& b) {
  if (a.table.total() != b.table.total()) return a.table.total() < b.table.total();
  return std::ranges::lexicographical_compare(a.table.counts(), b.table.counts());
}

}  // namespace

std::uint64_t for_each_table(std::size_t q_c, std::size_t q_g, Count n,
                             const std::function<void(const ContingencyTable&)>& visit, std::uint64_t max_tables) {
  if (q_c == 0 || q_g == 0) throw DomainError("tables need at least one row and one column");
  if (n < 0) throw DomainError("table total must be non-negative");
  return TableWalker(q_c, q_g, n, visit, max_tables).run();
}

std::vector<ContingencyTable> enumerate_tables(std::size_t q_c, std::size_t q_g, Count n, std::uint64_t max_tables) {
  std::vector<ContingencyTable> out;
  for_each_table(q_c, q_g, n, [&](const ContingencyTable& t) { out.push_back(t); }, max_tables);
  return out;
}

bool is_permutation_diagonal(const ContingencyTable& table) {
  if (table.rows() != table.cols()) return false;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    std::size_t nonzero = 0;
    for (std::size_t s = 0; s < table.cols(); ++s)
      if (table.at(r, s) != 0) ++nonzero;
    if (nonzero != 1) return false;
  }
  // No empty columns plus one entry per row forces one entry per column.
  return true;
}

BoundCheckResult check_bound(const BoundCheckConfig& config) {
  if (config.q_c == 0 || config.q_g == 0) throw InputError("q_c and q_g must be at least 1");
  if (config.n_max < static_cast<Count>(std::max(config.q_c, config.q_g)))
    throw InputError("n_max must be at least max(q_c, q_g)");

  const ExactCountOptions options{config.budget};
  // Omega depends on the margins only, and is invariant under permuting
  // rows or columns separately.
  std::map<std::pair<std::vector<Count>, std::vector<Count>>, double> omega_cache;
  auto cached_log_omega = [&](std::span<const Count> rows, std::span<const Count> cols) {
    auto key = std::make_pair(sorted(rows), sorted(cols));
    auto it = omega_cache.find(key);
    if (it == omega_cache.end()) {
      const double v = log_omega(key.first, key.second, config.omega, options).log_omega;
      it = omega_cache.emplace(std::move(key), v).first;
    }
    return it->second;
  };

  BoundCheckResult result;
  std::uint64_t remaining = config.max_tables;
  for (Count n = static_cast<Count>(std::max(config.q_c, config.q_g)); n <= config.n_max; ++n) {
    std::uint64_t visited = 0;
    try {
      visited = for_each_table(
          config.q_c, config.q_g, n,
          [&](const ContingencyTable& t) {
            const double i_cg = i0_factorial(t) - cached_log_omega(t.row_sums(), t.col_sums());
            const double i_gg = h0_from_sizes(t.col_sums()) - cached_log_omega(t.col_sums(), t.col_sums());
            const double gap = i_cg - i_gg;
            const bool diagonal = is_permutation_diagonal(t);
            if (gap > config.tolerance) result.violations.push_back({t, i_cg, i_gg, gap});
            if (diagonal) {
              if (std::abs(gap) > config.tolerance) result.equality_failures.push_back({t, i_cg, i_gg, gap});
            } else {
              result.max_off_diagonal_gap = std::max(result.max_off_diagonal_gap, gap);
              if (std::abs(gap) <= config.tolerance) result.spurious_equalities.push_back({t, i_cg, i_gg, gap});
            }
          },
          remaining);
    } catch (const ResourceError& e) {
      throw ResourceError(std::string(e.what()) + "; " + std::to_string(result.cases_checked) +
                          " tables checked before stopping, " + std::to_string(result.violations.size()) +
                          " violations so far");
    }
    result.cases_checked += visited;
    remaining -= visited;
  }
  std::ranges::sort(result.violations, violation_less);
  std::ranges::sort(result.equality_failures, violation_less);
  std::ranges::sort(result.spurious_equalities, violation_less);
  return result;
}

FlipDelta single_flip_delta(std::span<const Count> g_sizes, std::size_t from, std::size_t to) {
  if (from >= g_sizes.size() || to >= g_sizes.size()) throw DomainError("flip group index out of range");
  if (from == to) throw DomainError("flip must move the object to a different group");
  if (g_sizes[from] < 2) throw DomainError("the group losing an object must have at least two members");
  for (Count v : g_sizes)
    if (v <= 0) throw DomainError("group sizes must be positive");

  const auto alpha = effective_alpha(g_sizes, g_sizes.size());
  if (!alpha || *alpha < 1.0) throw DomainError("single-flip analysis requires alpha >= 1");

  std::vector<Count> flipped(g_sizes.begin(), g_sizes.end());
  --flipped[from];
  ++flipped[to];

  FlipDelta d;
  d.alpha = *alpha;
  d.delta_i0 = std::log(static_cast<double>(g_sizes[to]) + 1.0);
  // Candidate sizes are the rows; the truth keeps its columns, so alpha is
  // the same on both sides.
  d.delta_log_omega = log_omega_ec(g_sizes, g_sizes).log_omega - log_omega_ec(flipped, g_sizes).log_omega;
  d.delta_rmi = d.delta_i0 - d.delta_log_omega;
  return d;
}

}  // namespace partmi::verify
