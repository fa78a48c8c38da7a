#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "partmi/core.hpp"
#include "partmi/counting.hpp"

namespace partmi::verify {

/// Calls `visit` once for every q_c x q_g non-negative integer table whose
/// entries sum to n and which has no empty row or column. Tables are
/// visited in lexicographic order of their row-major entries. Returns the
/// number of tables visited; throws ResourceError after `max_tables`.
std::uint64_t for_each_table(std::size_t q_c, std::size_t q_g, Count n,
                             const std::function<void(const ContingencyTable&)>& visit,
                             std::uint64_t max_tables = std::numeric_limits<std::uint64_t>::max());

std::vector<ContingencyTable> enumerate_tables(std::size_t q_c, std::size_t q_g, Count n,
                                               std::uint64_t max_tables = std::numeric_limits<std::uint64_t>::max());

/// True when the table is square with exactly one non-zero entry per row
/// and per column, i.e. the candidate equals the truth up to relabeling.
bool is_permutation_diagonal(const ContingencyTable& table);

struct BoundCheckConfig {
  std::size_t q_c = 2;
  std::size_t q_g = 2;
  Count n_max = 20;
  OmegaMode omega = OmegaMode::exact;
  /// Node budget for each exact table count.
  std::uint64_t budget = 10'000'000;
  std::uint64_t max_tables = std::numeric_limits<std::uint64_t>::max();
  double tolerance = 1e-9;
};

struct BoundViolation {
  ContingencyTable table;
  double i_cg = 0.0;
  double i_gg = 0.0;
  double gap = 0.0;  // i_cg - i_gg
};

struct BoundCheckResult {
  std::uint64_t cases_checked = 0;
  /// Tables with I(c;g) > I(g;g) + tolerance, sorted by (n, entries).
  std::vector<BoundViolation> violations;
  /// Permutation-diagonal tables where |I(c;g) - I(g;g)| > tolerance.
  std::vector<BoundViolation> equality_failures;
  /// Non-diagonal tables where I(c;g) reaches I(g;g) within tolerance.
  std::vector<BoundViolation> spurious_equalities;
  /// Largest gap over non-diagonal tables (closest approach to the bound).
  double max_off_diagonal_gap = -std::numeric_limits<double>::infinity();

  bool ok() const { return violations.empty() && equality_failures.empty() && spurious_equalities.empty(); }
};

/// Checks the reduced mutual information bound I(c;g) <= I(g;g) on every
/// q_c x q_g table with n from max(q_c, q_g) to n_max. Rows are the
/// candidate, columns the truth; I(g;g) uses the column margins alone.
BoundCheckResult check_bound(const BoundCheckConfig& config);

struct FlipDelta {
  double delta_i0 = 0.0;
  double delta_log_omega = 0.0;
  double delta_rmi = 0.0;
  double alpha = 0.0;
};

/// Change in I0, ln Omega (effective columns) and the reduced mutual
/// information when one object of group `from` is moved to group `to` in
/// the candidate, starting from a perfect match with group sizes
/// `g_sizes`. Each delta is (value at c = g) - (value after the move).
/// Requires g_sizes[from] >= 2, from != to and alpha >= 1.
FlipDelta single_flip_delta(std::span<const Count> g_sizes, std::size_t from, std::size_t to);

}  // namespace partmi::verify
