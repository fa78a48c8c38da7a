#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "partmi/core.hpp"

namespace partmi {

using BigCount = boost::multiprecision::cpp_int;

/// ln(k!). Exact-product evaluation up to k = 170, Stirling series beyond.
double log_factorial(Count k);

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// ln C(a, b) for integers 0 <= b <= a; DomainError otherwise.
double log_binomial(Count a, Count b);

/// ln C(top, bottom) with real arguments, via log-gamma. Requires
/// top >= bottom >= 0 (up to the arguments being positive after +1).
double log_binomial_real(double top, double bottom);

/// Natural log of a positive arbitrary-precision integer.
double log_big(const BigCount& value);

enum class OmegaMode { exact, effective_columns };

std::string_view to_string(OmegaMode mode);
/// Accepts "exact", "ec", "effective-columns", "effective_columns".
OmegaMode parse_omega_mode(std::string_view text);

/// Log of the number of contingency tables with given margins.
struct OmegaEstimate {
  double log_omega = 0.0;
  OmegaMode mode = OmegaMode::exact;
  /// Effective-columns parameter; empty in exact mode and when the exact
  /// singleton-column count was substituted for a degenerate alpha.
  std::optional<double> alpha;
  bool singleton_fallback = false;
};

struct ExactCountOptions {
  /// Maximum recursion nodes (row states plus per-row distributions).
  std::uint64_t node_budget = 10'000'000;
};

/// Number of non-negative integer matrices with the given row and column
/// sums. Margins must be positive with equal totals. Throws ResourceError
/// when the node budget is exhausted.
BigCount count_tables_exact(std::span<const Count> row_sums, std::span<const Count> col_sums,
                            const ExactCountOptions& options = {});

OmegaEstimate log_omega_exact(std::span<const Count> row_sums, std::span<const Count> col_sums,
                              const ExactCountOptions& options = {});

/// alpha = (n^2 - n + [n^2 - sum_s c_s^2] / q_c) / (sum_s c_s^2 - n).
/// Empty when every column is a singleton (the denominator vanishes).
std::optional<double> effective_alpha(std::span<const Count> col_sums, std::size_t q_c);

/// Effective-columns estimate of ln Omega. Rows are candidate group sizes
/// and columns ground-truth sizes; the estimate is not transpose-symmetric,
/// so callers must keep that order. When alpha is degenerate the exact
/// count for all-singleton columns, n! / prod_r n_r!, is returned instead.
OmegaEstimate log_omega_ec(std::span<const Count> row_sums, std::span<const Count> col_sums);

OmegaEstimate log_omega(std::span<const Count> row_sums, std::span<const Count> col_sums, OmegaMode mode,
                        const ExactCountOptions& options = {});

}  // namespace partmi
