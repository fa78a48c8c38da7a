#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace partmi {

/// Malformed or inconsistent input (length mismatch, empty labeling, bad file).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation exceeded its configured work budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Count = std::int64_t;

inline constexpr std::size_t kDefaultMaxGroups = 10'000;

/// Relabels raw group identifiers to 1..q in order of first occurrence.
std::vector<int> canonicalize(std::span<const std::int64_t> raw);
std::vector<int> canonicalize(std::span<const std::string> raw);

/// An assignment of n objects to q non-empty groups.
///
/// Stored in canonical form: group ids are 0..q-1 and numbered by first
/// occurrence, so two labelings that differ only by a renaming of groups
/// compare equal.
class Labeling {
 public:
  explicit Labeling(std::span<const std::int64_t> raw);
  explicit Labeling(std::span<const std::string> raw);
  Labeling(std::initializer_list<std::int64_t> raw);

  /// Labeling with every object in its own group.
  static Labeling singletons(std::size_t n);
  /// Labeling with every object in one group.
  static Labeling one_group(std::size_t n);

  std::size_t size() const { return groups_.size(); }
  std::size_t num_groups() const { return sizes_.size(); }

  /// Zero-based canonical group of object i.
  int group(std::size_t i) const { return groups_[i]; }
  std::span<const int> groups() const { return groups_; }
  std::span<const Count> group_sizes() const { return sizes_; }

  /// Canonical labels in the 1..q external convention.
  std::vector<int> labels() const;

  friend bool operator==(const Labeling&, const Labeling&) = default;

 private:
  explicit Labeling(std::vector<int> one_based);

  std::vector<int> groups_;
  std::vector<Count> sizes_;
};

/// Joint counts of a candidate labeling (rows) against a ground truth
/// (columns). Margins are cached; no row or column is ever all-zero.
class ContingencyTable {
 public:
  ContingencyTable(std::size_t rows, std::size_t cols, std::vector<Count> counts);

  static ContingencyTable from_labelings(const Labeling& candidate, const Labeling& truth,
                                         std::size_t max_groups = kDefaultMaxGroups);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Count total() const { return total_; }
  Count at(std::size_t r, std::size_t s) const { return counts_[r * cols_ + s]; }

  std::span<const Count> counts() const { return counts_; }
  std::span<const Count> row_sums() const { return row_sums_; }
  std::span<const Count> col_sums() const { return col_sums_; }

  ContingencyTable transposed() const;

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Count> counts_;
  std::vector<Count> row_sums_;
  std::vector<Count> col_sums_;
  Count total_ = 0;
};

}  // namespace partmi
