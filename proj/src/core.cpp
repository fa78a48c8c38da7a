#include "partmi/core.hpp"

#include <numeric>
#include <unordered_map>

namespace partmi {

namespace {

template <class T>
std::vector<int> canonicalize_impl(std::span<const T> raw) {
  if (raw.empty()) throw InputError("labeling is empty");
  std::unordered_map<T, int> ids;
  std::vector<int> out;
  out.reserve(raw.size());
  for (const auto& label : raw) {
    auto [it, inserted] = ids.try_emplace(label, static_cast<int>(ids.size()) + 1);
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

std::vector<int> canonicalize(std::span<const std::int64_t> raw) { return canonicalize_impl(raw); }
std::vector<int> canonicalize(std::span<const std::string> raw) { return canonicalize_impl(raw); }

Labeling::Labeling(std::vector<int> one_based) {
  groups_.reserve(one_based.size());
  for (int id : one_based) {
    auto g = static_cast<std::size_t>(id - 1);
    if (g >= sizes_.size()) sizes_.resize(g + 1, 0);
    ++sizes_[g];
    groups_.push_back(id - 1);
  }
}

Labeling::Labeling(std::span<const std::int64_t> raw) : Labeling(canonicalize(raw)) {}
Labeling::Labeling(std::span<const std::string> raw) : Labeling(canonicalize(raw)) {}
Labeling::Labeling(std::initializer_list<std::int64_t> raw)
    : Labeling(std::span<const std::int64_t>(raw.begin(), raw.size())) {}

Labeling Labeling::singletons(std::size_t n) {
  if (n == 0) throw InputError("labeling is empty");
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 1);
  return Labeling(std::move(ids));
}

Labeling Labeling::one_group(std::size_t n) {
  if (n == 0) throw InputError("labeling is empty");
  return Labeling(std::vector<int>(n, 1));
}

std::vector<int> Labeling::labels() const {
  std::vector<int> out(groups_.begin(), groups_.end());
  for (int& id : out) ++id;
  return out;
}

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols, std::vector<Count> counts)
    : rows_(rows), cols_(cols), counts_(std::move(counts)), row_sums_(rows, 0), col_sums_(cols, 0) {
  if (rows == 0 || cols == 0) throw InputError("contingency table needs at least one row and column");
  if (counts_.size() != rows * cols) throw InputError("contingency table has wrong number of entries");
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t s = 0; s < cols_; ++s) {
      Count v = counts_[r * cols_ + s];
      if (v < 0) throw InputError("contingency table entries must be non-negative");
      row_sums_[r] += v;
      col_sums_[s] += v;
    }
  }
  for (Count v : row_sums_)
    if (v == 0) throw InputError("contingency table has an empty row");
  for (Count v : col_sums_)
    if (v == 0) throw InputError("contingency table has an empty column");
  total_ = std::accumulate(row_sums_.begin(), row_sums_.end(), Count{0});
}

ContingencyTable ContingencyTable::from_labelings(const Labeling& candidate, const Labeling& truth,
                                                  std::size_t max_groups) {
  if (candidate.size() != truth.size())
    throw InputError("labelings have different lengths (" + std::to_string(candidate.size()) + " vs " +
                     std::to_string(truth.size()) + ")");
  const std::size_t qc = candidate.num_groups();
  const std::size_t qg = truth.num_groups();
  if (qc > max_groups || qg > max_groups)
    throw InputError("number of groups exceeds the dense table cap of " + std::to_string(max_groups));
  std::vector<Count> counts(qc * qg, 0);
  for (std::size_t i = 0; i < candidate.size(); ++i)
    ++counts[static_cast<std::size_t>(candidate.group(i)) * qg + static_cast<std::size_t>(truth.group(i))];
  return ContingencyTable(qc, qg, std::move(counts));
}

ContingencyTable ContingencyTable::transposed() const {
  std::vector<Count> t(counts_.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t s = 0; s < cols_; ++s) t[s * rows_ + r] = counts_[r * cols_ + s];
  return ContingencyTable(cols_, rows_, std::move(t));
}

}  // namespace partmi
