#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "partmi/measures.hpp"
#include "partmi/verify.hpp"

using namespace partmi;
using namespace partmi::verify;

namespace {

// Number of q_c x q_g tables summing to n with no empty row or column,
// by inclusion-exclusion over emptied rows and columns.
double table_count_oracle(int q_c, int q_g, int n) {
  auto choose = [](double a, int b) {
    double r = 1.0;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  double total = 0.0;
  for (int i = 0; i <= q_c; ++i)
    for (int j = 0; j <= q_g; ++j) {
      const int cells = (q_c - i) * (q_g - j);
      const double free = cells == 0 ? 0.0 : choose(n + cells - 1, n);
      total += ((i + j) % 2 == 0 ? 1.0 : -1.0) * choose(q_c, i) * choose(q_g, j) * free;
    }
  return total;
}

}  // namespace

TEST_SUITE_BEGIN("verify");

TEST_CASE("enumerate_tables examples") {
  CHECK(enumerate_tables(1, 1, 3).size() == 1);
  CHECK(enumerate_tables(2, 1, 2).size() == 1);
  CHECK(enumerate_tables(2, 2, 3).size() == 8);  // four of pattern (1,1,1,0), four of (2,1) on a diagonal
  CHECK(enumerate_tables(3, 3, 2).empty());
}

TEST_CASE("enumerate_tables counts match inclusion-exclusion") {
  for (int qc = 1; qc <= 4; ++qc)
    for (int qg = 1; qg <= 3; ++qg)
      for (int n = std::max(qc, qg); n <= 9; ++n) {
        const auto tables = enumerate_tables(qc, qg, n);
        CHECK(static_cast<double>(tables.size()) == table_count_oracle(qc, qg, n));
        std::set<std::vector<Count>> seen;
        for (const auto& t : tables) {
          CHECK(t.total() == n);
          seen.insert({t.counts().begin(), t.counts().end()});
        }
        CHECK(seen.size() == tables.size());
      }
}

TEST_CASE("enumeration order and table limit") {
  const auto tables = enumerate_tables(2, 2, 4);
  for (std::size_t i = 1; i < tables.size(); ++i) {
    const std::vector<Count> a(tables[i - 1].counts().begin(), tables[i - 1].counts().end());
    const std::vector<Count> b(tables[i].counts().begin(), tables[i].counts().end());
    CHECK(a < b);
  }
  CHECK_THROWS_AS(enumerate_tables(3, 3, 10, 5), ResourceError);
}

TEST_CASE("permutation diagonal detection") {
  CHECK(is_permutation_diagonal(ContingencyTable(2, 2, {0, 3, 1, 0})));
  CHECK(is_permutation_diagonal(ContingencyTable(1, 1, {4})));
  CHECK_FALSE(is_permutation_diagonal(ContingencyTable(2, 2, {2, 1, 0, 1})));
  CHECK_FALSE(is_permutation_diagonal(ContingencyTable(2, 1, {1, 1})));
}

TEST_CASE("bound holds on small exhaustive cases") {
  {
    BoundCheckConfig cfg;
    cfg.q_c = 2;
    cfg.q_g = 2;
    cfg.n_max = 30;
    cfg.omega = OmegaMode::exact;
    const auto r = check_bound(cfg);
    CHECK(r.cases_checked == [] {
      std::uint64_t s = 0;
      for (int n = 2; n <= 30; ++n) s += static_cast<std::uint64_t>(table_count_oracle(2, 2, n));
      return s;
    }());
    CHECK(r.ok());
    CHECK(r.max_off_diagonal_gap < 0.0);
  }
  {
    BoundCheckConfig cfg;
    cfg.q_c = 3;
    cfg.q_g = 2;
    cfg.n_max = 20;
    cfg.omega = OmegaMode::effective_columns;
    const auto r = check_bound(cfg);
    CHECK(r.violations.empty());
    CHECK(r.equality_failures.empty());
    CHECK(r.spurious_equalities.empty());
  }
}

TEST_CASE("diagonal tables reach the bound exactly") {
  const ContingencyTable t(2, 2, {2, 0, 0, 1});
  const auto spec = MeasureSpec::reduced(Normalization::none, OmegaMode::exact);
  const double i_cg = base_measure(t, spec);
  const double i_gg = self_measure(t.col_sums(), spec);
  CHECK(std::abs(i_cg - i_gg) <= 1e-12);
}

TEST_CASE("single flip examples") {
  const std::vector<Count> two{2, 2};
  const auto d = single_flip_delta(two, 0, 1);
  CHECK(d.alpha == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(d.delta_i0 == doctest::Approx(std::log(3.0)).epsilon(1e-13));
  CHECK(d.delta_rmi > 0.0);
  CHECK(d.delta_rmi == doctest::Approx(std::log(2.0 * (2.0 + 4.0) / (2.0 + 4.0 - 1.0))).epsilon(1e-12));

  const std::vector<Count> three{3, 3};
  CHECK(single_flip_delta(three, 1, 0).delta_rmi > 0.0);
}

TEST_CASE("single flip matches the closed form and the measures module") {
  std::mt19937_64 rng(53);
  int checked = 0;
  while (checked < 300) {
    const int q = 2 + static_cast<int>(rng() % 5);
    std::vector<Count> sizes(static_cast<std::size_t>(q));
    for (auto& s : sizes) s = 2 + static_cast<Count>(rng() % 15);
    const auto alpha = effective_alpha(sizes, sizes.size());
    if (!alpha || *alpha < 1.0) continue;
    const std::size_t from = rng() % sizes.size();
    std::size_t to = rng() % sizes.size();
    if (to == from) to = (to + 1) % sizes.size();
    const auto d = single_flip_delta(sizes, from, to);
    const double n1 = static_cast<double>(sizes[from]);
    const double n2 = static_cast<double>(sizes[to]);
    CHECK(d.delta_rmi == doctest::Approx(std::log(n1 * (n2 + *alpha) / (n1 + *alpha - 1.0))).epsilon(1e-9));
    CHECK(d.delta_i0 == doctest::Approx(std::log(n2 + 1.0)).epsilon(1e-12));

    // Build the labelings and recompute through the measures module.
    std::vector<std::int64_t> g;
    for (std::size_t r = 0; r < sizes.size(); ++r) g.insert(g.end(), static_cast<std::size_t>(sizes[r]), static_cast<std::int64_t>(r));
    std::vector<std::int64_t> c = g;
    for (auto& v : c)
      if (v == static_cast<std::int64_t>(from)) {
        v = static_cast<std::int64_t>(to);
        break;
      }
    const Labeling gl{std::span<const std::int64_t>(g)};
    const Labeling cl{std::span<const std::int64_t>(c)};
    const double via_measures = i0_factorial(ContingencyTable::from_labelings(gl, gl)) -
                                i0_factorial(ContingencyTable::from_labelings(cl, gl));
    CHECK(std::abs(via_measures - d.delta_i0) <= 1e-9);
    const auto spec = MeasureSpec::reduced(Normalization::none, OmegaMode::effective_columns);
    const double rmi_drop = score(gl, gl, spec).raw - score(cl, gl, spec).raw;
    CHECK(std::abs(rmi_drop - d.delta_rmi) <= 1e-9);
    ++checked;
  }
}

TEST_CASE("single flip preconditions") {
  const std::vector<Count> sizes{1, 3};
  CHECK_THROWS_AS(single_flip_delta(sizes, 0, 1), DomainError);
  CHECK_THROWS_AS(single_flip_delta(sizes, 1, 1), DomainError);
  CHECK_THROWS_AS(single_flip_delta(sizes, 1, 5), DomainError);
}

TEST_CASE("bound check is deterministic") {
  BoundCheckConfig cfg;
  cfg.q_c = 3;
  cfg.q_g = 3;
  cfg.n_max = 8;
  const auto a = check_bound(cfg);
  const auto b = check_bound(cfg);
  CHECK(a.cases_checked == b.cases_checked);
  CHECK(a.max_off_diagonal_gap == b.max_off_diagonal_gap);
  CHECK(a.ok());
}

TEST_SUITE_END();
