#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "partmi/measures.hpp"

using namespace partmi;

namespace {

Labeling random_labeling(std::mt19937_64& rng, std::size_t n, int q) {
  std::uniform_int_distribution<int> pick(0, q - 1);
  std::vector<std::int64_t> raw(n);
  for (auto& v : raw) v = pick(rng);
  return Labeling(std::span<const std::int64_t>(raw));
}

ContingencyTable table_of(const Labeling& c, const Labeling& g) { return ContingencyTable::from_labelings(c, g); }

// ln of an exact integer ratio, for small factorial oracles.
double ln_fact_int(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return std::log(f);
}

std::vector<MeasureSpec> all_specs() {
  std::vector<MeasureSpec> out;
  for (auto norm : {Normalization::none, Normalization::sym_arith, Normalization::sym_geo, Normalization::sym_min,
                    Normalization::sym_max, Normalization::asym}) {
    out.push_back(MeasureSpec::plain(norm));
    MeasureSpec st = MeasureSpec::plain(norm);
    st.form = MiForm::stirling;
    out.push_back(st);
    out.push_back(MeasureSpec::adjusted(norm));
    out.push_back(MeasureSpec::reduced(norm, OmegaMode::exact));
    out.push_back(MeasureSpec::reduced(norm, OmegaMode::effective_columns));
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("measures");

TEST_CASE("h0 examples") {
  CHECK(h0(Labeling{1, 1, 1, 1}) == 0.0);
  CHECK(h0(Labeling{1, 1, 2, 2}) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK(h0(Labeling{1, 2, 3}) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
}

TEST_CASE("h_full examples and strict excess over h0") {
  CHECK(h_full(Labeling{1, 1, 1, 1}) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(h_full(Labeling{1, 1, 2, 2}) == doctest::Approx(std::log(4.0) + std::log(3.0) + std::log(6.0)).epsilon(1e-14));
  CHECK(h_full(Labeling{1}) == 0.0);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto l = random_labeling(rng, 2 + t % 20, 1 + t % 5);
    CHECK(h_full(l) > h0(l));
  }
}

TEST_CASE("h_conditional examples") {
  const Labeling g{1, 1, 2, 2};
  {
    const auto t = table_of(g, g);
    const double omega = log_omega_exact(t.row_sums(), t.col_sums()).log_omega;
    CHECK(h_conditional(t, OmegaMode::exact) == doctest::Approx(h_full(g) - (i0_factorial(t) - omega)).epsilon(1e-13));
  }
  {
    const Labeling g21{1, 1, 2};
    const auto t = table_of(Labeling::singletons(3), g21);
    CHECK(h_conditional(t, OmegaMode::exact) == doctest::Approx(h_full(g21)).epsilon(1e-13));
  }
  {
    const auto t = table_of(Labeling{1, 2, 2, 3, 1}, Labeling::one_group(5));
    CHECK(h_conditional(t, OmegaMode::exact) == doctest::Approx(std::log(5.0)).epsilon(1e-13));
  }
}

TEST_CASE("i0_factorial examples") {
  const Labeling g{1, 1, 2, 2, 2, 3};
  CHECK(i0_factorial(table_of(Labeling::singletons(6), g)) == doctest::Approx(h0(g)).epsilon(1e-13));
  CHECK(i0_factorial(table_of(g, g)) == doctest::Approx(h0(g)).epsilon(1e-13));
  const ContingencyTable t(2, 2, {2, 1, 0, 1});
  // 4! 2! 1! 0! 1! / (3! 1! 2! 2!) = 48 / 24 = 2
  const double oracle = ln_fact_int(4) + ln_fact_int(2) - ln_fact_int(3) - 2 * ln_fact_int(2);
  CHECK(oracle == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(i0_factorial(t) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("i0_stirling examples") {
  CHECK(i0_stirling(ContingencyTable(2, 2, {2, 0, 0, 2})) == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(std::abs(i0_stirling(ContingencyTable(2, 2, {1, 1, 1, 1}))) <= 1e-15);
  const double oracle =
      4.0 * (0.5 * std::log(0.5 / (0.75 * 0.5)) + 0.25 * std::log(0.25 / (0.75 * 0.5)) +
             0.25 * std::log(0.25 / (0.25 * 0.5)));
  CHECK(i0_stirling(ContingencyTable(2, 2, {2, 1, 0, 1})) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("expected_i0: deterministic and singleton margins") {
  CHECK(std::abs(expected_i0_fixed_margins(std::vector<Count>{6}, std::vector<Count>{2, 3, 1})) <= 1e-12);
  for (Count n = 1; n <= 30; ++n) {
    const std::vector<Count> ones(static_cast<std::size_t>(n), 1);
    CHECK(expected_i0_fixed_margins(ones, ones) == doctest::Approx(log_factorial(n)).epsilon(1e-12));
  }
}

TEST_CASE("expected_i0: exhaustive average at n = 4") {
  // Every labeling with sizes (2,2) against a fixed truth with sizes (2,2).
  const Labeling g{1, 1, 2, 2};
  std::vector<std::int64_t> c{0, 0, 1, 1};
  double sum = 0.0;
  int count = 0;
  do {
    sum += i0_factorial(table_of(Labeling(std::span<const std::int64_t>(c)), g));
    ++count;
  } while (std::next_permutation(c.begin(), c.end()));
  CHECK(count == 6);
  const double exhaustive = sum / count;
  CHECK(std::abs(expected_i0_fixed_margins(std::vector<Count>{2, 2}, std::vector<Count>{2, 2}) - exhaustive) <= 1e-9);
}

TEST_CASE("expected_i0: Monte Carlo over random permutations") {
  std::mt19937_64 rng(17);
  const std::vector<Count> sizes_c{5, 9, 3, 7};
  const std::vector<Count> sizes_g{8, 8, 8};
  std::vector<std::int64_t> c;
  std::vector<std::int64_t> g;
  for (std::size_t i = 0; i < sizes_c.size(); ++i) c.insert(c.end(), static_cast<std::size_t>(sizes_c[i]), static_cast<std::int64_t>(i));
  for (std::size_t i = 0; i < sizes_g.size(); ++i) g.insert(g.end(), static_cast<std::size_t>(sizes_g[i]), static_cast<std::int64_t>(i));
  const Labeling truth{std::span<const std::int64_t>(g)};
  constexpr int kSamples = 100'000;
  double mean = 0.0;
  double m2 = 0.0;
  for (int k = 1; k <= kSamples; ++k) {
    std::shuffle(c.begin(), c.end(), rng);
    const double v = i0_factorial(table_of(Labeling(std::span<const std::int64_t>(c)), truth));
    const double delta = v - mean;
    mean += delta / k;
    m2 += delta * (v - mean);
  }
  const double se = std::sqrt(m2 / (kSamples - 1) / kSamples);
  const double exact = expected_i0_fixed_margins(sizes_c, sizes_g);
  CHECK(std::abs(mean - exact) <= 3.0 * se);
}

TEST_CASE("spec validation and names") {
  MeasureSpec bad = MeasureSpec::adjusted();
  bad.omega = OmegaMode::exact;
  CHECK_THROWS_AS(bad.validate(), InputError);
  MeasureSpec no_omega = MeasureSpec::reduced();
  no_omega.omega.reset();
  CHECK_THROWS_AS(no_omega.validate(), InputError);
  MeasureSpec stirling_reduced = MeasureSpec::reduced();
  stirling_reduced.form = MiForm::stirling;
  CHECK_THROWS_AS(stirling_reduced.validate(), InputError);

  const MeasureSpec def;
  CHECK(def.base == Base::reduced);
  CHECK(def.normalization == Normalization::asym);
  CHECK(def.omega == OmegaMode::effective_columns);
  CHECK(def.form == MiForm::factorial);
  CHECK(def.units == Units::nats);

  for (const auto& s : all_specs()) CHECK(MeasureSpec::parse(s.name()) == s);
  CHECK(MeasureSpec::parse("reduced") == MeasureSpec::reduced());
  CHECK_THROWS_AS(MeasureSpec::parse("adjusted_asym:exact"), InputError);
  CHECK_THROWS_AS(MeasureSpec::parse("fancy_asym"), InputError);
  CHECK(standard_measures().size() == 6);
}

TEST_CASE("perfect match scores one under every normalization") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const auto g = random_labeling(rng, 6 + t, 2 + t % 4);
    for (const auto& spec : all_specs()) {
      if (spec.normalization == Normalization::none) continue;
      const auto rep = score(g, g, spec);
      REQUIRE(rep.defined);
      CHECK(rep.score == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("singleton candidate has zero reduced information with exact omega") {
  const Labeling g{1, 1, 2};
  auto rep = score(Labeling::singletons(3), g, MeasureSpec::reduced(Normalization::none, OmegaMode::exact));
  CHECK(std::abs(rep.score) <= 1e-12);
  rep = score(Labeling::singletons(3), g, MeasureSpec::reduced(Normalization::asym, OmegaMode::exact));
  REQUIRE(rep.defined);
  CHECK(std::abs(rep.score) <= 1e-12);
  const auto plain = score(Labeling::singletons(3), g, MeasureSpec::plain());
  CHECK(plain.score == doctest::Approx(h0(g)).epsilon(1e-13));
}

TEST_CASE("single-group truth leaves the asymmetric score undefined") {
  const Labeling g = Labeling::one_group(5);
  const Labeling c{1, 2, 1, 2, 3};
  for (auto base : {Base::plain, Base::adjusted, Base::reduced}) {
    MeasureSpec spec{base, Normalization::asym, base == Base::reduced ? std::optional(OmegaMode::exact) : std::nullopt};
    const auto rep = score(c, g, spec);
    CHECK_FALSE(rep.defined);
    CHECK(rep.score == rep.raw);
    REQUIRE(rep.denominator.has_value());
    CHECK(std::abs(*rep.denominator) <= 1e-12);
  }
}

TEST_CASE("report intermediates reconstruct the score") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 50; ++t) {
    const auto g = random_labeling(rng, 10 + t, 2 + t % 4);
    const auto c = random_labeling(rng, 10 + t, 1 + t % 6);
    for (auto mode : {OmegaMode::exact, OmegaMode::effective_columns}) {
      const auto rep = score(c, g, MeasureSpec::reduced(Normalization::asym, mode));
      const auto self = log_omega(g.group_sizes(), g.group_sizes(), mode).log_omega;
      REQUIRE(rep.defined);
      CHECK(rep.score == doctest::Approx((rep.i0 - *rep.log_omega) / (rep.h0_g - self)).epsilon(1e-12));
    }
    const auto adj = score(c, g, MeasureSpec::adjusted(Normalization::sym_arith));
    if (adj.defined) {
      CHECK(adj.raw == doctest::Approx(adj.i0 - *adj.expected_i0).epsilon(1e-12).scale(1.0));
      CHECK(adj.score == doctest::Approx(adj.raw / (0.5 * (*adj.self_c + *adj.self_g))).epsilon(1e-12));
    }
    const auto geo = score(c, g, MeasureSpec::plain(Normalization::sym_geo));
    if (geo.defined) CHECK(geo.score == doctest::Approx(geo.i0 / std::sqrt(geo.h0_c * geo.h0_g)).epsilon(1e-12));
  }
}

TEST_CASE("symmetry, bounds and decomposition on random tables") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + t % 40;
    const auto c = random_labeling(rng, n, 1 + t % 7);
    const auto g = random_labeling(rng, n, 1 + (t / 7) % 6);
    const auto tab = table_of(c, g);
    const double i0 = i0_factorial(tab);
    CHECK(std::abs(i0 - i0_factorial(tab.transposed())) <= 1e-9);
    CHECK(std::abs(i0_stirling(tab) - i0_stirling(tab.transposed())) <= 1e-9);
    CHECK(i0 >= -1e-9);
    CHECK(i0 <= std::min(h0(c), h0(g)) + 1e-9);
    if (n <= 25) {
      const double omega = log_omega_exact(tab.row_sums(), tab.col_sums()).log_omega;
      CHECK(std::abs((h_full(g) - h_conditional(tab, OmegaMode::exact)) - (i0 - omega)) <= 1e-9);
    }
  }
}

TEST_CASE("scores are invariant under relabeling either side") {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 8 + t;
    const auto c = random_labeling(rng, n, 2 + t % 5);
    const auto g = random_labeling(rng, n, 2 + t % 3);
    // Permute group names by mapping id -> (perm[id] + 100).
    auto relabel = [&](const Labeling& l) {
      std::vector<std::int64_t> perm(l.num_groups());
      std::iota(perm.begin(), perm.end(), 100);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<std::int64_t> raw(l.size());
      for (std::size_t i = 0; i < l.size(); ++i) raw[i] = perm[static_cast<std::size_t>(l.group(i))];
      // Reverse the object order of the raw ids too, then undo it, so the
      // canonical first-occurrence order differs from the original.
      return Labeling(std::span<const std::int64_t>(raw));
    };
    const auto c2 = relabel(c);
    const auto g2 = relabel(g);
    for (const auto& spec : standard_measures(OmegaMode::exact)) {
      const auto a = score(c, g, spec);
      const auto b = score(c2, g2, spec);
      CHECK(a.defined == b.defined);
      CHECK(a.score == doctest::Approx(b.score).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("stirling form approaches the factorial form per object") {
  double previous = std::numeric_limits<double>::infinity();
  for (Count n = 8; n <= 1024; n *= 2) {
    const Count u = n / 8;
    const ContingencyTable t(2, 2, {3 * u, u, u, 3 * u});
    const double per_object = std::abs(i0_stirling(t) - i0_factorial(t)) / static_cast<double>(n);
    CHECK(per_object < previous);
    previous = per_object;
  }
  CHECK(previous < 0.01);
}

TEST_CASE("adjusted score has zero mean over random permutations") {
  std::mt19937_64 rng(41);
  std::vector<std::int64_t> c(60);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<std::int64_t>(i % 4);
  std::vector<std::int64_t> graw(60);
  for (std::size_t i = 0; i < graw.size(); ++i) graw[i] = static_cast<std::int64_t>(i < 30 ? 0 : (i < 45 ? 1 : 2));
  const Labeling g{std::span<const std::int64_t>(graw)};
  constexpr int kSamples = 20'000;
  double mean = 0.0;
  double m2 = 0.0;
  for (int k = 1; k <= kSamples; ++k) {
    std::shuffle(c.begin(), c.end(), rng);
    const double v = adjusted_mi(table_of(Labeling(std::span<const std::int64_t>(c)), g));
    const double d = v - mean;
    mean += d / k;
    m2 += d * (v - mean);
  }
  const double se = std::sqrt(m2 / (kSamples - 1) / kSamples);
  CHECK(std::abs(mean) <= 3.0 * se);
}

TEST_CASE("asymmetric normalization preserves the base ranking") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 6 + t % 30;
    const auto g = random_labeling(rng, n, 2 + t % 4);
    const auto c1 = random_labeling(rng, n, 1 + t % 6);
    const auto c2 = random_labeling(rng, n, 1 + (t / 6) % 6);
    for (auto base : {Base::plain, Base::adjusted, Base::reduced}) {
      MeasureSpec asym{base, Normalization::asym,
                       base == Base::reduced ? std::optional(OmegaMode::effective_columns) : std::nullopt};
      const auto a1 = score(c1, g, asym);
      const auto a2 = score(c2, g, asym);
      if (!a1.defined || *a1.denominator <= 0.0) continue;
      const double base_diff = a1.raw - a2.raw;
      if (std::abs(base_diff) < 1e-9) continue;
      CHECK((a1.score - a2.score > 0) == (base_diff > 0));
    }
  }
}

TEST_CASE("bits are nats divided by ln 2") {
  const Labeling g{1, 1, 2, 2, 3, 3, 3};
  const Labeling c{1, 2, 2, 2, 3, 3, 1};
  for (auto spec : all_specs()) {
    const auto nats = score(c, g, spec);
    spec.units = Units::bits;
    const auto bits = score(c, g, spec);
    CHECK(bits.i0 == nats.i0 / std::numbers::ln2);
    CHECK(bits.raw == nats.raw / std::numbers::ln2);
    CHECK(bits.h0_g == nats.h0_g / std::numbers::ln2);
    if (spec.normalization == Normalization::none) CHECK(bits.score == nats.score / std::numbers::ln2);
    else CHECK(bits.score == doctest::Approx(nats.score).epsilon(1e-14));
  }
}

TEST_CASE("negative scores are reported, not clamped") {
  // A random-looking candidate scores below zero under the reduced measure.
  const Labeling g{1, 1, 1, 1, 2, 2, 2, 2};
  const Labeling c{1, 2, 3, 1, 2, 3, 1, 2};
  const auto rep = score(c, g, MeasureSpec::reduced(Normalization::asym, OmegaMode::exact));
  CHECK(rep.defined);
  CHECK(rep.score < 0.0);
}

TEST_SUITE_END();
