#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "partmi/core.hpp"
#include "partmi/measures.hpp"

namespace partmi::harness {

/// Seedable generator with output that is identical on every platform:
/// mt19937_64 for the raw stream, with integer and real draws derived from
/// its bits directly rather than through the library distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, a, b): the pair is mixed into the seed
  /// with splitmix64.
  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct PerturbationSpec {
  enum class Kind { relabel_noise, oversplit, merge, singletons, one_group };
  Kind kind = Kind::relabel_noise;
  double p = 0.0;     // relabel_noise: per-object reassignment probability
  int k = 1;          // oversplit: pieces per group
  int pairs = 0;      // merge: number of group pairs merged
  std::uint64_t seed = 0;

  static PerturbationSpec relabel_noise(double p, std::uint64_t seed);
  static PerturbationSpec oversplit(int k, std::uint64_t seed);
  static PerturbationSpec merge(int pairs, std::uint64_t seed);
  static PerturbationSpec singletons();
  static PerturbationSpec one_group();
};

/// Applies the perturbation to a copy of g. relabel_noise moves each object
/// with probability p to a uniformly chosen existing group (possibly its
/// own). oversplit cuts each group into k random pieces of near-equal size;
/// groups smaller than k become singletons. merge joins `pairs` random
/// pairs of groups (as many as exist).
Labeling perturb(const Labeling& g, const PerturbationSpec& spec);

/// Group sizes for a planted truth of n objects.
struct SizeModel {
  /// Explicit sizes; when non-empty they must sum to n.
  std::vector<Count> explicit_sizes;
  double tau = 1.5;
  /// Power-law bounds; zero selects the defaults min(20, max(2, n/10)) and
  /// max(n/10, 100) capped at n.
  Count min_size = 0;
  Count max_size = 0;
};

std::vector<Count> planted_sizes(Count n, const SizeModel& model, Rng& rng);

/// Random assignment of objects to groups with exactly the given sizes.
Labeling planted_labeling(std::span<const Count> sizes, Rng& rng);

struct RankFlip {
  Labeling truth;
  Labeling cand_a;
  Labeling cand_b;
  double i0_a = 0.0;
  double i0_b = 0.0;
  double sym_a = 0.0;
  double sym_b = 0.0;
  double asym_a = 0.0;
  double asym_b = 0.0;
  std::uint64_t samples = 0;
};

/// Random search for (g, c_A, c_B) with I0(c_A;g) > I0(c_B;g) but the
/// arithmetic-mean normalized I0 ordering them the other way. Asymmetric
/// normalization is checked to keep the I0 order on the result.
std::optional<RankFlip> find_rank_flip(std::size_t n, std::uint64_t seed, std::uint64_t budget);

/// Same search over every triple of set partitions of n objects.
std::optional<RankFlip> exhaustive_rank_flip(std::size_t n);

/// All set partitions of n objects in canonical (restricted growth) form.
std::vector<Labeling> all_labelings(std::size_t n);

struct SweepConfig {
  Count n = 400;
  SizeModel sizes;
  std::uint64_t seed = 1;
  int replicates = 10;
  /// Grid axes. Every combination is one grid point; each point applies
  /// merge, then oversplit, then relabel noise. The `singletons` and
  /// `one_group` kinds ignore the axes.
  std::vector<std::string> kinds{"perturb"};
  std::vector<double> noise{0.0};
  std::vector<int> split{1};
  std::vector<int> merge{0};
  std::vector<MeasureSpec> measures = standard_measures();
  ExactCountOptions exact{};
};

struct SweepRecord {
  std::string kind;
  double noise = 0.0;
  int split = 1;
  int merge = 0;
  int replicate = 0;
  Count n = 0;
  std::size_t q_g = 0;
  std::size_t q_c = 0;
  /// Measure name to score; empty optional marks an undefined value.
  std::vector<std::pair<std::string, std::optional<double>>> scores;
};

/// Parses the `key = value` sweep configuration format (see README).
SweepConfig parse_sweep_config(std::istream& in);

std::vector<SweepRecord> run_sweep(const SweepConfig& config);

void write_csv(std::ostream& out, const SweepConfig& config, const std::vector<SweepRecord>& records);
std::string manifest_json(const SweepConfig& config, std::size_t records);

}  // namespace partmi::harness
