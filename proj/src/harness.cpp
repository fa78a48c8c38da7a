#include "partmi/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace partmi::harness {

namespace {

constexpr double kOrderEps = 1e-9;

Labeling from_ids(const std::vector<std::int64_t>& ids) { return Labeling(std::span<const std::int64_t>(ids)); }

std::vector<std::int64_t> ids_of(const Labeling& l) {
  return std::vector<std::int64_t>(l.groups().begin(), l.groups().end());
}

Labeling random_labeling(std::size_t n, Rng& rng) {
  const std::uint64_t q = 1 + rng.below(n);
  std::vector<std::int64_t> ids(n);
  for (auto& id : ids) id = static_cast<std::int64_t>(rng.below(q));
  return from_ids(ids);
}

struct Evaluated {
  double i0;
  double sym;
  double asym;
};

std::optional<Evaluated> evaluate(const Labeling& c, const Labeling& g, double h0_g) {
  const auto table = ContingencyTable::from_labelings(c, g);
  const double i0 = i0_factorial(table);
  const double denom = 0.5 * (h0_from_sizes(table.row_sums()) + h0_g);
  if (!(denom > 0.0) || !(h0_g > 0.0)) return std::nullopt;
  return Evaluated{i0, i0 / denom, i0 / h0_g};
}

std::optional<RankFlip> check_triple(const Labeling& g, const Labeling& a, const Labeling& b, double h0_g) {
  const auto ea = evaluate(a, g, h0_g);
  const auto eb = evaluate(b, g, h0_g);
  if (!ea || !eb) return std::nullopt;
  if (!(ea->i0 > eb->i0 + kOrderEps && ea->sym < eb->sym - kOrderEps)) return std::nullopt;
  if (!(ea->asym > eb->asym))
    throw std::logic_error("asymmetric normalization reversed the I0 order on a rank-flip triple");
  return RankFlip{g, a, b, ea->i0, eb->i0, ea->sym, eb->sym, ea->asym, eb->asym, 0};
}

// --- config parsing ---------------------------------------------------

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(std::string value) {
  value = trim(value);
  if (!value.empty() && value.front() == '[') {
    if (value.back() != ']') throw InputError("unterminated list `" + value + "`");
    value = value.substr(1, value.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw InputError("sweep config: bad value `" + text + "` for " + key);
  return value;
}

template <class T>
std::vector<T> parse_numbers(const std::string& key, const std::string& value) {
  std::vector<T> out;
  for (const auto& item : split_list(value)) out.push_back(parse_number<T>(key, item));
  if (out.empty()) throw InputError("sweep config: " + key + " needs at least one value");
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return Rng(splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b));
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("Rng::below needs a positive bound");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

PerturbationSpec PerturbationSpec::relabel_noise(double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("relabel noise probability must lie in [0, 1]");
  PerturbationSpec s;
  s.kind = Kind::relabel_noise;
  s.p = p;
  s.seed = seed;
  return s;
}

PerturbationSpec PerturbationSpec::oversplit(int k, std::uint64_t seed) {
  if (k < 1) throw DomainError("oversplit needs k >= 1");
  PerturbationSpec s;
  s.kind = Kind::oversplit;
  s.k = k;
  s.seed = seed;
  return s;
}

PerturbationSpec PerturbationSpec::merge(int pairs, std::uint64_t seed) {
  if (pairs < 0) throw DomainError("merge needs a non-negative pair count");
  PerturbationSpec s;
  s.kind = Kind::merge;
  s.pairs = pairs;
  s.seed = seed;
  return s;
}

PerturbationSpec PerturbationSpec::singletons() {
  PerturbationSpec s;
  s.kind = Kind::singletons;
  return s;
}

PerturbationSpec PerturbationSpec::one_group() {
  PerturbationSpec s;
  s.kind = Kind::one_group;
  return s;
}

Labeling perturb(const Labeling& g, const PerturbationSpec& spec) {
  Rng rng(spec.seed);
  const std::size_t n = g.size();
  switch (spec.kind) {
    case PerturbationSpec::Kind::singletons: return Labeling::singletons(n);
    case PerturbationSpec::Kind::one_group: return Labeling::one_group(n);
    case PerturbationSpec::Kind::relabel_noise: {
      if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw DomainError("relabel noise probability must lie in [0, 1]");
      auto ids = ids_of(g);
      const std::uint64_t q = g.num_groups();
      for (auto& id : ids)
        if (rng.uniform() < spec.p) id = static_cast<std::int64_t>(rng.below(q));
      return from_ids(ids);
    }
    case PerturbationSpec::Kind::oversplit: {
      if (spec.k < 1) throw DomainError("oversplit needs k >= 1");
      std::vector<std::vector<std::size_t>> members(g.num_groups());
      for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(g.group(i))].push_back(i);
      std::vector<std::int64_t> ids(n);
      const auto k = static_cast<std::size_t>(spec.k);
      for (std::size_t grp = 0; grp < members.size(); ++grp) {
        rng.shuffle(members[grp]);
        for (std::size_t j = 0; j < members[grp].size(); ++j)
          ids[members[grp][j]] = static_cast<std::int64_t>(grp * k + j % k);
      }
      return from_ids(ids);
    }
    case PerturbationSpec::Kind::merge: {
      if (spec.pairs < 0) throw DomainError("merge needs a non-negative pair count");
      std::vector<std::int64_t> order(g.num_groups());
      std::iota(order.begin(), order.end(), 0);
      rng.shuffle(order);
      std::vector<std::int64_t> target(g.num_groups());
      std::iota(target.begin(), target.end(), 0);
      const std::size_t pairs = std::min<std::size_t>(static_cast<std::size_t>(spec.pairs), order.size() / 2);
      for (std::size_t i = 0; i < pairs; ++i)
        target[static_cast<std::size_t>(order[2 * i + 1])] = order[2 * i];
      auto ids = ids_of(g);
      for (auto& id : ids) id = target[static_cast<std::size_t>(id)];
      return from_ids(ids);
    }
  }
  throw std::logic_error("unhandled perturbation kind");
}

std::vector<Count> planted_sizes(Count n, const SizeModel& model, Rng& rng) {
  if (n < 1) throw InputError("planted labeling needs n >= 1");
  if (!model.explicit_sizes.empty()) {
    for (Count s : model.explicit_sizes)
      if (s <= 0) throw InputError("explicit group sizes must be positive");
    if (std::accumulate(model.explicit_sizes.begin(), model.explicit_sizes.end(), Count{0}) != n)
      throw InputError("explicit group sizes must sum to n");
    return model.explicit_sizes;
  }
  if (!(model.tau > 1.0)) throw InputError("power-law exponent tau must exceed 1");
  const Count smin = model.min_size > 0 ? model.min_size : std::min<Count>(20, std::max<Count>(2, n / 10));
  Count smax = model.max_size > 0 ? model.max_size : std::max<Count>(n / 10, 100);
  smax = std::max(std::min(smax, n), std::min(smin, n));

  // Continuous power law on [smin, smax + 1), floored.
  const double e = 1.0 - model.tau;
  const double lo = std::pow(static_cast<double>(smin), e);
  const double hi = std::pow(static_cast<double>(smax) + 1.0, e);
  std::vector<Count> sizes;
  Count total = 0;
  while (total < n) {
    const double x = std::pow(lo + rng.uniform() * (hi - lo), 1.0 / e);
    Count s = std::clamp<Count>(static_cast<Count>(std::floor(x)), smin, smax);
    s = std::min(s, n - total);
    if (s < smin && !sizes.empty()) {
      sizes[rng.below(sizes.size())] += s;
    } else {
      sizes.push_back(s);
    }
    total += s;
  }
  return sizes;
}

Labeling planted_labeling(std::span<const Count> sizes, Rng& rng) {
  std::vector<std::int64_t> ids;
  for (std::size_t grp = 0; grp < sizes.size(); ++grp)
    ids.insert(ids.end(), static_cast<std::size_t>(sizes[grp]), static_cast<std::int64_t>(grp));
  rng.shuffle(ids);
  return from_ids(ids);
}

std::optional<RankFlip> find_rank_flip(std::size_t n, std::uint64_t seed, std::uint64_t budget) {
  if (n < 4) throw DomainError("rank-flip search needs n >= 4");
  Rng rng(seed);
  for (std::uint64_t sample = 1; sample <= budget; ++sample) {
    const Labeling g = random_labeling(n, rng);
    const Labeling a = random_labeling(n, rng);
    const Labeling b = random_labeling(n, rng);
    const double h0_g = h0(g);
    if (auto flip = check_triple(g, a, b, h0_g)) {
      flip->samples = sample;
      return flip;
    }
  }
  return std::nullopt;
}

std::vector<Labeling> all_labelings(std::size_t n) {
  if (n == 0 || n > 12) throw DomainError("all_labelings supports 1 <= n <= 12");
  std::vector<Labeling> out;
  std::vector<std::int64_t> rgs(n, 0);
  std::vector<std::int64_t> max_prefix(n, 0);  // max of rgs[0..i]
  for (;;) {
    out.push_back(from_ids(rgs));
    // Next restricted growth string: increment the rightmost position that
    // can grow, reset everything after it.
    std::size_t i = n - 1;
    while (i > 0 && rgs[i] > max_prefix[i - 1]) --i;
    if (i == 0) break;
    ++rgs[i];
    max_prefix[i] = std::max(max_prefix[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      max_prefix[j] = max_prefix[j - 1];
    }
  }
  return out;
}

std::optional<RankFlip> exhaustive_rank_flip(std::size_t n) {
  const auto labelings = all_labelings(n);
  std::uint64_t examined = 0;
  for (const auto& g : labelings) {
    const double h0_g = h0(g);
    if (!(h0_g > 0.0)) continue;
    for (const auto& a : labelings) {
      for (const auto& b : labelings) {
        ++examined;
        if (auto flip = check_triple(g, a, b, h0_g)) {
          flip->samples = examined;
          return flip;
        }
      }
    }
  }
  return std::nullopt;
}

SweepConfig parse_sweep_config(std::istream& in) {
  SweepConfig cfg;
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw InputError("sweep config line " + std::to_string(lineno) + ": expected `key = value`");
    values[trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
  }

  OmegaMode omega = OmegaMode::effective_columns;
  if (auto it = values.find("omega"); it != values.end()) omega = parse_omega_mode(unquote(it->second));
  cfg.measures = standard_measures(omega);

  for (const auto& [key, value] : values) {
    if (key == "n") {
      cfg.n = parse_number<Count>(key, unquote(value));
    } else if (key == "sizes") {
      const auto items = split_list(value);
      if (!(items.size() == 1 && items.front() == "powerlaw"))
        for (const auto& item : items) cfg.sizes.explicit_sizes.push_back(parse_number<Count>(key, item));
    } else if (key == "tau") {
      cfg.sizes.tau = parse_number<double>(key, unquote(value));
    } else if (key == "min_size") {
      cfg.sizes.min_size = parse_number<Count>(key, unquote(value));
    } else if (key == "max_size") {
      cfg.sizes.max_size = parse_number<Count>(key, unquote(value));
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, unquote(value));
    } else if (key == "replicates") {
      cfg.replicates = parse_number<int>(key, unquote(value));
    } else if (key == "kinds") {
      cfg.kinds = split_list(value);
    } else if (key == "noise") {
      cfg.noise = parse_numbers<double>(key, value);
    } else if (key == "split") {
      cfg.split = parse_numbers<int>(key, value);
    } else if (key == "merge") {
      cfg.merge = parse_numbers<int>(key, value);
    } else if (key == "measures") {
      cfg.measures.clear();
      for (const auto& name : split_list(value)) cfg.measures.push_back(MeasureSpec::parse(name, omega));
    } else if (key == "budget") {
      cfg.exact.node_budget = parse_number<std::uint64_t>(key, unquote(value));
    } else if (key != "omega") {
      throw InputError("sweep config: unknown key `" + key + "`");
    }
  }

  if (cfg.n < 1) throw InputError("sweep config: n must be positive");
  if (cfg.replicates < 1) throw InputError("sweep config: replicates must be positive");
  if (cfg.measures.empty()) throw InputError("sweep config: no measures selected");
  for (const auto& k : cfg.kinds)
    if (k != "perturb" && k != "singletons" && k != "one_group")
      throw InputError("sweep config: unknown kind `" + k + "` (expected perturb, singletons or one_group)");
  for (double p : cfg.noise)
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("sweep config: noise values must lie in [0, 1]");
  for (int k : cfg.split)
    if (k < 1) throw InputError("sweep config: split values must be >= 1");
  for (int m : cfg.merge)
    if (m < 0) throw InputError("sweep config: merge values must be >= 0");
  if (!cfg.sizes.explicit_sizes.empty()) {
    Count total = 0;
    for (Count s : cfg.sizes.explicit_sizes) {
      if (s <= 0) throw InputError("sweep config: sizes must be positive");
      total += s;
    }
    if (total != cfg.n) throw InputError("sweep config: sizes must sum to n");
  }
  return cfg;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
  std::vector<SweepRecord> records;
  std::uint64_t grid_index = 0;
  for (const auto& kind : config.kinds) {
    for (int merge : config.merge) {
      for (int split : config.split) {
        for (double noise : config.noise) {
          ++grid_index;
          for (int rep = 0; rep < config.replicates; ++rep) {
            // The truth depends on the replicate only, so every grid point
            // perturbs the same planted labeling.
            Rng truth_rng = Rng::substream(config.seed, 0, static_cast<std::uint64_t>(rep));
            const auto sizes = planted_sizes(config.n, config.sizes, truth_rng);
            const Labeling g = planted_labeling(sizes, truth_rng);

            Rng rng = Rng::substream(config.seed, grid_index, static_cast<std::uint64_t>(rep));
            Labeling c = g;
            if (kind == "singletons") {
              c = perturb(g, PerturbationSpec::singletons());
            } else if (kind == "one_group") {
              c = perturb(g, PerturbationSpec::one_group());
            } else {
              if (merge > 0) c = perturb(c, PerturbationSpec::merge(merge, rng.next()));
              if (split > 1) c = perturb(c, PerturbationSpec::oversplit(split, rng.next()));
              if (noise > 0.0) c = perturb(c, PerturbationSpec::relabel_noise(noise, rng.next()));
            }

            SweepRecord rec;
            rec.kind = kind;
            rec.noise = noise;
            rec.split = split;
            rec.merge = merge;
            rec.replicate = rep;
            rec.n = static_cast<Count>(g.size());
            rec.q_g = g.num_groups();
            rec.q_c = c.num_groups();
            const auto table = ContingencyTable::from_labelings(c, g);
            for (const auto& spec : config.measures) {
              std::optional<double> value;
              try {
                const auto report = score_table(table, spec, config.exact);
                if (report.defined) value = report.score;
              } catch (const ResourceError&) {
              }
              rec.scores.emplace_back(spec.name(), value);
            }
            records.push_back(std::move(rec));
          }
        }
      }
    }
  }
  return records;
}

void write_csv(std::ostream& out, const SweepConfig& config, const std::vector<SweepRecord>& records) {
  out << "kind,noise,split,merge,replicate,n,q_g,q_c";
  for (const auto& spec : config.measures) out << ',' << spec.name();
  out << '\n';
  for (const auto& r : records) {
    out << r.kind << ',' << format_double(r.noise) << ',' << r.split << ',' << r.merge << ',' << r.replicate << ','
        << r.n << ',' << r.q_g << ',' << r.q_c;
    for (const auto& [name, value] : r.scores) out << ',' << (value ? format_double(*value) : "undefined");
    out << '\n';
  }
}

std::string manifest_json(const SweepConfig& config, std::size_t records) {
  nlohmann::ordered_json j;
  j["n"] = config.n;
  if (config.sizes.explicit_sizes.empty()) {
    j["sizes"] = "powerlaw";
    j["tau"] = config.sizes.tau;
    j["min_size"] = config.sizes.min_size;
    j["max_size"] = config.sizes.max_size;
  } else {
    j["sizes"] = config.sizes.explicit_sizes;
  }
  j["seed"] = config.seed;
  j["replicates"] = config.replicates;
  j["kinds"] = config.kinds;
  j["noise"] = config.noise;
  j["split"] = config.split;
  j["merge"] = config.merge;
  std::vector<std::string> names;
  for (const auto& m : config.measures) names.push_back(m.name());
  j["measures"] = names;
  j["budget"] = config.exact.node_budget;
  j["records"] = records;
  j["rng"] = "mt19937_64 with splitmix64 substreams";
  return j.dump(2);
}

}  // namespace partmi::harness
