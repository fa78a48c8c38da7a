#include "partmi/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "partmi/counting.hpp"
#include "partmi/harness.hpp"
#include "partmi/io.hpp"
#include "partmi/measures.hpp"
#include "partmi/verify.hpp"

namespace partmi::cli {

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 20240611;

struct GlobalFlags {
  std::string units = "nats";
  std::uint64_t seed = kDefaultSeed;
  bool seed_given = false;
  bool json = false;
  bool csv = false;
  bool text = false;
  bool quiet = false;
};

struct SpecFlags {
  std::string base = "reduced";
  std::string norm = "asym";
  std::string omega;
  std::string form = "factorial";
  std::uint64_t budget = ExactCountOptions{}.node_budget;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
  cmd->add_option("--base", f.base, "plain | adjusted | reduced")->capture_default_str();
  cmd->add_option("--norm", f.norm, "none | sym_arith | sym_geo | sym_min | sym_max | asym")->capture_default_str();
  cmd->add_option("--omega", f.omega, "exact | ec (reduced base only; default ec)");
  cmd->add_option("--form", f.form, "factorial | stirling (stirling needs --base plain)")->capture_default_str();
  cmd->add_option("--budget", f.budget, "node budget for exact table counts")->capture_default_str();
}

MeasureSpec build_spec(const SpecFlags& f, Units units) {
  MeasureSpec spec;
  spec.base = parse_base(f.base);
  spec.normalization = parse_normalization(f.norm);
  spec.form = parse_mi_form(f.form);
  spec.units = units;
  if (spec.base == Base::reduced) {
    spec.omega = f.omega.empty() ? OmegaMode::effective_columns : parse_omega_mode(f.omega);
  } else {
    if (!f.omega.empty()) throw InputError("--omega only applies to --base reduced");
    spec.omega = std::nullopt;
  }
  spec.validate();
  return spec;
}

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json report_json(const MeasureReport& r) {
  ordered_json j;
  j["measure"] = r.spec.name();
  j["base"] = to_string(r.spec.base);
  j["normalization"] = to_string(r.spec.normalization);
  j["omega_mode"] = r.spec.omega ? ordered_json(to_string(*r.spec.omega)) : ordered_json(nullptr);
  j["form"] = to_string(r.spec.form);
  j["units"] = to_string(r.spec.units);
  j["score"] = r.defined ? ordered_json(r.score) : ordered_json("undefined");
  j["defined"] = r.defined;
  j["raw"] = r.raw;
  j["i0"] = r.i0;
  j["log_omega"] = optional_json(r.log_omega);
  j["alpha"] = optional_json(r.alpha);
  j["expected_i0"] = optional_json(r.expected_i0);
  j["h0_c"] = r.h0_c;
  j["h0_g"] = r.h0_g;
  j["self_c"] = optional_json(r.self_c);
  j["self_g"] = optional_json(r.self_g);
  j["denominator"] = optional_json(r.denominator);
  j["n"] = r.n;
  j["q_c"] = r.q_c;
  j["q_g"] = r.q_g;
  return j;
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v, 10) : "-"; }

void print_report_text(std::ostream& out, const MeasureReport& r) {
  out << r.spec.name() << ": " << (r.defined ? fmt(r.score, 10) : "undefined") << '\n';
  out << "  raw " << fmt(r.raw, 10) << "  i0 " << fmt(r.i0, 10) << "  log_omega " << fmt_opt(r.log_omega)
      << "  expected_i0 " << fmt_opt(r.expected_i0) << '\n';
  out << "  h0_c " << fmt(r.h0_c, 10) << "  h0_g " << fmt(r.h0_g, 10) << "  self_c " << fmt_opt(r.self_c)
      << "  self_g " << fmt_opt(r.self_g) << "  denominator " << fmt_opt(r.denominator) << '\n';
  out << "  n " << r.n << "  q_c " << r.q_c << "  q_g " << r.q_g << "  units " << to_string(r.spec.units) << '\n';
}

std::vector<Count> parse_margin(const std::string& text, const std::string& what) {
  std::vector<Count> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InputError("bad " + what + " entry `" + item + "`");
    }
  }
  if (out.empty()) throw InputError(what + " is empty");
  return out;
}

// Competition ranking, highest first; undefined values get no rank.
std::vector<std::optional<int>> rank_desc(const std::vector<std::optional<double>>& values) {
  std::vector<std::optional<int>> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    int better = 0;
    for (const auto& other : values)
      if (other && *other > *values[i] + 1e-12) ++better;
    ranks[i] = better + 1;
  }
  return ranks;
}

struct Pair {
  Labeling truth;
  Labeling cand;
};

Pair load_pair(const io::LabelFile& truth_file, const std::string& cand_path) {
  const auto cand_file = io::align_to(truth_file, io::read_labels(cand_path));
  return {io::to_labeling(truth_file), io::to_labeling(cand_file)};
}

// --- subcommands --------------------------------------------------------

int cmd_compare(const GlobalFlags& g, const std::string& truth_path, const std::string& cand_path,
                const SpecFlags& sf, bool all, std::ostream& out) {
  const Units units = parse_units(g.units);
  std::vector<MeasureSpec> specs;
  if (all) {
    if (sf.base != "reduced" || sf.norm != "asym")
      throw InputError("--all selects its own measures; drop --base/--norm");
    const OmegaMode omega = sf.omega.empty() ? OmegaMode::effective_columns : parse_omega_mode(sf.omega);
    specs = standard_measures(omega);
    for (auto& s : specs) s.units = units;
  } else {
    specs.push_back(build_spec(sf, units));
  }
  const auto truth_file = io::read_labels(truth_path);
  const Pair p = load_pair(truth_file, cand_path);
  const auto table = ContingencyTable::from_labelings(p.cand, p.truth);
  const ExactCountOptions opts{sf.budget};

  std::vector<MeasureReport> reports;
  for (const auto& s : specs) reports.push_back(score_table(table, s, opts));
  const bool any_undefined = std::ranges::any_of(reports, [](const auto& r) { return !r.defined; });

  if (g.text) {
    for (const auto& r : reports) print_report_text(out, r);
  } else if (all) {
    ordered_json j;
    j["n"] = table.total();
    j["q_c"] = table.rows();
    j["q_g"] = table.cols();
    j["measures"] = ordered_json::object();
    for (const auto& r : reports) j["measures"][r.spec.name()] = report_json(r);
    out << j.dump(2) << '\n';
  } else {
    out << report_json(reports.front()).dump(2) << '\n';
  }
  return any_undefined ? kUndefinedNormalization : kOk;
}

int cmd_matrix(const GlobalFlags& g, const std::string& truth_path, const std::vector<std::string>& cands,
               const std::vector<std::string>& measure_names, const std::string& omega_text, std::uint64_t budget,
               std::ostream& out, std::ostream& err) {
  const Units units = parse_units(g.units);
  const OmegaMode omega = omega_text.empty() ? OmegaMode::effective_columns : parse_omega_mode(omega_text);
  std::vector<MeasureSpec> specs;
  if (measure_names.empty()) {
    specs = standard_measures(omega);
  } else {
    for (const auto& name : measure_names) specs.push_back(MeasureSpec::parse(name, omega));
  }
  for (auto& s : specs) s.units = units;
  const ExactCountOptions opts{budget};

  const auto truth_file = io::read_labels(truth_path);
  int status = kOk;
  std::vector<std::string> names;
  // [candidate][measure]
  std::vector<std::vector<MeasureReport>> reports;
  for (const auto& path : cands) {
    try {
      const Pair p = load_pair(truth_file, path);
      const auto table = ContingencyTable::from_labelings(p.cand, p.truth);
      std::vector<MeasureReport> row;
      for (const auto& s : specs) row.push_back(score_table(table, s, opts));
      names.push_back(path);
      reports.push_back(std::move(row));
    } catch (const InputError& e) {
      err << "partmi: " << path << ": " << e.what() << '\n';
      status = kInputError;
    } catch (const ResourceError& e) {
      err << "partmi: " << path << ": " << e.what() << '\n';
      if (status == kOk) status = kBudgetExceeded;
    }
  }

  const std::size_t m = specs.size();
  std::vector<std::vector<std::optional<int>>> ranks(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<std::optional<double>> scores;
    std::vector<std::optional<double>> raws;
    for (const auto& row : reports) {
      scores.push_back(row[k].defined ? std::optional(row[k].score) : std::nullopt);
      raws.push_back(row[k].raw);
    }
    ranks[k] = rank_desc(scores);
    if (specs[k].normalization == Normalization::asym && ranks[k] != rank_desc(raws) &&
        std::ranges::all_of(scores, [](const auto& v) { return v.has_value(); }))
      throw std::logic_error("asymmetric normalization changed the ranking of " + specs[k].name());
  }

  auto rank_text = [](const std::optional<int>& r) { return r ? std::to_string(*r) : std::string("-"); };
  if (g.json) {
    ordered_json j;
    j["truth"] = truth_path;
    j["candidates"] = ordered_json::array();
    for (std::size_t c = 0; c < reports.size(); ++c) {
      ordered_json row;
      row["candidate"] = names[c];
      row["q_c"] = reports[c].front().q_c;
      row["scores"] = ordered_json::object();
      row["ranks"] = ordered_json::object();
      for (std::size_t k = 0; k < m; ++k) {
        const auto& r = reports[c][k];
        row["scores"][specs[k].name()] = r.defined ? ordered_json(r.score) : ordered_json("undefined");
        row["ranks"][specs[k].name()] = ranks[k][c] ? ordered_json(*ranks[k][c]) : ordered_json(nullptr);
      }
      j["candidates"].push_back(row);
    }
    out << j.dump(2) << '\n';
  } else {
    const char sep = g.csv ? ',' : '\t';
    out << "candidate" << sep << "q_c";
    for (const auto& s : specs) out << sep << s.name() << sep << "rank_" << s.name();
    out << '\n';
    for (std::size_t c = 0; c < reports.size(); ++c) {
      out << names[c] << sep << reports[c].front().q_c;
      for (std::size_t k = 0; k < m; ++k) {
        const auto& r = reports[c][k];
        out << sep << (r.defined ? fmt(r.score, 10) : "undefined") << sep << rank_text(ranks[k][c]);
      }
      out << '\n';
    }
  }
  if (status == kOk)
    for (const auto& row : reports)
      for (const auto& r : row)
        if (!r.defined) status = kUndefinedNormalization;
  return status;
}

int cmd_omega(const GlobalFlags& g, const std::string& rows_text, const std::string& cols_text,
              const std::string& mode_text, std::uint64_t budget, std::ostream& out) {
  const auto rows = parse_margin(rows_text, "--rows");
  const auto cols = parse_margin(cols_text, "--cols");
  const OmegaMode mode = parse_omega_mode(mode_text);
  ordered_json j;
  if (mode == OmegaMode::exact) {
    const BigCount count = count_tables_exact(rows, cols, ExactCountOptions{budget});
    j["log_omega"] = log_big(count);
    j["mode"] = to_string(mode);
    j["count"] = count.str();
  } else {
    const auto est = log_omega_ec(rows, cols);
    j["log_omega"] = est.log_omega;
    j["mode"] = to_string(mode);
    if (est.alpha) j["alpha"] = *est.alpha;
    if (est.singleton_fallback) j["singleton_fallback"] = true;
  }
  if (g.units == "bits") {
    j["log_omega"] = j["log_omega"].get<double>() / std::log(2.0);
    j["units"] = "bits";
  } else {
    j["units"] = "nats";
  }
  if (g.text) {
    out << "log_omega " << fmt(j["log_omega"].get<double>(), 12) << " (" << j["units"].get<std::string>() << ", "
        << j["mode"].get<std::string>() << ")";
    if (j.contains("alpha")) out << " alpha " << fmt(j["alpha"].get<double>(), 12);
    if (j.contains("count")) out << " count " << j["count"].get<std::string>();
    out << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
  return kOk;
}

Count default_n_max(std::size_t qc, std::size_t qg, bool full) {
  static const std::map<std::pair<std::size_t, std::size_t>, std::pair<Count, Count>> table = {
      {{2, 2}, {60, 200}}, {{3, 2}, {30, 50}}, {{4, 2}, {20, 30}}, {{3, 3}, {20, 30}}, {{4, 3}, {14, 20}}};
  auto it = table.find({qc, qg});
  if (it == table.end()) throw InputError("no default --n-max for this (qc, qg); pass --n-max");
  return full ? it->second.second : it->second.first;
}

ordered_json violation_json(const verify::BoundViolation& v) {
  ordered_json j;
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < v.table.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t s = 0; s < v.table.cols(); ++s) row.push_back(v.table.at(r, s));
    rows.push_back(row);
  }
  j["table"] = rows;
  j["i_cg"] = v.i_cg;
  j["i_gg"] = v.i_gg;
  j["gap"] = v.gap;
  return j;
}

int cmd_verify_bound(const GlobalFlags& g, std::size_t qc, std::size_t qg, Count n_max, const std::string& omega_text,
                     bool full, std::uint64_t budget, std::ostream& out) {
  verify::BoundCheckConfig cfg;
  cfg.q_c = qc;
  cfg.q_g = qg;
  cfg.n_max = n_max > 0 ? n_max : default_n_max(qc, qg, full);
  cfg.omega = parse_omega_mode(omega_text);
  cfg.budget = full ? std::max<std::uint64_t>(budget, 1'000'000'000ULL) : budget;
  const auto result = verify::check_bound(cfg);

  constexpr std::size_t kMaxListed = 100;
  auto list = [&](const std::vector<verify::BoundViolation>& vs) {
    ordered_json arr = ordered_json::array();
    for (std::size_t i = 0; i < std::min(vs.size(), kMaxListed); ++i) arr.push_back(violation_json(vs[i]));
    return arr;
  };
  if (g.text) {
    out << "q_c " << qc << " q_g " << qg << " n <= " << cfg.n_max << " omega " << to_string(cfg.omega) << '\n';
    out << "cases checked " << result.cases_checked << ", violations " << result.violations.size()
        << ", equality failures " << result.equality_failures.size() << ", spurious equalities "
        << result.spurious_equalities.size() << ", max off-diagonal gap " << fmt(result.max_off_diagonal_gap, 10)
        << '\n';
  } else {
    ordered_json j;
    j["q_c"] = qc;
    j["q_g"] = qg;
    j["n_max"] = cfg.n_max;
    j["omega"] = to_string(cfg.omega);
    j["cases_checked"] = result.cases_checked;
    j["violation_count"] = result.violations.size();
    j["violations"] = list(result.violations);
    j["equality_failures"] = list(result.equality_failures);
    j["spurious_equalities"] = list(result.spurious_equalities);
    j["max_off_diagonal_gap"] = result.max_off_diagonal_gap;
    out << j.dump(2) << '\n';
  }
  return result.violations.empty() ? kOk : kBoundViolated;
}

int cmd_sweep(const GlobalFlags& g, const std::string& config_path, const std::string& out_path, std::ostream& out) {
  std::ifstream in(config_path);
  if (!in) throw InputError("cannot open " + config_path);
  auto cfg = harness::parse_sweep_config(in);
  if (g.seed_given) cfg.seed = g.seed;
  const auto records = harness::run_sweep(cfg);

  std::ofstream csv(out_path);
  if (!csv) throw InputError("cannot write " + out_path);
  harness::write_csv(csv, cfg, records);
  std::string manifest_path = out_path;
  if (auto dot = manifest_path.rfind('.'); dot != std::string::npos && manifest_path.find('/', dot) == std::string::npos)
    manifest_path.erase(dot);
  manifest_path += ".manifest.json";
  std::ofstream manifest(manifest_path);
  if (!manifest) throw InputError("cannot write " + manifest_path);
  manifest << harness::manifest_json(cfg, records.size()) << '\n';
  if (!csv || !manifest) throw InputError("write failed for " + out_path);

  std::size_t undefined = 0;
  for (const auto& r : records)
    for (const auto& [name, v] : r.scores)
      if (!v) ++undefined;
  if (g.json) {
    ordered_json j;
    j["seed"] = cfg.seed;
    j["records"] = records.size();
    j["undefined_scores"] = undefined;
    j["csv"] = out_path;
    j["manifest"] = manifest_path;
    out << j.dump(2) << '\n';
  } else if (!g.quiet) {
    out << "seed " << cfg.seed << ": wrote " << records.size() << " records to " << out_path << " and "
        << manifest_path << " (" << undefined << " undefined scores)\n";
  }
  return kOk;
}

// --- demos --------------------------------------------------------------

int demo_singleton(const GlobalFlags& g, std::ostream& out) {
  const Labeling truth{1, 1, 1, 2, 2, 3, 3, 3};
  const Labeling cand = Labeling::singletons(truth.size());
  const auto table = ContingencyTable::from_labelings(cand, truth);
  const auto plain = score_table(table, MeasureSpec::plain(Normalization::sym_arith));
  const auto exact = score_table(table, MeasureSpec::reduced(Normalization::asym, OmegaMode::exact));
  const auto ec = score_table(table, MeasureSpec::reduced(Normalization::asym, OmegaMode::effective_columns));
  if (g.json) {
    ordered_json j;
    j["truth"] = truth.labels();
    j["candidate"] = cand.labels();
    j["h0_g"] = h0(truth);
    j["plain_sym_arith"] = report_json(plain);
    j["reduced_asym_exact"] = report_json(exact);
    j["reduced_asym_ec"] = report_json(ec);
    out << j.dump(2) << '\n';
    return kOk;
  }
  out << "Every object in its own group, scored against an 8-object truth with sizes (3,2,3).\n\n";
  out << "H0(g)                       = " << fmt(h0(truth), 10) << " nats\n";
  out << "I0(c;g)                     = " << fmt(plain.i0, 10) << " nats (equals H0(g): the table pins down g)\n";
  out << "ln Omega, exact             = " << fmt(*exact.log_omega, 10) << " = ln(8!/(3!2!3!))\n";
  out << "reduced I(c;g), exact Omega = " << fmt(exact.raw, 10) << '\n';
  out << "ln Omega, effective columns = " << fmt(*ec.log_omega, 10) << " (alpha " << fmt_opt(ec.alpha) << ")\n";
  out << "reduced I(c;g), eff. cols   = " << fmt(ec.raw, 10) << "\n\n";
  out << "plain sym_arith score       = " << fmt(plain.score, 10) << '\n';
  out << "reduced asym score (exact)  = " << fmt(exact.score, 10) << '\n';
  out << "reduced asym score (ec)     = " << fmt(ec.score, 10) << '\n';
  return kOk;
}

int demo_rank_flip(const GlobalFlags& g, std::ostream& out) {
  std::optional<harness::RankFlip> flip;
  std::size_t n = 5;
  for (; n <= 12 && !flip; ++n) flip = harness::find_rank_flip(n, g.seed, 100'000);
  if (!flip) {
    out << "no rank flip found for n <= 12 with seed " << g.seed << '\n';
    return kOk;
  }
  auto labels = [](const Labeling& l) {
    std::string s;
    for (int v : l.labels()) s += std::to_string(v) + ' ';
    if (!s.empty()) s.pop_back();
    return s;
  };
  if (g.json) {
    ordered_json j;
    j["seed"] = g.seed;
    j["samples"] = flip->samples;
    j["truth"] = flip->truth.labels();
    j["cand_a"] = flip->cand_a.labels();
    j["cand_b"] = flip->cand_b.labels();
    j["i0"] = {flip->i0_a, flip->i0_b};
    j["plain_sym_arith"] = {flip->sym_a, flip->sym_b};
    j["plain_asym"] = {flip->asym_a, flip->asym_b};
    out << j.dump(2) << '\n';
    return kOk;
  }
  out << "seed " << g.seed << ", found after " << flip->samples << " samples\n";
  out << "g   = " << labels(flip->truth) << '\n';
  out << "c_A = " << labels(flip->cand_a) << '\n';
  out << "c_B = " << labels(flip->cand_b) << "\n\n";
  out << "                 c_A          c_B\n";
  out << "I0          " << std::setw(12) << fmt(flip->i0_a, 8) << ' ' << std::setw(12) << fmt(flip->i0_b, 8)
      << "   (prefers c_A)\n";
  out << "sym_arith   " << std::setw(12) << fmt(flip->sym_a, 8) << ' ' << std::setw(12) << fmt(flip->sym_b, 8)
      << "   (prefers c_B)\n";
  out << "asym        " << std::setw(12) << fmt(flip->asym_a, 8) << ' ' << std::setw(12) << fmt(flip->asym_b, 8)
      << "   (prefers c_A)\n";
  return kOk;
}

int demo_oversplit(const GlobalFlags& g, std::ostream& out) {
  harness::Rng rng(g.seed);
  const std::vector<Count> sizes{30, 20, 10};
  const Labeling truth = harness::planted_labeling(sizes, rng);
  const std::vector<MeasureSpec> specs{MeasureSpec::plain(), MeasureSpec::plain(Normalization::sym_arith),
                                       MeasureSpec::plain(Normalization::asym),
                                       MeasureSpec::reduced(Normalization::asym)};
  ordered_json j;
  j["seed"] = g.seed;
  j["truth_sizes"] = sizes;
  if (!g.json) {
    out << "seed " << g.seed << ", truth sizes (30,20,10); each group cut into k random pieces\n\n";
    out << "k  q_c";
    for (const auto& s : specs) out << "  " << std::setw(16) << s.name();
    out << '\n';
  }
  for (int k : {1, 2, 4, 8}) {
    const Labeling cand = harness::perturb(truth, harness::PerturbationSpec::oversplit(k, rng.next()));
    const auto table = ContingencyTable::from_labelings(cand, truth);
    ordered_json row;
    row["k"] = k;
    row["q_c"] = cand.num_groups();
    if (!g.json) out << k << "  " << std::setw(3) << cand.num_groups();
    for (const auto& s : specs) {
      const auto r = score_table(table, s);
      row[s.name()] = r.score;
      if (!g.json) out << "  " << std::setw(16) << fmt(r.score, 8);
    }
    if (!g.json) out << '\n';
    j["rows"].push_back(row);
  }
  if (g.json) out << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"partmi: mutual information variants for comparing labelings", "partmi"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--units", g.units, "nats | bits")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", g.seed, "seed for randomized subcommands");
  auto* json_flag = app.add_flag("--json", g.json, "machine-readable JSON output");
  auto* csv_flag = app.add_flag("--csv", g.csv, "CSV output (matrix)");
  auto* text_flag = app.add_flag("--text", g.text, "human-readable output");
  json_flag->excludes(csv_flag)->excludes(text_flag);
  csv_flag->excludes(text_flag);
  app.add_flag("--quiet", g.quiet, "suppress progress messages");

  SpecFlags compare_flags;
  std::string truth_path;
  std::string cand_path;
  bool all = false;
  auto* compare = app.add_subcommand("compare", "score a candidate labeling against a ground truth");
  compare->add_option("--truth", truth_path, "ground-truth labeling file")->required();
  compare->add_option("--cand", cand_path, "candidate labeling file")->required();
  compare->add_flag("--all", all, "report the six standard measures");
  add_spec_flags(compare, compare_flags);

  std::string matrix_truth;
  std::vector<std::string> matrix_cands;
  std::vector<std::string> matrix_measures;
  std::string matrix_omega;
  std::uint64_t matrix_budget = ExactCountOptions{}.node_budget;
  auto* matrix = app.add_subcommand("matrix", "score and rank many candidates against one truth");
  matrix->add_option("--truth", matrix_truth, "ground-truth labeling file")->required();
  matrix->add_option("--cand,candidates", matrix_cands, "candidate labeling files")->required();
  matrix->add_option("--measures", matrix_measures, "measure names, e.g. reduced_asym,plain_sym_arith")
      ->delimiter(',');
  matrix->add_option("--omega", matrix_omega, "default omega mode for reduced measures (exact | ec)");
  matrix->add_option("--budget", matrix_budget, "node budget for exact table counts")->capture_default_str();

  std::string rows_text;
  std::string cols_text;
  std::string omega_mode = "exact";
  std::uint64_t omega_budget = ExactCountOptions{}.node_budget;
  auto* omega = app.add_subcommand("omega", "number of contingency tables with given margins");
  omega->add_option("--rows", rows_text, "row sums, comma separated")->required();
  omega->add_option("--cols", cols_text, "column sums, comma separated")->required();
  omega->add_option("--mode", omega_mode, "exact | ec")->capture_default_str();
  omega->add_option("--budget", omega_budget, "node budget for exact counting")->capture_default_str();

  std::size_t qc = 2;
  std::size_t qg = 2;
  Count n_max = 0;
  std::string vb_omega = "exact";
  bool full = false;
  std::uint64_t vb_budget = ExactCountOptions{}.node_budget;
  auto* vb = app.add_subcommand("verify-bound", "exhaustively check I(c;g) <= I(g;g) on small tables");
  vb->add_option("--qc", qc, "candidate groups")->capture_default_str();
  vb->add_option("--qg", qg, "truth groups")->capture_default_str();
  vb->add_option("--n-max", n_max, "largest table total (default depends on qc, qg)");
  vb->add_option("--omega", vb_omega, "exact | ec")->capture_default_str();
  vb->add_flag("--full", full, "use the large default ranges and budget");
  vb->add_option("--budget", vb_budget, "node budget per exact table count")->capture_default_str();

  std::string config_path;
  std::string out_path;
  auto* sweep = app.add_subcommand("sweep", "run a perturbation sweep and write CSV plus a JSON manifest");
  sweep->add_option("--config", config_path, "sweep configuration file")->required();
  sweep->add_option("--out", out_path, "output CSV path")->required();

  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "worked examples: singleton | rank-flip | oversplit");
  demo->add_option("name", demo_name, "singleton | rank-flip | oversplit")
      ->required()
      ->check(CLI::IsMember({"singleton", "rank-flip", "oversplit"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (compare->parsed()) return cmd_compare(g, truth_path, cand_path, compare_flags, all, out);
    if (matrix->parsed())
      return cmd_matrix(g, matrix_truth, matrix_cands, matrix_measures, matrix_omega, matrix_budget, out, err);
    if (omega->parsed()) return cmd_omega(g, rows_text, cols_text, omega_mode, omega_budget, out);
    if (vb->parsed()) return cmd_verify_bound(g, qc, qg, n_max, vb_omega, full, vb_budget, out);
    if (sweep->parsed()) return cmd_sweep(g, config_path, out_path, out);
    if (demo->parsed()) {
      if (!g.quiet && !g.json && !g.seed_given && demo_name != "singleton")
        err << "partmi: using default seed " << g.seed << '\n';
      if (demo_name == "singleton") return demo_singleton(g, out);
      if (demo_name == "rank-flip") return demo_rank_flip(g, out);
      return demo_oversplit(g, out);
    }
  } catch (const InputError& e) {
    err << "partmi: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    err << "partmi: " << e.what() << '\n';
    return kInputError;
  } catch (const ResourceError& e) {
    err << "partmi: " << e.what() << '\n';
    return kBudgetExceeded;
  }
  return kInputError;
}

}  // namespace partmi::cli
