#include "partmi/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace partmi {

namespace {

constexpr double kDenominatorFloor = 1e-12;

Count total_of(std::span<const Count> sizes) { return std::accumulate(sizes.begin(), sizes.end(), Count{0}); }

// n * Shannon entropy of the size distribution: the Stirling-form self-information.
double stirling_entropy(std::span<const Count> sizes) {
  const double n = static_cast<double>(total_of(sizes));
  double h = 0.0;
  for (Count s : sizes) h += static_cast<double>(s) * std::log(n / static_cast<double>(s));
  return h;
}

// E[ln X!] for X hypergeometric: X successes in `draws` draws from a
// population of `total` with `marked` marked items.
double expected_log_factorial_hypergeometric(Count total, Count marked, Count draws) {
  const Count lo = std::max<Count>(2, draws + marked - total);
  const Count hi = std::min(draws, marked);
  if (lo > hi) return 0.0;
  const double log_norm = log_binomial(total, draws);
  double acc = 0.0;
  for (Count k = lo; k <= hi; ++k) {
    const double log_p = log_binomial(marked, k) + log_binomial(total - marked, draws - k) - log_norm;
    acc += std::exp(log_p) * log_factorial(k);
  }
  return acc;
}

}  // namespace

std::string_view to_string(Base base) {
  switch (base) {
    case Base::plain: return "plain";
    case Base::adjusted: return "adjusted";
    case Base::reduced: return "reduced";
  }
  return "?";
}

std::string_view to_string(Normalization norm) {
  switch (norm) {
    case Normalization::none: return "none";
    case Normalization::sym_arith: return "sym_arith";
    case Normalization::sym_geo: return "sym_geo";
    case Normalization::sym_min: return "sym_min";
    case Normalization::sym_max: return "sym_max";
    case Normalization::asym: return "asym";
  }
  return "?";
}

std::string_view to_string(MiForm form) { return form == MiForm::factorial ? "factorial" : "stirling"; }
std::string_view to_string(Units units) { return units == Units::nats ? "nats" : "bits"; }

Base parse_base(std::string_view text) {
  if (text == "plain") return Base::plain;
  if (text == "adjusted") return Base::adjusted;
  if (text == "reduced") return Base::reduced;
  throw InputError("unknown base measure `" + std::string(text) + "` (expected plain, adjusted or reduced)");
}

Normalization parse_normalization(std::string_view text) {
  if (text == "none") return Normalization::none;
  if (text == "sym_arith" || text == "sym" || text == "arith") return Normalization::sym_arith;
  if (text == "sym_geo" || text == "geo") return Normalization::sym_geo;
  if (text == "sym_min" || text == "min") return Normalization::sym_min;
  if (text == "sym_max" || text == "max") return Normalization::sym_max;
  if (text == "asym") return Normalization::asym;
  throw InputError("unknown normalization `" + std::string(text) +
                   "` (expected none, sym_arith, sym_geo, sym_min, sym_max or asym)");
}

MiForm parse_mi_form(std::string_view text) {
  if (text == "factorial") return MiForm::factorial;
  if (text == "stirling") return MiForm::stirling;
  throw InputError("unknown mutual information form `" + std::string(text) + "` (expected factorial or stirling)");
}

Units parse_units(std::string_view text) {
  if (text == "nats") return Units::nats;
  if (text == "bits") return Units::bits;
  throw InputError("unknown units `" + std::string(text) + "` (expected nats or bits)");
}

void MeasureSpec::validate() const {
  if (base == Base::reduced && !omega) throw InputError("the reduced base measure needs an omega mode");
  if (base != Base::reduced && omega)
    throw InputError("omega mode only applies to the reduced base measure, not " + std::string(to_string(base)));
  if (form == MiForm::stirling && base != Base::plain)
    throw InputError("the stirling form is only defined for the plain base measure");
}

std::string MeasureSpec::name() const {
  std::string out(to_string(base));
  out += "_";
  out += to_string(normalization);
  if (omega == OmegaMode::exact) out += ":exact";
  if (form == MiForm::stirling) out += ":stirling";
  return out;
}

MeasureSpec MeasureSpec::parse(std::string_view name, OmegaMode default_omega) {
  MeasureSpec spec;
  std::string_view head = name;
  std::vector<std::string_view> modifiers;
  if (auto colon = name.find(':'); colon != std::string_view::npos) {
    head = name.substr(0, colon);
    std::string_view rest = name.substr(colon + 1);
    while (!rest.empty()) {
      auto next = rest.find(':');
      modifiers.push_back(rest.substr(0, next));
      rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next + 1);
    }
  }
  const auto underscore = head.find('_');
  spec.base = parse_base(head.substr(0, underscore));
  spec.normalization =
      underscore == std::string_view::npos ? Normalization::none : parse_normalization(head.substr(underscore + 1));
  spec.omega = spec.base == Base::reduced ? std::optional(default_omega) : std::nullopt;
  for (auto m : modifiers) {
    if (m == "stirling" || m == "factorial") {
      spec.form = parse_mi_form(m);
    } else {
      const OmegaMode mode = parse_omega_mode(m);
      if (spec.base != Base::reduced)
        throw InputError("omega modifier `" + std::string(m) + "` only applies to reduced measures");
      spec.omega = mode;
    }
  }
  spec.validate();
  return spec;
}

MeasureSpec MeasureSpec::plain(Normalization norm) { return {Base::plain, norm, std::nullopt}; }
MeasureSpec MeasureSpec::adjusted(Normalization norm) { return {Base::adjusted, norm, std::nullopt}; }
MeasureSpec MeasureSpec::reduced(Normalization norm, OmegaMode omega) { return {Base::reduced, norm, omega}; }

std::vector<MeasureSpec> standard_measures(OmegaMode omega) {
  std::vector<MeasureSpec> out;
  for (auto norm : {Normalization::sym_arith, Normalization::asym}) {
    out.push_back(MeasureSpec::plain(norm));
    out.push_back(MeasureSpec::adjusted(norm));
    out.push_back(MeasureSpec::reduced(norm, omega));
  }
  return out;
}

double h0_from_sizes(std::span<const Count> sizes) {
  double h = log_factorial(total_of(sizes));
  for (Count s : sizes) h -= log_factorial(s);
  return h;
}

double h0(const Labeling& labeling) { return h0_from_sizes(labeling.group_sizes()); }

double h_full_from_sizes(std::span<const Count> sizes) {
  const Count n = total_of(sizes);
  const Count q = static_cast<Count>(sizes.size());
  return std::log(static_cast<double>(n)) + log_binomial(n - 1, q - 1) + h0_from_sizes(sizes);
}

double h_full(const Labeling& labeling) { return h_full_from_sizes(labeling.group_sizes()); }

double h_conditional(const ContingencyTable& table, OmegaMode omega, const ExactCountOptions& options) {
  const Count n = table.total();
  const Count q_g = static_cast<Count>(table.cols());
  double h = std::log(static_cast<double>(n)) + log_binomial(n - 1, q_g - 1);
  h += log_omega(table.row_sums(), table.col_sums(), omega, options).log_omega;
  for (Count r : table.row_sums()) h += log_factorial(r);
  for (Count v : table.counts()) h -= log_factorial(v);
  return h;
}

double i0_factorial(const ContingencyTable& table) {
  double i = log_factorial(table.total());
  for (Count v : table.counts()) i += log_factorial(v);
  for (Count r : table.row_sums()) i -= log_factorial(r);
  for (Count s : table.col_sums()) i -= log_factorial(s);
  return i;
}

double i0_stirling(const ContingencyTable& table) {
  const double n = static_cast<double>(table.total());
  double i = 0.0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const double nr = static_cast<double>(table.row_sums()[r]);
    for (std::size_t s = 0; s < table.cols(); ++s) {
      const Count v = table.at(r, s);
      if (v == 0) continue;
      const double ns = static_cast<double>(table.col_sums()[s]);
      i += static_cast<double>(v) * std::log(n * static_cast<double>(v) / (nr * ns));
    }
  }
  return i;
}

double expected_i0_fixed_margins(std::span<const Count> row_sums, std::span<const Count> col_sums) {
  const Count n = total_of(row_sums);
  if (n != total_of(col_sums)) throw InputError("row and column sums have different totals");
  double e = log_factorial(n);
  for (Count r : row_sums) e -= log_factorial(r);
  for (Count s : col_sums) e -= log_factorial(s);
  for (Count r : row_sums)
    for (Count s : col_sums) e += expected_log_factorial_hypergeometric(n, s, r);
  return e;
}

double reduced_mi(const ContingencyTable& table, OmegaMode omega, const ExactCountOptions& options) {
  return i0_factorial(table) - log_omega(table.row_sums(), table.col_sums(), omega, options).log_omega;
}

double adjusted_mi(const ContingencyTable& table) {
  return i0_factorial(table) - expected_i0_fixed_margins(table.row_sums(), table.col_sums());
}

double base_measure(const ContingencyTable& table, const MeasureSpec& spec, const ExactCountOptions& options) {
  spec.validate();
  switch (spec.base) {
    case Base::plain: return spec.form == MiForm::stirling ? i0_stirling(table) : i0_factorial(table);
    case Base::adjusted: return adjusted_mi(table);
    case Base::reduced: return reduced_mi(table, *spec.omega, options);
  }
  return 0.0;
}

double self_measure(std::span<const Count> sizes, const MeasureSpec& spec, const ExactCountOptions& options) {
  spec.validate();
  switch (spec.base) {
    case Base::plain: return spec.form == MiForm::stirling ? stirling_entropy(sizes) : h0_from_sizes(sizes);
    case Base::adjusted: return h0_from_sizes(sizes) - expected_i0_fixed_margins(sizes, sizes);
    case Base::reduced: return h0_from_sizes(sizes) - log_omega(sizes, sizes, *spec.omega, options).log_omega;
  }
  return 0.0;
}

MeasureReport score_table(const ContingencyTable& table, const MeasureSpec& spec, const ExactCountOptions& options) {
  spec.validate();
  MeasureReport rep;
  rep.spec = spec;
  rep.n = table.total();
  rep.q_c = table.rows();
  rep.q_g = table.cols();
  rep.h0_c = h0_from_sizes(table.row_sums());
  rep.h0_g = h0_from_sizes(table.col_sums());
  rep.i0 = spec.form == MiForm::stirling ? i0_stirling(table) : i0_factorial(table);

  switch (spec.base) {
    case Base::plain:
      rep.raw = rep.i0;
      break;
    case Base::adjusted:
      rep.expected_i0 = expected_i0_fixed_margins(table.row_sums(), table.col_sums());
      rep.raw = rep.i0 - *rep.expected_i0;
      break;
    case Base::reduced: {
      const OmegaEstimate omega = log_omega(table.row_sums(), table.col_sums(), *spec.omega, options);
      rep.log_omega = omega.log_omega;
      rep.alpha = omega.alpha;
      rep.raw = rep.i0 - omega.log_omega;
      break;
    }
  }
  rep.score = rep.raw;

  if (spec.normalization != Normalization::none) {
    rep.self_g = self_measure(table.col_sums(), spec, options);
    if (spec.normalization != Normalization::asym) rep.self_c = self_measure(table.row_sums(), spec, options);
    std::optional<double> denom;
    switch (spec.normalization) {
      case Normalization::sym_arith: denom = 0.5 * (*rep.self_c + *rep.self_g); break;
      case Normalization::sym_geo:
        if (*rep.self_c >= 0.0 && *rep.self_g >= 0.0) denom = std::sqrt(*rep.self_c * *rep.self_g);
        break;
      case Normalization::sym_min: denom = std::min(*rep.self_c, *rep.self_g); break;
      case Normalization::sym_max: denom = std::max(*rep.self_c, *rep.self_g); break;
      case Normalization::asym: denom = *rep.self_g; break;
      case Normalization::none: break;
    }
    rep.denominator = denom;
    rep.defined = denom && *denom > kDenominatorFloor;
    if (rep.defined) rep.score = rep.raw / *denom;
  }

  if (spec.units == Units::bits) {
    constexpr double ln2 = std::numbers::ln2;
    auto convert = [](std::optional<double>& v) {
      if (v) *v /= ln2;
    };
    if (spec.normalization == Normalization::none || !rep.defined) rep.score /= ln2;
    rep.raw /= ln2;
    rep.i0 /= ln2;
    rep.h0_c /= ln2;
    rep.h0_g /= ln2;
    convert(rep.log_omega);
    convert(rep.expected_i0);
    convert(rep.self_c);
    convert(rep.self_g);
    convert(rep.denominator);
  }
  return rep;
}

MeasureReport score(const Labeling& candidate, const Labeling& truth, const MeasureSpec& spec,
                    const ExactCountOptions& options) {
  return score_table(ContingencyTable::from_labelings(candidate, truth), spec, options);
}

}  // namespace partmi
