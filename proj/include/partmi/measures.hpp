#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "partmi/core.hpp"
#include "partmi/counting.hpp"

namespace partmi {

enum class Base { plain, adjusted, reduced };
enum class Normalization { none, sym_arith, sym_geo, sym_min, sym_max, asym };
enum class MiForm { factorial, stirling };
enum class Units { nats, bits };

std::string_view to_string(Base base);
std::string_view to_string(Normalization norm);
std::string_view to_string(MiForm form);
std::string_view to_string(Units units);
Base parse_base(std::string_view text);
Normalization parse_normalization(std::string_view text);
MiForm parse_mi_form(std::string_view text);
Units parse_units(std::string_view text);

/// Which mutual-information variant to compute. The default is the
/// asymmetrically normalized reduced mutual information with the
/// effective-columns estimate of Omega.
struct MeasureSpec {
  Base base = Base::reduced;
  Normalization normalization = Normalization::asym;
  /// Required for the reduced base, forbidden otherwise.
  std::optional<OmegaMode> omega = OmegaMode::effective_columns;
  MiForm form = MiForm::factorial;
  Units units = Units::nats;

  /// Throws InputError on inconsistent combinations.
  void validate() const;

  /// Short name such as "reduced_asym"; the Omega mode is appended for the
  /// exact count ("reduced_asym:exact") and the Stirling form likewise.
  std::string name() const;

  /// Inverse of name(). "reduced" alone means reduced with no normalization.
  static MeasureSpec parse(std::string_view name, OmegaMode default_omega = OmegaMode::effective_columns);

  static MeasureSpec plain(Normalization norm = Normalization::none);
  static MeasureSpec adjusted(Normalization norm = Normalization::none);
  static MeasureSpec reduced(Normalization norm = Normalization::none, OmegaMode omega = OmegaMode::effective_columns);

  friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;
};

/// The six measures compared side by side: {plain, adjusted, reduced} x
/// {sym_arith, asym}.
std::vector<MeasureSpec> standard_measures(OmegaMode omega = OmegaMode::effective_columns);

/// Score plus every intermediate it was built from. Information quantities
/// are totals (not per object) in the requested units; a normalized score
/// is dimensionless.
struct MeasureReport {
  MeasureSpec spec;
  double score = 0.0;
  /// Base measure I_X(c;g) before normalization.
  double raw = 0.0;
  double i0 = 0.0;
  std::optional<double> log_omega;
  std::optional<double> alpha;
  std::optional<double> expected_i0;
  double h0_c = 0.0;
  double h0_g = 0.0;
  /// I_X(c;c) and I_X(g;g), present when a normalization is requested.
  std::optional<double> self_c;
  std::optional<double> self_g;
  std::optional<double> denominator;
  /// False when the normalization denominator is not positive; score then
  /// holds the unnormalized value.
  bool defined = true;
  Count n = 0;
  std::size_t q_c = 0;
  std::size_t q_g = 0;
};

/// ln(n! / prod_s n_s!), the information content of a labeling given its group sizes.
double h0(const Labeling& labeling);
double h0_from_sizes(std::span<const Count> sizes);

/// ln n + ln C(n-1, q-1) + ln(n! / prod_s n_s!).
double h_full(const Labeling& labeling);
double h_full_from_sizes(std::span<const Count> sizes);

/// Conditional information of the ground truth (columns) given the candidate (rows):
/// ln n + ln C(n-1, q_g-1) + ln Omega + ln(prod_r n_r! / prod_rs n_rs!).
double h_conditional(const ContingencyTable& table, OmegaMode omega, const ExactCountOptions& options = {});

/// ln[n! prod_rs n_rs! / (prod_r n_r! prod_s n_s!)].
double i0_factorial(const ContingencyTable& table);

/// n * sum_rs p_rs ln(p_rs / (p_r p_s)), with 0 ln 0 = 0.
double i0_stirling(const ContingencyTable& table);

/// Exact mean of i0_factorial over uniformly random labelings with the
/// given group sizes. Each cell count is hypergeometric, so the mean is
/// ln n! - sum ln n_r! - sum ln n_s! + sum_rs E[ln n_rs!].
double expected_i0_fixed_margins(std::span<const Count> row_sums, std::span<const Count> col_sums);

double reduced_mi(const ContingencyTable& table, OmegaMode omega, const ExactCountOptions& options = {});
double adjusted_mi(const ContingencyTable& table);

/// Unnormalized base measure I_X for the given table, in nats.
double base_measure(const ContingencyTable& table, const MeasureSpec& spec, const ExactCountOptions& options = {});

/// I_X of a labeling with the given group sizes against itself, in nats.
double self_measure(std::span<const Count> sizes, const MeasureSpec& spec, const ExactCountOptions& options = {});

/// Rows of the table are the candidate, columns the ground truth.
MeasureReport score_table(const ContingencyTable& table, const MeasureSpec& spec,
                          const ExactCountOptions& options = {});
MeasureReport score(const Labeling& candidate, const Labeling& truth, const MeasureSpec& spec,
                    const ExactCountOptions& options = {});

}  // namespace partmi
