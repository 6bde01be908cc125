#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annopipe/label.hpp"
#include "annopipe/runner.hpp"

namespace annopipe {

/// Ratings laid out raters x items; cells may be missing. Krippendorff's
/// alpha tolerates missing cells, the other metrics require what their
/// preconditions state.
class RatingMatrix {
 public:
  RatingMatrix(std::size_t n_raters, std::size_t n_items);

  static RatingMatrix from_pairs(
      const std::vector<std::pair<LabelValue, LabelValue>>& pairs);

  void set(std::size_t rater, std::size_t item, LabelValue value);
  const std::optional<LabelValue>& cell(std::size_t rater,
                                        std::size_t item) const;
  std::size_t n_raters() const { return n_raters_; }
  std::size_t n_items() const { return n_items_; }
  bool complete() const;

 private:
  std::size_t n_raters_;
  std::size_t n_items_;
  std::vector<std::optional<LabelValue>> cells_;  // row-major
};

using LabelPairs = std::vector<std::pair<LabelValue, LabelValue>>;

/// Convenience for numeric two-rater data (machine first, gold second).
LabelPairs numeric_pairs(const std::vector<double>& machine,
                         const std::vector<double>& gold);

/// Fraction of exact matches, in [0, 1].
double accuracy(const LabelPairs& pairs);

/// Cohen's kappa: (p_o - p_e) / (1 - p_e) with chance agreement from the
/// marginal products. Undefined (error) when p_e = 1.
double cohen_kappa(const LabelPairs& pairs);

enum class KappaWeights { linear, quadratic };

/// Weighted kappa over the schema's category grid with disagreement weights
/// |i-j|/(k-1) (linear) or ((i-j)/(k-1))^2 (quadratic). Requires an ordinal
/// or interval schema.
double weighted_kappa(const LabelPairs& pairs, KappaWeights weights,
                      const LabelSchema& schema);

/// Krippendorff's alpha = 1 - D_o/D_e over the coincidence matrix. Distance
/// per level: nominal 0/1, ordinal cumulative-frequency rank distance,
/// interval squared difference. Items with fewer than two ratings are
/// excluded; missing cells are handled by pairable counts.
double krippendorff_alpha(const RatingMatrix& matrix, LabelKind level);

struct BootstrapCI {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
  int resamples = 1000;
};

/// Percentile bootstrap CI for alpha over item resamples; off the default
/// reporting path.
BootstrapCI krippendorff_alpha_bootstrap_ci(const RatingMatrix& matrix,
                                            LabelKind level,
                                            int resamples = 1000,
                                            double level_conf = 0.95,
                                            std::uint64_t seed = 1);

/// ICC(2,1): two-way random effects, absolute agreement, single rater.
/// Requires a complete matrix with >= 2 raters and non-zero total variance.
double icc_2_1(const RatingMatrix& matrix);

struct ErrorMetricsResult {
  std::optional<double> pearson_r;  // absent when either side is constant
  double mae = 0.0;
  double rmse = 0.0;
};

/// Pearson r, MAE, RMSE over numeric pairs. A constant vector leaves
/// pearson_r unset (MAE/RMSE still computed); strict mode can turn that
/// into an undefined-metric error at the call site.
ErrorMetricsResult error_metrics(
    const std::vector<std::pair<double, double>>& pairs);

struct Disagreement {
  std::string unit_id;
  LabelValue machine;
  LabelValue gold;
  std::optional<std::string> reasoning;
};

struct AgreementReport {
  std::string metric;
  double value = 0.0;
  int n_items = 0;
  int n_excluded = 0;  // parse_error units left out of the metric
  std::vector<Disagreement> disagreements;
  /// Signed machine-minus-gold differences for numeric labels; surfaces
  /// systematic over/underestimation at a glance.
  std::map<int, int> signed_histogram;

  json to_json() const;
  std::string to_markdown() const;
};

/// Joins aggregated machine labels with gold labels and lists every
/// disagreement with the model's reasoning. metric/value are filled by the
/// caller after computing whichever statistic is being reported.
AgreementReport disagreement_report(const AggregateResult& aggregated,
                                    const Corpus& corpus);

}  // namespace annopipe
