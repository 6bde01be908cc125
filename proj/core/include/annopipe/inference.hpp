#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace annopipe {

using json = nlohmann::json;

/// Point estimates with heteroskedasticity-robust (HC1 sandwich) standard
/// errors and normal-approximation confidence intervals. Coefficient 0 is
/// the intercept when the fit added one.
struct RegressionResult {
  std::string estimator;  // "naive", "classical", or "rectified"
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  double level = 0.95;
  int n_labelled = 0;
  int n_unlabelled = 0;
  std::optional<std::string> warning;

  json to_json() const;
};

struct OlsFit {
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<std::vector<double>> covariance;  // sandwich estimate
  int n = 0;
  int p = 0;
};

/// Least squares of y on the given covariate columns (plus an intercept by
/// default). Errors on rank deficiency or n <= p.
OlsFit ols_fit(const std::vector<std::vector<double>>& covariate_columns,
               const std::vector<double>& y, bool add_intercept = true);

/// One gold/machine pair with optional covariates (design row for OLS).
struct LabelledPair {
  double z = 0.0;      // gold value
  double z_hat = 0.0;  // machine value
  std::vector<double> w;
};

struct UnlabelledPoint {
  double z_hat = 0.0;
  std::vector<double> w;
};

struct CorrectionResult {
  RegressionResult naive;      // machine labels only, all units
  RegressionResult classical;  // gold labels only, labelled subset
  RegressionResult rectified;  // prediction-powered combination

  json to_json() const;
  std::string to_markdown() const;
};

/// Prediction-powered mean: point = mean(all z_hat) + mean(z - z_hat over
/// the labelled subset); variance = var(z_hat)/N_total + var(z - z_hat)/n.
/// When the labelled machine values equal the gold values the rectifier is
/// exactly zero and rectified == naive.
CorrectionResult ppi_mean(const std::vector<LabelledPair>& labelled,
                          const std::vector<double>& unlabelled_z_hat,
                          double level = 0.95);

/// Prediction-powered OLS with the machine-annotated variable as response:
/// rectified = beta(X_all, z_hat_all) + [beta(X_lab, z_lab) -
/// beta(X_lab, z_hat_lab)]; since OLS is linear in the response the bracket
/// equals the fit of (z - z_hat) on X_lab, and the combined covariance is
/// the sum of the two sandwich covariances.
CorrectionResult ppi_ols(const std::vector<LabelledPair>& labelled,
                         const std::vector<UnlabelledPoint>& unlabelled,
                         double level = 0.95);

enum class ErrorKind { systematic_shift, random_noise };
enum class ErrorTarget { predictor, outcome };

std::string to_string(ErrorKind kind);
std::string to_string(ErrorTarget target);
ErrorKind error_kind_from_string(const std::string& name);
ErrorTarget error_target_from_string(const std::string& name);

struct ErrorSpec {
  ErrorKind kind = ErrorKind::random_noise;
  double shift = 0.0;     // systematic_shift only
  double noise_sd = 0.0;  // random_noise only
  ErrorTarget target = ErrorTarget::predictor;
  std::uint64_t seed = 0;

  void validate() const;
  json to_json() const;
  static ErrorSpec from_json(const json& j);
};

struct TrueModel {
  double alpha = 0.0;
  double beta = 0.5;
  double sigma_y = 1.0;
};

struct XDist {
  double mean = 0.0;
  double sd = 1.0;
};

struct SyntheticDataset {
  std::vector<double> x_true, x_obs, y_true, y_obs;

  struct SimpleFit {
    double intercept = 0.0;
    double slope = 0.0;
  };
  /// OLS of y_obs on x_obs (what an analyst would naively run).
  SimpleFit naive_fit() const;
  /// OLS of y_true on x_true.
  SimpleFit true_fit() const;
  /// Spearman rank correlation between x_true and x_obs; a systematic
  /// shift preserves ordering, so this is 1 there.
  double rank_correlation_x() const;

  void to_csv(const std::filesystem::path& path) const;
};

/// Draws (x, y) from y = alpha + beta*x + N(0, sigma_y^2) with
/// x ~ N(mean, sd^2), then corrupts the designated variable. With
/// random_noise on the predictor the expected naive slope is lambda*beta,
/// lambda = sd^2 / (sd^2 + noise_sd^2).
SyntheticDataset simulate_measurement_error(const TrueModel& model,
                                            const XDist& x_dist, int n,
                                            const ErrorSpec& error);

/// Noise s.d. that yields predictor reliability `lambda` given x's s.d.
double noise_sd_for_reliability(double lambda, double x_sd);

/// Monte Carlo scenario comparing naive / classical / rectified estimators.
struct Scenario {
  enum class Target { mean, ols };
  Target target = Target::mean;

  int n_labelled = 50;
  int n_unlabelled = 2000;

  // mean target: z ~ N(mu, sigma_z^2)
  double mu = 0.0;
  double sigma_z = 1.0;

  // ols target: x ~ N(x_mean, x_sd^2), z = alpha + beta*x + N(0, sigma_z^2)
  double alpha = 0.0;
  double beta = 0.5;
  double x_mean = 0.0;
  double x_sd = 1.0;

  // Machine annotation model: z_hat = E[z] + reliability*(z - E[z]) + bias
  // + N(0, noise_sd^2). reliability < 1 makes naive regression slopes
  // attenuate by exactly that factor; bias shifts the naive mean.
  double bias = 0.0;
  double noise_sd = 0.0;
  double reliability = 1.0;

  double level = 0.95;
  std::uint64_t seed = 1;

  void validate() const;
  /// The estimand: mu (mean target) or beta (ols target slope).
  double true_value() const;

  json to_json() const;
  static Scenario from_json(const json& j);
};

struct EstimatorSummary {
  std::string estimator;
  double mean_point = 0.0;
  double sd_point = 0.0;
  double coverage = 0.0;       // fraction of CIs containing the truth
  double mean_ci_width = 0.0;
};

struct ComparisonTable {
  Scenario scenario;
  int n_reps = 0;
  double true_value = 0.0;
  std::vector<EstimatorSummary> rows;

  json to_json() const;
  std::string to_markdown() const;
};

/// Replicates the scenario n_reps times (per-replication seed = seed + rep)
/// and tabulates mean point, spread, CI coverage and width per estimator.
ComparisonTable compare_estimators(const Scenario& scenario, int n_reps);

}  // namespace annopipe
