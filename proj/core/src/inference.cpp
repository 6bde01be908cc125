#include "annopipe/inference.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "annopipe/csv.hpp"
#include "annopipe/error.hpp"
#include "annopipe/random.hpp"

namespace annopipe {

namespace {

/// Two-sided normal quantile via Acklam's rational approximation; accurate
/// to ~1e-9, ample for confidence intervals.
double normal_quantile(double p) {
  if (p <= 0.0 || p >= 1.0) {
    fail(Errc::validation, "normal quantile needs p in (0,1)");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - plow) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
            a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
           c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

double z_critical(double level) {
  return normal_quantile(0.5 + level / 2.0);
}

double sample_mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = sample_mean(xs);
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

RegressionResult make_result(const std::string& estimator,
                             const std::vector<double>& coef,
                             const std::vector<double>& se, double level,
                             int n_labelled, int n_unlabelled) {
  RegressionResult r;
  r.estimator = estimator;
  r.coefficients = coef;
  r.std_errors = se;
  r.level = level;
  r.n_labelled = n_labelled;
  r.n_unlabelled = n_unlabelled;
  const double z = z_critical(level);
  r.ci_lo.resize(coef.size());
  r.ci_hi.resize(coef.size());
  for (std::size_t i = 0; i < coef.size(); ++i) {
    r.ci_lo[i] = coef[i] - z * se[i];
    r.ci_hi[i] = coef[i] + z * se[i];
  }
  return r;
}

}  // namespace

json RegressionResult::to_json() const {
  json j;
  j["estimator"] = estimator;
  j["coefficients"] = coefficients;
  j["std_errors"] = std_errors;
  json ci = json::array();
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    ci.push_back(json{{"lo", ci_lo[i]}, {"hi", ci_hi[i]}});
  }
  j["ci"] = ci;
  j["level"] = level;
  j["n_labelled"] = n_labelled;
  j["n_unlabelled"] = n_unlabelled;
  if (warning) j["warning"] = *warning;
  return j;
}

OlsFit ols_fit(const std::vector<std::vector<double>>& covariate_columns,
               const std::vector<double>& y, bool add_intercept) {
  const int n = static_cast<int>(y.size());
  const int p_raw = static_cast<int>(covariate_columns.size());
  const int p = p_raw + (add_intercept ? 1 : 0);
  if (p == 0) fail(Errc::validation, "no covariates to fit");
  for (const auto& column : covariate_columns) {
    if (static_cast<int>(column.size()) != n) {
      fail(Errc::validation, "covariate column length mismatch");
    }
  }
  if (n <= p) {
    fail(Errc::validation, "need n > p for least squares (n=" +
                               std::to_string(n) + ", p=" + std::to_string(p) +
                               ")");
  }

  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i) {
    int col = 0;
    if (add_intercept) X(i, col++) = 1.0;
    for (int c = 0; c < p_raw; ++c) X(i, col++) = covariate_columns[c][i];
  }
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    fail(Errc::validation, "design matrix is rank deficient (rank " +
                               std::to_string(qr.rank()) + " < " +
                               std::to_string(p) + ")");
  }
  const Eigen::VectorXd beta = qr.solve(yv);
  const Eigen::VectorXd resid = yv - X * beta;

  // HC1 sandwich: (X'X)^-1 X' diag(e^2) X (X'X)^-1 * n/(n-p).
  const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = X.row(i).transpose();
    meat.noalias() += resid(i) * resid(i) * xi * xi.transpose();
  }
  Eigen::MatrixXd cov = xtx_inv * meat * xtx_inv;
  cov *= static_cast<double>(n) / static_cast<double>(n - p);

  OlsFit fit;
  fit.n = n;
  fit.p = p;
  fit.coefficients.assign(beta.data(), beta.data() + p);
  fit.std_errors.resize(p);
  fit.covariance.assign(p, std::vector<double>(p, 0.0));
  for (int i = 0; i < p; ++i) {
    fit.std_errors[i] = std::sqrt(std::max(0.0, cov(i, i)));
    for (int j = 0; j < p; ++j) fit.covariance[i][j] = cov(i, j);
  }
  return fit;
}

json CorrectionResult::to_json() const {
  return json{{"naive", naive.to_json()},
              {"classical", classical.to_json()},
              {"rectified", rectified.to_json()}};
}

std::string CorrectionResult::to_markdown() const {
  std::ostringstream out;
  out << "| estimator | coefficient | estimate | se | ci |\n";
  out << "|---|---:|---:|---:|---|\n";
  for (const RegressionResult* r : {&naive, &classical, &rectified}) {
    for (std::size_t i = 0; i < r->coefficients.size(); ++i) {
      out << "| " << r->estimator << " | " << i << " | "
          << r->coefficients[i] << " | " << r->std_errors[i] << " | ["
          << r->ci_lo[i] << ", " << r->ci_hi[i] << "] |\n";
    }
  }
  return out.str();
}

CorrectionResult ppi_mean(const std::vector<LabelledPair>& labelled,
                          const std::vector<double>& unlabelled_z_hat,
                          double level) {
  if (labelled.size() < 2) {
    fail(Errc::validation, "ppi_mean needs at least two labelled pairs");
  }
  if (unlabelled_z_hat.empty()) {
    fail(Errc::validation, "ppi_mean needs at least one unlabelled value");
  }
  const int n = static_cast<int>(labelled.size());
  const int N_extra = static_cast<int>(unlabelled_z_hat.size());
  const int N_total = n + N_extra;

  std::vector<double> all_z_hat = unlabelled_z_hat;
  std::vector<double> z(labelled.size());
  std::vector<double> diff(labelled.size());
  for (std::size_t i = 0; i < labelled.size(); ++i) {
    all_z_hat.push_back(labelled[i].z_hat);
    z[i] = labelled[i].z;
    diff[i] = labelled[i].z - labelled[i].z_hat;
  }

  const double naive_point = sample_mean(all_z_hat);
  const double naive_se =
      std::sqrt(sample_variance(all_z_hat) / static_cast<double>(N_total));

  const double classical_point = sample_mean(z);
  const double classical_se =
      std::sqrt(sample_variance(z) / static_cast<double>(n));

  const double rectifier = sample_mean(diff);
  const double rect_point = naive_point + rectifier;
  const double rect_var =
      sample_variance(all_z_hat) / static_cast<double>(N_total) +
      sample_variance(diff) / static_cast<double>(n);
  const double rect_se = std::sqrt(rect_var);

  CorrectionResult result;
  result.naive = make_result("naive", {naive_point}, {naive_se}, level, n,
                             N_extra);
  result.classical =
      make_result("classical", {classical_point}, {classical_se}, level, n, 0);
  result.rectified =
      make_result("rectified", {rect_point}, {rect_se}, level, n, N_extra);
  if (rect_var < 1e-30) {
    result.rectified.warning =
        "degenerate variance: confidence interval has zero width";
  }
  return result;
}

namespace {

std::vector<std::vector<double>> columns_from_rows(
    const std::vector<const std::vector<double>*>& rows) {
  if (rows.empty()) fail(Errc::validation, "no covariate rows");
  const std::size_t width = rows.front()->size();
  for (const auto* row : rows) {
    if (row->size() != width) {
      fail(Errc::validation, "covariate rows differ in length");
    }
  }
  std::vector<std::vector<double>> columns(width,
                                           std::vector<double>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < width; ++c) columns[c][i] = (*rows[i])[c];
  }
  return columns;
}

}  // namespace

CorrectionResult ppi_ols(const std::vector<LabelledPair>& labelled,
                         const std::vector<UnlabelledPoint>& unlabelled,
                         double level) {
  if (labelled.empty() || unlabelled.empty()) {
    fail(Errc::validation, "ppi_ols needs labelled and unlabelled data");
  }

  std::vector<const std::vector<double>*> all_rows, lab_rows;
  std::vector<double> all_z_hat, lab_z, lab_diff;
  for (const auto& u : unlabelled) {
    all_rows.push_back(&u.w);
    all_z_hat.push_back(u.z_hat);
  }
  for (const auto& l : labelled) {
    all_rows.push_back(&l.w);
    all_z_hat.push_back(l.z_hat);
    lab_rows.push_back(&l.w);
    lab_z.push_back(l.z);
    lab_diff.push_back(l.z - l.z_hat);
  }

  const auto all_columns = columns_from_rows(all_rows);
  const auto lab_columns = columns_from_rows(lab_rows);

  const OlsFit naive_fit = ols_fit(all_columns, all_z_hat);
  const OlsFit classical_fit = ols_fit(lab_columns, lab_z);
  // OLS is linear in the response, so the rectifier (difference of the two
  // labelled-set fits) is itself one fit on the gold-minus-machine values.
  const OlsFit rectifier_fit = ols_fit(lab_columns, lab_diff);

  const int n = static_cast<int>(labelled.size());
  const int N_extra = static_cast<int>(unlabelled.size());
  const std::size_t p = naive_fit.coefficients.size();

  std::vector<double> rect_coef(p), rect_se(p);
  for (std::size_t i = 0; i < p; ++i) {
    rect_coef[i] = naive_fit.coefficients[i] + rectifier_fit.coefficients[i];
    rect_se[i] = std::sqrt(naive_fit.covariance[i][i] +
                           rectifier_fit.covariance[i][i]);
  }

  CorrectionResult result;
  result.naive = make_result("naive", naive_fit.coefficients,
                             naive_fit.std_errors, level, n, N_extra);
  result.classical = make_result("classical", classical_fit.coefficients,
                                 classical_fit.std_errors, level, n, 0);
  result.rectified =
      make_result("rectified", rect_coef, rect_se, level, n, N_extra);
  return result;
}

std::string to_string(ErrorKind kind) {
  return kind == ErrorKind::systematic_shift ? "systematic_shift"
                                             : "random_noise";
}

std::string to_string(ErrorTarget target) {
  return target == ErrorTarget::predictor ? "predictor" : "outcome";
}

ErrorKind error_kind_from_string(const std::string& name) {
  if (name == "systematic_shift") return ErrorKind::systematic_shift;
  if (name == "random_noise") return ErrorKind::random_noise;
  fail(Errc::validation, "unknown error kind: '" + name + "'");
}

ErrorTarget error_target_from_string(const std::string& name) {
  if (name == "predictor") return ErrorTarget::predictor;
  if (name == "outcome") return ErrorTarget::outcome;
  fail(Errc::validation, "unknown error target: '" + name + "'");
}

void ErrorSpec::validate() const {
  if (noise_sd < 0) fail(Errc::validation, "noise_sd must be >= 0");
  if (kind == ErrorKind::systematic_shift && noise_sd != 0.0) {
    fail(Errc::validation, "systematic_shift uses shift only, not noise_sd");
  }
  if (kind == ErrorKind::random_noise && shift != 0.0) {
    fail(Errc::validation, "random_noise uses noise_sd only, not shift");
  }
}

json ErrorSpec::to_json() const {
  return json{{"kind", annopipe::to_string(kind)},
              {"shift", shift},
              {"noise_sd", noise_sd},
              {"target", annopipe::to_string(target)},
              {"seed", seed}};
}

ErrorSpec ErrorSpec::from_json(const json& j) {
  ErrorSpec e;
  e.kind = error_kind_from_string(j.at("kind").get<std::string>());
  e.shift = j.value("shift", 0.0);
  e.noise_sd = j.value("noise_sd", 0.0);
  if (j.contains("target")) {
    e.target = error_target_from_string(j.at("target").get<std::string>());
  }
  e.seed = j.value("seed", std::uint64_t{0});
  e.validate();
  return e;
}

namespace {

SyntheticDataset::SimpleFit simple_ols(const std::vector<double>& x,
                                       const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx / n < 1e-15) {
    fail(Errc::undefined_metric, "slope undefined: predictor is constant");
  }
  SyntheticDataset::SimpleFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::vector<double> ranks_of(const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    ranks[order[pos]] = static_cast<double>(pos);
  }
  return ranks;
}

}  // namespace

SyntheticDataset::SimpleFit SyntheticDataset::naive_fit() const {
  return simple_ols(x_obs, y_obs);
}

SyntheticDataset::SimpleFit SyntheticDataset::true_fit() const {
  return simple_ols(x_true, y_true);
}

double SyntheticDataset::rank_correlation_x() const {
  const auto rx = ranks_of(x_true);
  const auto ry = ranks_of(x_obs);
  const double mx = sample_mean(rx);
  const double my = sample_mean(ry);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
    sxy += (rx[i] - mx) * (ry[i] - my);
  }
  if (sxx < 1e-15 || syy < 1e-15) return 1.0;
  return sxy / std::sqrt(sxx * syy);
}

void SyntheticDataset::to_csv(const std::filesystem::path& path) const {
  CsvTable table;
  table.header = {"x_true", "x_obs", "y_true", "y_obs"};
  auto fmt = [](double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < x_true.size(); ++i) {
    table.rows.push_back({fmt(x_true[i]), fmt(x_obs[i]), fmt(y_true[i]),
                          fmt(y_obs[i])});
  }
  write_csv(path, table);
}

SyntheticDataset simulate_measurement_error(const TrueModel& model,
                                            const XDist& x_dist, int n,
                                            const ErrorSpec& error) {
  if (n < 10) fail(Errc::validation, "simulation needs n >= 10");
  if (x_dist.sd <= 0) fail(Errc::validation, "x_dist.sd must be positive");
  if (model.sigma_y < 0) fail(Errc::validation, "sigma_y must be >= 0");
  error.validate();

  Rng rng(error.seed);
  SyntheticDataset data;
  data.x_true.resize(n);
  data.y_true.resize(n);
  for (int i = 0; i < n; ++i) {
    data.x_true[i] = rng.normal(x_dist.mean, x_dist.sd);
    data.y_true[i] =
        model.alpha + model.beta * data.x_true[i] + rng.normal(0, model.sigma_y);
  }
  data.x_obs = data.x_true;
  data.y_obs = data.y_true;

  auto corrupt = [&](std::vector<double>& column) {
    if (error.kind == ErrorKind::systematic_shift) {
      for (double& v : column) v += error.shift;
    } else {
      for (double& v : column) v += rng.normal(0, error.noise_sd);
    }
  };
  if (error.target == ErrorTarget::predictor) corrupt(data.x_obs);
  else corrupt(data.y_obs);
  return data;
}

double noise_sd_for_reliability(double lambda, double x_sd) {
  if (lambda <= 0.0 || lambda > 1.0) {
    fail(Errc::validation, "reliability must lie in (0, 1]");
  }
  return x_sd * std::sqrt((1.0 - lambda) / lambda);
}

void Scenario::validate() const {
  if (n_labelled < 2) fail(Errc::validation, "scenario needs n_labelled >= 2");
  if (n_unlabelled < 1) {
    fail(Errc::validation, "scenario needs n_unlabelled >= 1");
  }
  if (sigma_z < 0 || noise_sd < 0) {
    fail(Errc::validation, "scenario standard deviations must be >= 0");
  }
  if (reliability <= 0.0 || reliability > 1.0) {
    fail(Errc::validation, "scenario reliability must lie in (0, 1]");
  }
  if (level <= 0.0 || level >= 1.0) {
    fail(Errc::validation, "confidence level must lie in (0, 1)");
  }
  if (target == Target::ols && x_sd <= 0) {
    fail(Errc::validation, "scenario needs x_sd > 0");
  }
}

double Scenario::true_value() const {
  return target == Target::mean ? mu : beta;
}

json Scenario::to_json() const {
  json j;
  j["target"] = target == Target::mean ? "mean" : "ols";
  j["n_labelled"] = n_labelled;
  j["n_unlabelled"] = n_unlabelled;
  j["mu"] = mu;
  j["sigma_z"] = sigma_z;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["x_mean"] = x_mean;
  j["x_sd"] = x_sd;
  j["bias"] = bias;
  j["noise_sd"] = noise_sd;
  j["reliability"] = reliability;
  j["level"] = level;
  j["seed"] = seed;
  return j;
}

Scenario Scenario::from_json(const json& j) {
  Scenario s;
  const std::string target = j.value("target", std::string("mean"));
  if (target == "mean") s.target = Target::mean;
  else if (target == "ols") s.target = Target::ols;
  else fail(Errc::validation, "unknown scenario target: '" + target + "'");
  s.n_labelled = j.value("n_labelled", 50);
  s.n_unlabelled = j.value("n_unlabelled", 2000);
  s.mu = j.value("mu", 0.0);
  s.sigma_z = j.value("sigma_z", 1.0);
  s.alpha = j.value("alpha", 0.0);
  s.beta = j.value("beta", 0.5);
  s.x_mean = j.value("x_mean", 0.0);
  s.x_sd = j.value("x_sd", 1.0);
  s.bias = j.value("bias", 0.0);
  s.noise_sd = j.value("noise_sd", 0.0);
  s.reliability = j.value("reliability", 1.0);
  s.level = j.value("level", 0.95);
  s.seed = j.value("seed", std::uint64_t{1});
  s.validate();
  return s;
}

namespace {

struct Replication {
  std::vector<LabelledPair> labelled;
  std::vector<double> unlabelled_z_hat;
  std::vector<UnlabelledPoint> unlabelled;
};

Replication draw_replication(const Scenario& s, std::uint64_t rep_seed) {
  Rng rng(rep_seed);
  Replication rep;
  const double center =
      s.target == Scenario::Target::mean ? s.mu : s.alpha + s.beta * s.x_mean;

  auto draw_pair = [&](bool labelled_side) {
    double x = 0.0;
    double z;
    if (s.target == Scenario::Target::mean) {
      z = rng.normal(s.mu, s.sigma_z);
    } else {
      x = rng.normal(s.x_mean, s.x_sd);
      z = s.alpha + s.beta * x + rng.normal(0, s.sigma_z);
    }
    const double z_hat = center + s.reliability * (z - center) + s.bias +
                         rng.normal(0, s.noise_sd);
    if (labelled_side) {
      LabelledPair pair;
      pair.z = z;
      pair.z_hat = z_hat;
      if (s.target == Scenario::Target::ols) pair.w = {x};
      rep.labelled.push_back(std::move(pair));
    } else {
      rep.unlabelled_z_hat.push_back(z_hat);
      UnlabelledPoint point;
      point.z_hat = z_hat;
      if (s.target == Scenario::Target::ols) point.w = {x};
      rep.unlabelled.push_back(std::move(point));
    }
  };

  for (int i = 0; i < s.n_unlabelled; ++i) draw_pair(false);
  for (int i = 0; i < s.n_labelled; ++i) draw_pair(true);
  return rep;
}

}  // namespace

ComparisonTable compare_estimators(const Scenario& scenario, int n_reps) {
  scenario.validate();
  if (n_reps < 2) {
    fail(Errc::validation, "compare_estimators needs n_reps >= 2");
  }
  const double truth = scenario.true_value();
  // Coefficient of interest: the mean itself, or the slope (index 1).
  const std::size_t coef = scenario.target == Scenario::Target::mean ? 0 : 1;

  struct Accumulator {
    std::vector<double> points;
    double covered = 0.0;
    double width = 0.0;
  };
  std::map<std::string, Accumulator> acc;

  for (int rep = 0; rep < n_reps; ++rep) {
    const Replication data =
        draw_replication(scenario, scenario.seed + static_cast<std::uint64_t>(rep));
    const CorrectionResult result =
        scenario.target == Scenario::Target::mean
            ? ppi_mean(data.labelled, data.unlabelled_z_hat, scenario.level)
            : ppi_ols(data.labelled, data.unlabelled, scenario.level);
    for (const RegressionResult* r :
         {&result.naive, &result.classical, &result.rectified}) {
      Accumulator& a = acc[r->estimator];
      a.points.push_back(r->coefficients[coef]);
      if (r->ci_lo[coef] <= truth && truth <= r->ci_hi[coef]) a.covered += 1.0;
      a.width += r->ci_hi[coef] - r->ci_lo[coef];
    }
  }

  ComparisonTable table;
  table.scenario = scenario;
  table.n_reps = n_reps;
  table.true_value = truth;
  for (const char* name : {"naive", "classical", "rectified"}) {
    const Accumulator& a = acc.at(name);
    EstimatorSummary row;
    row.estimator = name;
    row.mean_point = sample_mean(a.points);
    row.sd_point = std::sqrt(sample_variance(a.points));
    row.coverage = a.covered / static_cast<double>(n_reps);
    row.mean_ci_width = a.width / static_cast<double>(n_reps);
    table.rows.push_back(std::move(row));
  }
  return table;
}

json ComparisonTable::to_json() const {
  json rows_json = json::array();
  for (const auto& row : rows) {
    rows_json.push_back(json{{"estimator", row.estimator},
                             {"mean_point", row.mean_point},
                             {"sd_point", row.sd_point},
                             {"coverage", row.coverage},
                             {"mean_ci_width", row.mean_ci_width}});
  }
  return json{{"scenario", scenario.to_json()},
              {"n_reps", n_reps},
              {"true_value", true_value},
              {"estimators", rows_json}};
}

std::string ComparisonTable::to_markdown() const {
  std::ostringstream out;
  out << "| estimator | mean point | sd | coverage | mean CI width |\n";
  out << "|---|---:|---:|---:|---:|\n";
  for (const auto& row : rows) {
    out << "| " << row.estimator << " | " << row.mean_point << " | "
        << row.sd_point << " | " << row.coverage << " | " << row.mean_ci_width
        << " |\n";
  }
  return out.str();
}

}  // namespace annopipe
