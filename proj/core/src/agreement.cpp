#include "annopipe/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "annopipe/error.hpp"
#include "annopipe/random.hpp"

namespace annopipe {

RatingMatrix::RatingMatrix(std::size_t n_raters, std::size_t n_items)
    : n_raters_(n_raters), n_items_(n_items), cells_(n_raters * n_items) {
  if (n_raters_ < 2) {
    fail(Errc::validation, "a rating matrix needs at least two raters");
  }
}

RatingMatrix RatingMatrix::from_pairs(const LabelPairs& pairs) {
  if (pairs.empty()) fail(Errc::validation, "empty rating pairs");
  RatingMatrix m(2, pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    m.set(0, i, pairs[i].first);
    m.set(1, i, pairs[i].second);
  }
  return m;
}

void RatingMatrix::set(std::size_t rater, std::size_t item, LabelValue value) {
  cells_.at(rater * n_items_ + item) = std::move(value);
}

const std::optional<LabelValue>& RatingMatrix::cell(std::size_t rater,
                                                    std::size_t item) const {
  return cells_.at(rater * n_items_ + item);
}

bool RatingMatrix::complete() const {
  return std::all_of(cells_.begin(), cells_.end(),
                     [](const auto& c) { return c.has_value(); });
}

LabelPairs numeric_pairs(const std::vector<double>& machine,
                         const std::vector<double>& gold) {
  if (machine.size() != gold.size()) {
    fail(Errc::validation, "pair vectors differ in length");
  }
  LabelPairs pairs;
  pairs.reserve(machine.size());
  for (std::size_t i = 0; i < machine.size(); ++i) {
    pairs.emplace_back(LabelValue::number(machine[i]),
                       LabelValue::number(gold[i]));
  }
  return pairs;
}

double accuracy(const LabelPairs& pairs) {
  if (pairs.empty()) fail(Errc::validation, "accuracy of an empty pair list");
  std::size_t matches = 0;
  for (const auto& [machine, gold] : pairs) {
    if (machine == gold) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(pairs.size());
}

namespace {

/// Distinct values across both raters, in sorted order, with the confusion
/// matrix of observed pair counts.
struct Confusion {
  std::vector<LabelValue> values;
  std::vector<std::vector<double>> counts;  // row: first rater, col: second
  double n = 0.0;

  std::size_t index(const LabelValue& v) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] == v) return i;
    }
    fail(Errc::validation, "value missing from confusion index");
  }
};

Confusion build_confusion(const LabelPairs& pairs) {
  Confusion c;
  std::set<LabelValue> distinct;
  for (const auto& [a, b] : pairs) {
    distinct.insert(a);
    distinct.insert(b);
  }
  c.values.assign(distinct.begin(), distinct.end());
  c.counts.assign(c.values.size(), std::vector<double>(c.values.size(), 0.0));
  for (const auto& [a, b] : pairs) {
    c.counts[c.index(a)][c.index(b)] += 1.0;
  }
  c.n = static_cast<double>(pairs.size());
  return c;
}

}  // namespace

double cohen_kappa(const LabelPairs& pairs) {
  if (pairs.empty()) fail(Errc::validation, "kappa of an empty pair list");
  const Confusion c = build_confusion(pairs);
  const std::size_t k = c.values.size();
  if (k < 2) {
    fail(Errc::undefined_metric,
         "Cohen's kappa undefined: fewer than two distinct categories observed");
  }
  std::vector<double> row(k, 0.0), col(k, 0.0);
  double diag = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      row[i] += c.counts[i][j];
      col[j] += c.counts[i][j];
    }
    diag += c.counts[i][i];
  }
  const double p_o = diag / c.n;
  double p_e = 0.0;
  for (std::size_t i = 0; i < k; ++i) p_e += (row[i] / c.n) * (col[i] / c.n);
  if (std::fabs(1.0 - p_e) < 1e-15) {
    fail(Errc::undefined_metric,
         "Cohen's kappa undefined: expected agreement is 1");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

double weighted_kappa(const LabelPairs& pairs, KappaWeights weights,
                      const LabelSchema& schema) {
  if (pairs.empty()) fail(Errc::validation, "kappa of an empty pair list");
  if (schema.kind != LabelKind::ordinal && schema.kind != LabelKind::interval) {
    fail(Errc::validation,
         "weighted kappa requires an ordinal or interval schema");
  }
  const std::size_t k = schema.categories.size();
  if (k < 2) {
    fail(Errc::undefined_metric,
         "weighted kappa undefined on a single-category schema");
  }
  auto weight = [&](std::size_t i, std::size_t j) {
    const double d = static_cast<double>(i > j ? i - j : j - i) /
                     static_cast<double>(k - 1);
    return weights == KappaWeights::linear ? d : d * d;
  };

  std::vector<std::vector<double>> counts(k, std::vector<double>(k, 0.0));
  std::vector<double> row(k, 0.0), col(k, 0.0);
  const double n = static_cast<double>(pairs.size());
  for (const auto& [a, b] : pairs) {
    const auto ia = schema.category_index(a);
    const auto ib = schema.category_index(b);
    if (!ia || !ib) {
      fail(Errc::validation, "pair value outside the schema categories");
    }
    counts[*ia][*ib] += 1.0;
    row[*ia] += 1.0;
    col[*ib] += 1.0;
  }
  double observed = 0.0, expected = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      observed += weight(i, j) * counts[i][j] / n;
      expected += weight(i, j) * (row[i] / n) * (col[j] / n);
    }
  }
  if (expected < 1e-15) {
    fail(Errc::undefined_metric,
         "weighted kappa undefined: expected disagreement is 0");
  }
  return 1.0 - observed / expected;
}

namespace {

/// Values, pooled frequencies and the coincidence matrix for alpha.
struct Coincidence {
  std::vector<LabelValue> values;  // sorted distinct pairable values
  std::vector<std::vector<double>> o;  // o[c][k] coincidence counts
  std::vector<double> n_c;             // marginal totals
  double n = 0.0;                      // total pairable values
};

Coincidence build_coincidence(const RatingMatrix& m) {
  Coincidence co;
  std::set<LabelValue> distinct;
  std::vector<std::vector<LabelValue>> item_values(m.n_items());
  for (std::size_t item = 0; item < m.n_items(); ++item) {
    for (std::size_t rater = 0; rater < m.n_raters(); ++rater) {
      if (const auto& cell = m.cell(rater, item)) {
        item_values[item].push_back(*cell);
      }
    }
    if (item_values[item].size() >= 2) {
      for (const auto& v : item_values[item]) distinct.insert(v);
    }
  }
  co.values.assign(distinct.begin(), distinct.end());
  const std::size_t k = co.values.size();
  co.o.assign(k, std::vector<double>(k, 0.0));
  co.n_c.assign(k, 0.0);

  auto index = [&](const LabelValue& v) {
    for (std::size_t i = 0; i < k; ++i) {
      if (co.values[i] == v) return i;
    }
    fail(Errc::validation, "value missing from coincidence index");
  };

  for (const auto& vals : item_values) {
    const std::size_t m_u = vals.size();
    if (m_u < 2) continue;  // unpairable item
    const double weight = 1.0 / static_cast<double>(m_u - 1);
    for (std::size_t a = 0; a < m_u; ++a) {
      for (std::size_t b = 0; b < m_u; ++b) {
        if (a == b) continue;
        co.o[index(vals[a])][index(vals[b])] += weight;
      }
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    co.n_c[c] = std::accumulate(co.o[c].begin(), co.o[c].end(), 0.0);
    co.n += co.n_c[c];
  }
  return co;
}

/// Squared distance between category c and k for the requested level.
double alpha_delta_sq(const Coincidence& co, LabelKind level, std::size_t c,
                      std::size_t k) {
  if (c == k) return 0.0;
  switch (level) {
    case LabelKind::nominal:
      return 1.0;
    case LabelKind::ordinal: {
      // Cumulative-frequency rank metric: sum the pooled frequencies of all
      // ranks between c and k, counting the endpoints half.
      const auto [lo, hi] = std::minmax(c, k);
      double sum = 0.0;
      for (std::size_t g = lo; g <= hi; ++g) sum += co.n_c[g];
      sum -= (co.n_c[lo] + co.n_c[hi]) / 2.0;
      return sum * sum;
    }
    case LabelKind::interval:
    case LabelKind::continuous: {
      const double d =
          co.values[c].as_number() - co.values[k].as_number();
      return d * d;
    }
  }
  return 1.0;
}

}  // namespace

double krippendorff_alpha(const RatingMatrix& matrix, LabelKind level) {
  const Coincidence co = build_coincidence(matrix);
  if (co.n < 2.0) {
    fail(Errc::validation,
         "Krippendorff's alpha needs at least one item with two ratings");
  }
  const std::size_t k = co.values.size();
  double d_o = 0.0;
  double d_e = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < k; ++j) {
      const double delta = alpha_delta_sq(co, level, c, j);
      d_o += co.o[c][j] * delta;
      d_e += co.n_c[c] * co.n_c[j] * delta;
    }
  }
  d_o /= co.n;
  d_e /= co.n * (co.n - 1.0);
  if (d_e < 1e-15) {
    fail(Errc::undefined_metric,
         "Krippendorff's alpha undefined: expected disagreement is 0");
  }
  return 1.0 - d_o / d_e;
}

BootstrapCI krippendorff_alpha_bootstrap_ci(const RatingMatrix& matrix,
                                            LabelKind level, int resamples,
                                            double level_conf,
                                            std::uint64_t seed) {
  if (resamples < 2) fail(Errc::validation, "need at least 2 resamples");
  Rng rng(seed);
  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    RatingMatrix resampled(matrix.n_raters(), matrix.n_items());
    for (std::size_t item = 0; item < matrix.n_items(); ++item) {
      const std::size_t source =
          static_cast<std::size_t>(rng.bounded(matrix.n_items()));
      for (std::size_t rater = 0; rater < matrix.n_raters(); ++rater) {
        if (const auto& cell = matrix.cell(rater, source)) {
          resampled.set(rater, item, *cell);
        }
      }
    }
    try {
      draws.push_back(krippendorff_alpha(resampled, level));
    } catch (const Error&) {
      // Degenerate resample (no variation); skip it.
    }
  }
  if (draws.size() < 2) {
    fail(Errc::undefined_metric,
         "bootstrap produced no valid alpha resamples");
  }
  std::sort(draws.begin(), draws.end());
  const double tail = (1.0 - level_conf) / 2.0;
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(draws.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, draws.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return draws[lo] * (1.0 - frac) + draws[hi] * frac;
  };
  BootstrapCI ci;
  ci.lo = quantile(tail);
  ci.hi = quantile(1.0 - tail);
  ci.level = level_conf;
  ci.resamples = static_cast<int>(draws.size());
  return ci;
}

double icc_2_1(const RatingMatrix& matrix) {
  if (!matrix.complete()) {
    fail(Errc::validation, "ICC(2,1) requires a complete rating matrix");
  }
  const std::size_t k = matrix.n_raters();
  const std::size_t n = matrix.n_items();
  if (n < 2) fail(Errc::validation, "ICC(2,1) needs at least two items");

  auto value = [&](std::size_t r, std::size_t i) {
    return matrix.cell(r, i)->as_number();
  };

  double grand = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t i = 0; i < n; ++i) grand += value(r, i);
  }
  grand /= static_cast<double>(n * k);

  std::vector<double> item_mean(n, 0.0), rater_mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < k; ++r) item_mean[i] += value(r, i);
    item_mean[i] /= static_cast<double>(k);
  }
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t i = 0; i < n; ++i) rater_mean[r] += value(r, i);
    rater_mean[r] /= static_cast<double>(n);
  }

  double ss_total = 0.0, ss_items = 0.0, ss_raters = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      ss_total += (value(r, i) - grand) * (value(r, i) - grand);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    ss_items += (item_mean[i] - grand) * (item_mean[i] - grand);
  }
  ss_items *= static_cast<double>(k);
  for (std::size_t r = 0; r < k; ++r) {
    ss_raters += (rater_mean[r] - grand) * (rater_mean[r] - grand);
  }
  ss_raters *= static_cast<double>(n);
  const double ss_error = ss_total - ss_items - ss_raters;

  if (ss_total < 1e-15) {
    fail(Errc::undefined_metric, "ICC undefined: zero total variance");
  }

  const double ms_items = ss_items / static_cast<double>(n - 1);
  const double ms_raters = ss_raters / static_cast<double>(k - 1);
  const double ms_error =
      ss_error / static_cast<double>((n - 1) * (k - 1));

  const double denom =
      ms_items + static_cast<double>(k - 1) * ms_error +
      static_cast<double>(k) * (ms_raters - ms_error) / static_cast<double>(n);
  if (std::fabs(denom) < 1e-15) {
    fail(Errc::undefined_metric, "ICC undefined: degenerate denominator");
  }
  return (ms_items - ms_error) / denom;
}

ErrorMetricsResult error_metrics(
    const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) {
    fail(Errc::validation, "error metrics need at least two pairs");
  }
  ErrorMetricsResult result;
  const double n = static_cast<double>(pairs.size());
  double abs_sum = 0.0, sq_sum = 0.0;
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [x, y] : pairs) {
    abs_sum += std::fabs(x - y);
    sq_sum += (x - y) * (x - y);
    mean_x += x;
    mean_y += y;
  }
  result.mae = abs_sum / n;
  result.rmse = std::sqrt(sq_sum / n);
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mean_x) * (x - mean_x);
    syy += (y - mean_y) * (y - mean_y);
    sxy += (x - mean_x) * (y - mean_y);
  }
  if (sxx > 1e-15 && syy > 1e-15) {
    result.pearson_r = sxy / std::sqrt(sxx * syy);
  }
  return result;
}

json AgreementReport::to_json() const {
  json j;
  j["metric"] = metric;
  j["value"] = value;
  j["n_items"] = n_items;
  j["n_excluded"] = n_excluded;
  json disputes = json::array();
  for (const auto& d : disagreements) {
    json jd;
    jd["unit_id"] = d.unit_id;
    jd["machine"] = d.machine.to_json();
    jd["gold"] = d.gold.to_json();
    if (d.reasoning) jd["reasoning"] = *d.reasoning;
    disputes.push_back(jd);
  }
  j["disagreements"] = disputes;
  json histogram = json::object();
  for (const auto& [delta, count] : signed_histogram) {
    const std::string key = delta > 0 ? "+" + std::to_string(delta)
                                      : std::to_string(delta);
    histogram[key] = count;
  }
  j["signed_histogram"] = histogram;
  return j;
}

std::string AgreementReport::to_markdown() const {
  std::ostringstream out;
  out << "# Agreement report\n\n";
  out << "- metric: **" << metric << "** = " << value << "\n";
  out << "- items scored: " << n_items << "\n";
  out << "- items excluded (parse errors): " << n_excluded << "\n\n";
  if (!signed_histogram.empty()) {
    out << "## Signed differences (machine - gold)\n\n";
    out << "| difference | count |\n|---:|---:|\n";
    for (const auto& [delta, count] : signed_histogram) {
      out << "| " << (delta > 0 ? "+" : "") << delta << " | " << count
          << " |\n";
    }
    out << "\n";
  }
  out << "## Disagreements (" << disagreements.size() << ")\n\n";
  if (disagreements.empty()) {
    out << "none\n";
  } else {
    out << "| unit | machine | gold | reasoning |\n|---|---|---|---|\n";
    for (const auto& d : disagreements) {
      std::string reason = d.reasoning.value_or("");
      for (auto& c : reason) {
        if (c == '\n' || c == '|') c = ' ';
      }
      out << "| " << d.unit_id << " | " << d.machine.repr() << " | "
          << d.gold.repr() << " | " << reason << " |\n";
    }
  }
  return out.str();
}

AgreementReport disagreement_report(const AggregateResult& aggregated,
                                    const Corpus& corpus) {
  AgreementReport report;
  for (const auto& [unit_id, machine] : aggregated.labels) {
    const TextUnit& unit = corpus.at(unit_id);
    if (!unit.gold) continue;
    ++report.n_items;
    if (machine == *unit.gold) continue;
    Disagreement d;
    d.unit_id = unit_id;
    d.machine = machine;
    d.gold = *unit.gold;
    if (const auto it = aggregated.reasoning.find(unit_id);
        it != aggregated.reasoning.end()) {
      d.reasoning = it->second;
    }
    report.disagreements.push_back(std::move(d));
  }
  for (const auto& [unit_id, machine] : aggregated.labels) {
    const TextUnit& unit = corpus.at(unit_id);
    if (!unit.gold || !machine.is_number() || !unit.gold->is_number()) continue;
    const double diff = machine.as_number() - unit.gold->as_number();
    const int bucket = static_cast<int>(std::lround(diff));
    if (diff != 0.0) report.signed_histogram[bucket] += 1;
  }
  for (const auto& unit_id : aggregated.parse_error_units) {
    if (corpus.at(unit_id).gold) ++report.n_excluded;
  }
  return report;
}

}  // namespace annopipe
