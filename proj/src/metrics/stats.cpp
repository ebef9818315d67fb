#include "fedsynth/metrics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "fedsynth/errors.hpp"

namespace fedsynth {

MeanSd mean_sd(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean_sd: empty sample");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  MeanSd out{mean, std::nullopt};
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    out.sd = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

std::string to_string(WilcoxonMethod method) {
  switch (method) {
    case WilcoxonMethod::exact:
      return "exact";
    case WilcoxonMethod::normal_approximation:
      return "normal-approximation";
    case WilcoxonMethod::degenerate:
      return "degenerate";
  }
  return "unknown";
}

namespace {

// Mid-ranks of |d|, doubled so that every rank is an integer.
std::vector<std::int64_t> doubled_midranks(const std::vector<double>& magnitudes) {
  const std::size_t n = magnitudes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return magnitudes[i] < magnitudes[j]; });
  std::vector<std::int64_t> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
    // Ranks i+1 .. j+1 share their mean; doubled: (i + 1) + (j + 1).
    const auto doubled = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
    i = j + 1;
  }
  return ranks;
}

// Exact two-sided p: the null distribution of W+ counts subsets of ranks.
// Subset-sum counting enumerates all 2^n sign assignments grouped by W+.
double exact_p_value(const std::vector<std::int64_t>& doubled_ranks, std::int64_t doubled_w) {
  const std::int64_t total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(),
                                             std::int64_t{0});
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
  counts[0] = 1;
  std::int64_t reach = 0;
  for (std::int64_t r : doubled_ranks) {
    for (std::int64_t s = reach; s >= 0; --s) counts[s + r] += counts[s];
    reach += r;
  }
  std::uint64_t tail = 0;
  for (std::int64_t s = 0; s <= doubled_w; ++s) tail += counts[s];
  const double assignments = std::ldexp(1.0, static_cast<int>(doubled_ranks.size()));
  return std::min(1.0, 2.0 * static_cast<double>(tail) / assignments);
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    WilcoxonMode mode) {
  if (a.size() != b.size()) {
    throw ValidationError("wilcoxon_signed_rank: samples differ in length (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ValidationError("wilcoxon_signed_rank: empty samples");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (!std::isfinite(d)) throw ValidationError("wilcoxon_signed_rank: non-finite difference");
    if (d != 0.0) diffs.push_back(d);
  }

  WilcoxonResult out;
  out.n_effective = static_cast<std::int64_t>(diffs.size());
  if (diffs.empty()) return out;  // degenerate: p = 1

  std::vector<double> magnitudes(diffs.size());
  std::transform(diffs.begin(), diffs.end(), magnitudes.begin(),
                 [](double d) { return std::abs(d); });
  const auto ranks = doubled_midranks(magnitudes);
  std::int64_t plus2 = 0, minus2 = 0;
  for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0 ? plus2 : minus2) += ranks[i];
  out.w_plus = static_cast<double>(plus2) / 2.0;
  out.w_minus = static_cast<double>(minus2) / 2.0;
  out.statistic = std::min(out.w_plus, out.w_minus);

  const bool exact = mode == WilcoxonMode::force_exact ||
                     (mode == WilcoxonMode::automatic && out.n_effective <= kWilcoxonExactLimit);
  if (exact) {
    out.method = WilcoxonMethod::exact;
    out.p_value = exact_p_value(ranks, std::min(plus2, minus2));
    return out;
  }

  out.method = WilcoxonMethod::normal_approximation;
  // W+ is a sum of independent rank * Bernoulli(1/2) terms, so its cumulants
  // follow from the (mid-)ranks directly; ties need no separate correction.
  const double n = static_cast<double>(out.n_effective);
  const double mean = n * (n + 1.0) / 4.0;
  double variance = 0.0;
  double kappa4 = 0.0;
  for (std::int64_t r2 : ranks) {
    const double r = static_cast<double>(r2) / 2.0;
    variance += r * r / 4.0;
    kappa4 -= r * r * r * r / 8.0;
  }
  // Continuity-corrected lower tail with a one-term Edgeworth correction for
  // the (negative) excess kurtosis of W.
  const double z = (out.statistic + 0.5 - mean) / std::sqrt(variance);
  const double excess = kappa4 / (variance * variance);
  const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double lower = 0.5 * std::erfc(-z / std::sqrt(2.0)) -
                       density * excess / 24.0 * (z * z * z - 3.0 * z);
  out.p_value = std::clamp(2.0 * lower, 0.0, 1.0);
  return out;
}

}  // namespace fedsynth
