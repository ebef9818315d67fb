#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace fedsynth {

struct MeanSd {
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator); empty when n < 2.
  std::optional<double> sd;
};

/// Throws ValidationError on an empty sample.
MeanSd mean_sd(std::span<const double> values);

enum class WilcoxonMethod { exact, normal_approximation, degenerate };

std::string to_string(WilcoxonMethod method);

struct WilcoxonResult {
  /// min(W+, W-).
  double statistic = 0.0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  std::int64_t n_effective = 0;
  double p_value = 1.0;
  WilcoxonMethod method = WilcoxonMethod::degenerate;
};

/// Samples with at most this many non-zero differences use the exact null
/// distribution; larger ones use the normal approximation.
inline constexpr std::int64_t kWilcoxonExactLimit = 25;

enum class WilcoxonMode { automatic, force_exact, force_normal };

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped, tied magnitudes receive mid-ranks. The exact p-value counts
/// sign assignments whose W+ is at least as extreme as observed; the normal
/// approximation uses mid-rank moments, a continuity correction and an Edgeworth
/// kurtosis term.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    WilcoxonMode mode = WilcoxonMode::automatic);

}  // namespace fedsynth
