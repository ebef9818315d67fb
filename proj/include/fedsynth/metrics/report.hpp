#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fedsynth {

inline constexpr std::size_t kModelCount = 4;
inline constexpr std::size_t kTestSetCount = 2;
inline constexpr std::array<const char*, kModelCount> kModelNames = {"baseline-a", "baseline-b",
                                                                     "central", "federated"};
inline constexpr std::array<const char*, kTestSetCount> kTestSetNames = {"A", "B"};
inline constexpr double kSignificanceLevel = 0.05;

struct ReportCell {
  std::vector<double> ssim;
  double mean = 0.0;
  std::optional<double> sd;
};

/// Four models evaluated on two test sets, with pairwise signed-rank p-values
/// per test set. Diagonal p-values are the degenerate self-comparison (1).
struct ComparisonReport {
  std::array<std::array<ReportCell, kModelCount>, kTestSetCount> cells;  // [test][model]
  std::array<Eigen::Matrix4d, kTestSetCount> p_values;
  std::array<std::vector<std::string>, kTestSetCount> pair_ids;
  nlohmann::json config = nlohmann::json::object();
  std::string version;

  const ReportCell& cell(std::size_t test_set, std::size_t model) const {
    return cells[test_set][model];
  }
};

using SsimTable = std::array<std::array<std::vector<double>, kModelCount>, kTestSetCount>;

ComparisonReport build_comparison_report(const SsimTable& ssim,
                                         const std::array<std::vector<std::string>, kTestSetCount>& pair_ids);

/// `test_set,pair_index,pair_id,<model>...` with 17 significant digits.
std::string report_csv(const ComparisonReport& report);
/// Human-readable tables; `*` marks p < 0.05.
std::string report_text(const ComparisonReport& report);
nlohmann::json report_json(const ComparisonReport& report);

std::size_t model_index(const std::string& name);

}  // namespace fedsynth
