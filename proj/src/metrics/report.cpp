#include "fedsynth/metrics/report.hpp"

#include <cstdio>
#include <sstream>

#include "fedsynth/errors.hpp"
#include "fedsynth/metrics/stats.hpp"

namespace fedsynth {

std::size_t model_index(const std::string& name) {
  for (std::size_t m = 0; m < kModelCount; ++m) {
    if (name == kModelNames[m]) return m;
  }
  throw ValidationError("unknown model '" + name + "'");
}

ComparisonReport build_comparison_report(
    const SsimTable& ssim, const std::array<std::vector<std::string>, kTestSetCount>& pair_ids) {
  ComparisonReport report;
  report.pair_ids = pair_ids;
  for (std::size_t t = 0; t < kTestSetCount; ++t) {
    for (std::size_t m = 0; m < kModelCount; ++m) {
      const auto& values = ssim[t][m];
      if (values.size() != pair_ids[t].size()) {
        throw ValidationError(std::string("report: model ") + kModelNames[m] +
                              " has the wrong number of scores on test set " + kTestSetNames[t]);
      }
      const MeanSd stats = mean_sd(values);
      report.cells[t][m] = {values, stats.mean, stats.sd};
    }
    report.p_values[t].setOnes();
    for (std::size_t i = 0; i < kModelCount; ++i) {
      for (std::size_t j = i + 1; j < kModelCount; ++j) {
        const double p = wilcoxon_signed_rank(ssim[t][i], ssim[t][j]).p_value;
        report.p_values[t](i, j) = report.p_values[t](j, i) = p;
      }
    }
  }
  return report;
}

std::string report_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "test_set,pair_index,pair_id";
  for (const char* name : kModelNames) out << ',' << name;
  out << '\n';
  char buf[32];
  for (std::size_t t = 0; t < kTestSetCount; ++t) {
    for (std::size_t i = 0; i < report.pair_ids[t].size(); ++i) {
      out << kTestSetNames[t] << ',' << i << ',' << report.pair_ids[t][i];
      for (std::size_t m = 0; m < kModelCount; ++m) {
        std::snprintf(buf, sizeof buf, ",%.17g", report.cells[t][m].ssim[i]);
        out << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string report_text(const ComparisonReport& report) {
  std::ostringstream out;
  char buf[160];
  out << "Mean SSIM +/- SD (rows: model, columns: test set)\n";
  std::snprintf(buf, sizeof buf, "%-12s", "model");
  out << buf;
  for (const char* t : kTestSetNames) {
    std::snprintf(buf, sizeof buf, "  %-18s", t);
    out << buf;
  }
  out << '\n';
  for (std::size_t m = 0; m < kModelCount; ++m) {
    std::snprintf(buf, sizeof buf, "%-12s", kModelNames[m]);
    out << buf;
    for (std::size_t t = 0; t < kTestSetCount; ++t) {
      const auto& c = report.cells[t][m];
      std::snprintf(buf, sizeof buf, "  %.4f +/- %-8.4f", c.mean, c.sd.value_or(0.0));
      out << buf;
    }
    out << '\n';
  }
  for (std::size_t t = 0; t < kTestSetCount; ++t) {
    out << "\nWilcoxon signed-rank p-values, test set " << kTestSetNames[t]
        << " (* p < 0.05)\n";
    std::snprintf(buf, sizeof buf, "%-12s", "");
    out << buf;
    for (const char* name : kModelNames) {
      std::snprintf(buf, sizeof buf, "%12s", name);
      out << buf;
    }
    out << '\n';
    for (std::size_t i = 0; i < kModelCount; ++i) {
      std::snprintf(buf, sizeof buf, "%-12s", kModelNames[i]);
      out << buf;
      for (std::size_t j = 0; j < kModelCount; ++j) {
        if (i == j) {
          std::snprintf(buf, sizeof buf, "%12s", "-");
        } else {
          const double p = report.p_values[t](i, j);
          std::snprintf(buf, sizeof buf, "%11.4g%s", p, p < kSignificanceLevel ? "*" : " ");
        }
        out << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

nlohmann::json report_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["version"] = report.version;
  j["config"] = report.config;
  j["significance_level"] = kSignificanceLevel;
  for (std::size_t t = 0; t < kTestSetCount; ++t) {
    nlohmann::json set;
    set["pair_ids"] = report.pair_ids[t];
    for (std::size_t m = 0; m < kModelCount; ++m) {
      const auto& c = report.cells[t][m];
      set["models"][kModelNames[m]] = {
          {"mean", c.mean},
          {"sd", c.sd ? nlohmann::json(*c.sd) : nlohmann::json(nullptr)},
          {"ssim", c.ssim}};
    }
    for (std::size_t i = 0; i < kModelCount; ++i) {
      for (std::size_t k = 0; k < kModelCount; ++k) {
        set["p_values"][kModelNames[i]][kModelNames[k]] = report.p_values[t](i, k);
      }
    }
    j["test_sets"][kTestSetNames[t]] = std::move(set);
  }
  return j;
}

}  // namespace fedsynth
