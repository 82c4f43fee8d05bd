#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mdg/analysis.hpp"
#include "mdg/mixture.hpp"
#include "mdg/samplers.hpp"

namespace mdg {

/// Mixture document: { "N", "D", "classes": [ { "label", "weight", "probs" } ] }
/// where probs is a flat row-major array over non-mask states.
MixtureModel load_mixture_json(const std::string& text);
MixtureModel load_mixture_file(const std::string& path);
std::string mixture_to_json(const MixtureModel& m);

struct Scenario {
  std::string mixture_path;
  std::string guided_class;
  std::vector<double> w;
  double T = 1.0;
  std::vector<double> times;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

Scenario load_scenario_json(const std::string& text, const std::string& base_dir);
Scenario load_scenario_file(const std::string& path);

/// All CSV numbers use 17 significant digits so re-parsing reproduces the
/// in-memory doubles exactly.
std::string format_double(double v);

void write_density_csv(std::ostream& os, const DenseDistribution& d, double w, double t);
void write_tv_csv(std::ostream& os, const std::vector<TVCurve>& curves);
void write_samples_csv(std::ostream& os, const SampleBatch& b);

/// Minimal CSV reader (no quoting; our writers never emit commas in fields).
std::vector<std::vector<std::string>> read_csv(std::istream& is);

/// Self-contained SVG emitters; the artifact's only plotting surface.
void svg_bar_chart(std::ostream& os, const DenseDistribution& d, const std::string& title);
void svg_heatmap(std::ostream& os, const DenseDistribution& d, const std::string& title);
void svg_region_map(std::ostream& os, const RegionDecomposition& rd, const std::string& title);
void svg_tv_vs_w(std::ostream& os, const std::vector<double>& ws,
                 const std::vector<double>& log_tvs, const std::string& title);

std::string region_report_json(const RegionDecomposition& rd);

}  // namespace mdg
