#include "mdg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace mdg {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Flat row-major index over the (N-1)^D non-mask grid -> full-grid index.
Index non_mask_to_full(Index flat, int N, int D) {
  Index full = 0;
  Index scale = 1;
  for (int d = 0; d < D; ++d) {
    full += (flat % (N - 1)) * scale;
    flat /= (N - 1);
    scale *= N;
  }
  return full;
}

}  // namespace

MixtureModel load_mixture_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mixture JSON parse error: ") + e.what());
  }
  if (!doc.contains("N") || !doc.contains("D") || !doc.contains("classes")) {
    throw ConfigError("mixture JSON needs N, D and classes");
  }
  const int N = doc["N"].get<int>();
  const int D = doc["D"].get<int>();
  StateSpace space(D, N);

  Index non_mask = 1;
  for (int d = 0; d < D; ++d) non_mask *= N - 1;

  std::vector<std::string> labels;
  std::vector<double> weights;
  std::vector<DenseDistribution> conditionals;
  try {
  for (const auto& cls : doc["classes"]) {
    labels.push_back(cls.at("label").get<std::string>());
    weights.push_back(cls.at("weight").get<double>());
    const auto& probs = cls.at("probs");
    if (static_cast<Index>(probs.size()) != non_mask) {
      throw ConfigError("class '" + labels.back() + "': probs must have (N-1)^D entries");
    }
    Vector v = Vector::Zero(space.size());
    for (Index k = 0; k < non_mask; ++k) {
      v[non_mask_to_full(k, N, D)] = probs[static_cast<std::size_t>(k)].get<double>();
    }
    conditionals.emplace_back(space, std::move(v));
  }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mixture JSON: ") + e.what());
  }
  return MixtureModel(space, std::move(labels), std::move(weights), std::move(conditionals));
}

MixtureModel load_mixture_file(const std::string& path) { return load_mixture_json(slurp(path)); }

std::string mixture_to_json(const MixtureModel& m) {
  const StateSpace& space = m.space();
  const int N = space.alphabet();
  const int D = space.dims();
  Index non_mask = 1;
  for (int d = 0; d < D; ++d) non_mask *= N - 1;

  json doc;
  doc["N"] = N;
  doc["D"] = D;
  doc["classes"] = json::array();
  for (int k = 0; k < m.num_classes(); ++k) {
    json cls;
    cls["label"] = m.labels()[k];
    cls["weight"] = m.weight(k);
    json probs = json::array();
    for (Index i = 0; i < non_mask; ++i) probs.push_back(m.conditional(k)(non_mask_to_full(i, N, D)));
    cls["probs"] = std::move(probs);
    doc["classes"].push_back(std::move(cls));
  }
  return doc.dump(2);
}

Scenario load_scenario_json(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON parse error: ") + e.what());
  }
  Scenario sc;
  try {
    sc.mixture_path = doc.at("mixture").get<std::string>();
  if (!sc.mixture_path.empty() && sc.mixture_path[0] != '/' && !base_dir.empty()) {
    sc.mixture_path = base_dir + "/" + sc.mixture_path;
  }
  sc.guided_class = doc.at("guided_class").get<std::string>();
  sc.T = doc.at("T").get<double>();
  if (sc.T <= 0.0) throw ConfigError("scenario: T must be > 0");
  for (const auto& v : doc.at("w")) {
    const double w = v.get<double>();
    if (w < -1.0) throw ConfigError("scenario: w entries must be >= -1");
    sc.w.push_back(w);
  }
  for (const auto& v : doc.at("times")) {
    const double t = v.get<double>();
    if (t < 0.0 || t > sc.T) throw ConfigError("scenario: times must lie in [0, T]");
    sc.times.push_back(t);
  }
  if (doc.contains("seed")) sc.seed = doc["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::string dir = ".";
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return load_scenario_json(slurp(path), dir);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_density_csv(std::ostream& os, const DenseDistribution& d, double w, double t) {
  const int D = d.space().dims();
  for (int k = 1; k <= D; ++k) os << 'x' << k << ',';
  os << "w,t,prob\n";
  for (Index i = 0; i < d.space().size(); ++i) {
    const State s = d.space().state_of(i);
    for (int c : s) os << c << ',';
    os << format_double(w) << ',' << format_double(t) << ',' << format_double(d(i)) << '\n';
  }
}

void write_tv_csv(std::ostream& os, const std::vector<TVCurve>& curves) {
  os << "w,t,tv,log_tv\n";
  for (const TVCurve& c : curves) {
    for (std::size_t k = 0; k < c.times.size(); ++k) {
      os << format_double(c.w) << ',' << format_double(c.times[k]) << ','
         << format_double(c.values[k]) << ',' << format_double(c.log_values[k]) << '\n';
    }
  }
}

void write_samples_csv(std::ostream& os, const SampleBatch& b) {
  const int D = b.space.dims();
  for (int k = 1; k <= D; ++k) {
    os << 'x' << k << (k < D ? "," : "\n");
  }
  for (Index idx : b.samples) {
    const State s = b.space.state_of(idx);
    for (int k = 0; k < D; ++k) os << s[k] << (k + 1 < D ? "," : "\n");
  }
}

std::vector<std::vector<std::string>> read_csv(std::istream& is) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

constexpr int kW = 640, kH = 420, kMargin = 50;

void svg_open(std::ostream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
     << "</text>\n";
}

std::string heat_color(double v) {  // v in [0,1], white -> dark blue
  const int c = static_cast<int>(255.0 * (1.0 - v));
  char buf[24];
  std::snprintf(buf, sizeof(buf), "rgb(%d,%d,255)", c, c);
  return buf;
}

}  // namespace

void svg_bar_chart(std::ostream& os, const DenseDistribution& d, const std::string& title) {
  if (d.space().dims() != 1) throw DimensionMismatch("svg_bar_chart: needs D = 1");
  const int N = d.space().alphabet();
  const double vmax = std::max(1e-12, d.probs().maxCoeff());
  svg_open(os, title);
  const double bw = static_cast<double>(kW - 2 * kMargin) / N;
  for (int x = 0; x < N; ++x) {
    const double h = (kH - 2 * kMargin) * d(x) / vmax;
    os << "<rect x=\"" << kMargin + x * bw + 2 << "\" y=\"" << kH - kMargin - h << "\" width=\""
       << bw - 4 << "\" height=\"" << h << "\" fill=\"" << (x == N - 1 ? "gray" : "steelblue")
       << "\"/>\n";
    os << "<text x=\"" << kMargin + (x + 0.5) * bw << "\" y=\"" << kH - kMargin + 16
       << "\" text-anchor=\"middle\" font-size=\"12\">" << x + 1 << "</text>\n";
  }
  os << "</svg>\n";
}

void svg_heatmap(std::ostream& os, const DenseDistribution& d, const std::string& title) {
  if (d.space().dims() != 2) throw DimensionMismatch("svg_heatmap: needs D = 2");
  const int N = d.space().alphabet();
  const double vmax = std::max(1e-12, d.probs().maxCoeff());
  svg_open(os, title);
  const double cell = std::min((kW - 2 * kMargin), (kH - 2 * kMargin)) / static_cast<double>(N);
  for (int i = 1; i <= N; ++i) {
    for (int j = 1; j <= N; ++j) {
      const double v = d(State{i, j}) / vmax;
      os << "<rect x=\"" << kMargin + (j - 1) * cell << "\" y=\"" << kMargin + (i - 1) * cell
         << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"" << heat_color(v)
         << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
  }
  os << "</svg>\n";
}

void svg_region_map(std::ostream& os, const RegionDecomposition& rd, const std::string& title) {
  const int N = rd.space.alphabet();
  svg_open(os, title);
  const double cell = std::min((kW - 2 * kMargin), (kH - 2 * kMargin)) / static_cast<double>(N);
  const char* colors[5] = {"#2c7bb6", "#abd9e9", "#ffffbf", "#fdae61", "#d7191c"};
  for (int i = 1; i <= N; ++i) {
    for (int j = 1; j <= N; ++j) {
      const Index idx = rd.space.index_of(State{i, j});
      std::string fill = "white";
      const auto it = rd.region_of.find(idx);
      if (it != rd.region_of.end()) fill = colors[static_cast<int>(it->second)];
      os << "<rect x=\"" << kMargin + (j - 1) * cell << "\" y=\"" << kMargin + (i - 1) * cell
         << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"" << fill
         << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
  }
  os << "</svg>\n";
}

void svg_tv_vs_w(std::ostream& os, const std::vector<double>& ws,
                 const std::vector<double>& log_tvs, const std::string& title) {
  svg_open(os, title);
  if (!ws.empty()) {
    double xmin = ws.front(), xmax = ws.back();
    double ymin = log_tvs[0], ymax = log_tvs[0];
    for (double y : log_tvs) {
      if (std::isfinite(y)) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    if (ymax <= ymin) ymax = ymin + 1.0;
    if (xmax <= xmin) xmax = xmin + 1.0;
    std::ostringstream pts;
    for (std::size_t k = 0; k < ws.size(); ++k) {
      if (!std::isfinite(log_tvs[k])) continue;
      const double px = kMargin + (kW - 2 * kMargin) * (ws[k] - xmin) / (xmax - xmin);
      const double py = kH - kMargin - (kH - 2 * kMargin) * (log_tvs[k] - ymin) / (ymax - ymin);
      pts << px << ',' << py << ' ';
      os << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    os << "<polyline points=\"" << pts.str()
       << "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
  }
  os << "</svg>\n";
}

std::string region_report_json(const RegionDecomposition& rd) {
  static const char* names[5] = {"R1", "R2_1", "R2_2", "R3", "R4"};
  json doc;
  doc["guided_class"] = rd.guided_class;
  doc["w"] = rd.w;
  for (int r = 0; r < 5; ++r) {
    json states = json::array();
    for (Index idx : rd.regions[static_cast<std::size_t>(r)]) {
      const State s = rd.space.state_of(idx);
      states.push_back(json::array({s[0], s[1]}));
    }
    doc["regions"][names[r]] = std::move(states);
  }
  json weights = json::array();
  for (const auto& [idx, a] : rd.weight) {
    const State s = rd.space.state_of(idx);
    weights.push_back({{"state", json::array({s[0], s[1]})},
                       {"weight", a},
                       {"limit_weight", rd.limit_weight.at(idx)}});
  }
  doc["weights"] = std::move(weights);
  return doc.dump(2);
}

}  // namespace mdg
