#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "cli.hpp"

namespace gaitmind::cli {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3"};

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label_of(const AggregateRow& r) {
  return r.tl_fraction ? r.protocol + " " + std::to_string(*r.tl_fraction) + "%" : r.protocol;
}

/// Upper end of the y axis in percent, rounded up to a multiple of 5.
double y_limit(double max_pct) { return std::max(5.0, 5.0 * static_cast<int>(max_pct / 5.0 + 1.0)); }

void header(std::ostringstream& s, const std::string& title) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
}

void y_axis(std::ostringstream& s, double ymax) {
  const double h = kHeight - kTop - kBottom;
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + h
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = ymax * i / 5.0;
    const double y = kTop + h - h * i / 5.0;
    s << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << f2(y) << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << f2(y)
      << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << kLeft - 8 << "\" y=\"" << f2(y + 4) << "\" text-anchor=\"end\">" << f2(v) << "</text>\n";
  }
  s << "<text transform=\"translate(18," << kTop + h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << "overall error (%)</text>\n";
}

void legend(std::ostringstream& s, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 18.0 * static_cast<double>(i);
    s << "<rect x=\"" << kWidth - kRight + 15 << "\" y=\"" << y << "\" width=\"12\" height=\"12\" fill=\""
      << kPalette[i % 7] << "\"/>\n";
    s << "<text x=\"" << kWidth - kRight + 32 << "\" y=\"" << y + 10 << "\">" << names[i] << "</text>\n";
  }
}

}  // namespace

std::string svg_error_bars(std::span<const AggregateRow> rows) {
  std::vector<std::string> configs, series;
  double max_pct = 0.0;
  for (const auto& r : rows) {
    if (std::find(configs.begin(), configs.end(), r.sensor_config) == configs.end()) configs.push_back(r.sensor_config);
    if (std::find(series.begin(), series.end(), label_of(r)) == series.end()) series.push_back(label_of(r));
    max_pct = std::max(max_pct, 100.0 * (r.stats.overall.mean + r.stats.overall.sem));
  }
  const double ymax = y_limit(max_pct);
  const double w = kWidth - kLeft - kRight, h = kHeight - kTop - kBottom;
  std::ostringstream s;
  header(s, "Overall error by model and sensor setup (mean, SEM bars)");
  y_axis(s, ymax);
  const double group_w = configs.empty() ? w : w / static_cast<double>(configs.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(1, series.size()));
  for (std::size_t g = 0; g < configs.size(); ++g) {
    const double gx = kLeft + group_w * static_cast<double>(g) + group_w * 0.1;
    s << "<text x=\"" << f2(kLeft + group_w * (static_cast<double>(g) + 0.5)) << "\" y=\"" << kTop + h + 20
      << "\" text-anchor=\"middle\">" << configs[g] << "</text>\n";
    for (const auto& r : rows) {
      if (r.sensor_config != configs[g]) continue;
      const auto k = static_cast<std::size_t>(std::find(series.begin(), series.end(), label_of(r)) - series.begin());
      const double mean = 100.0 * r.stats.overall.mean, sem = 100.0 * r.stats.overall.sem;
      const double x = gx + bar_w * static_cast<double>(k);
      const double y = kTop + h - h * mean / ymax;
      s << "<rect x=\"" << f2(x) << "\" y=\"" << f2(y) << "\" width=\"" << f2(bar_w * 0.9) << "\" height=\""
        << f2(kTop + h - y) << "\" fill=\"" << kPalette[k % 7] << "\"/>\n";
      const double cx = x + bar_w * 0.45;
      const double y0 = kTop + h - h * (mean - sem) / ymax, y1 = kTop + h - h * (mean + sem) / ymax;
      s << "<line x1=\"" << f2(cx) << "\" y1=\"" << f2(y0) << "\" x2=\"" << f2(cx) << "\" y2=\"" << f2(y1)
        << "\" stroke=\"black\"/>\n";
    }
  }
  legend(s, series);
  s << "</svg>\n";
  return s.str();
}

std::string svg_transfer_curve(std::span<const AggregateRow> rows) {
  std::map<std::string, std::vector<const AggregateRow*>> lines;
  std::vector<std::string> order;
  double max_pct = 0.0;
  for (const auto& r : rows) {
    if (r.protocol != "transfer" || !r.tl_fraction) continue;
    if (!lines.count(r.sensor_config)) order.push_back(r.sensor_config);
    lines[r.sensor_config].push_back(&r);
    max_pct = std::max(max_pct, 100.0 * (r.stats.overall.mean + r.stats.overall.sem));
  }
  const double ymax = y_limit(max_pct);
  const double w = kWidth - kLeft - kRight, h = kHeight - kTop - kBottom;
  const auto px = [&](int fraction) { return kLeft + w * (fraction - 5) / 15.0; };
  const auto py = [&](double pct) { return kTop + h - h * pct / ymax; };
  std::ostringstream s;
  header(s, "Transfer error vs. fraction of held-out subject data (mean, SEM bars)");
  y_axis(s, ymax);
  for (int f : {5, 10, 15, 20}) {
    s << "<text x=\"" << f2(px(f)) << "\" y=\"" << kTop + h + 20 << "\" text-anchor=\"middle\">" << f
      << "%</text>\n";
  }
  if (order.empty()) {
    s << "<text x=\"" << kLeft + w / 2 << "\" y=\"" << kTop + h / 2
      << "\" text-anchor=\"middle\" fill=\"#888\">no transfer runs</text>\n";
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto pts = lines[order[i]];
    std::sort(pts.begin(), pts.end(),
              [](const AggregateRow* a, const AggregateRow* b) { return *a->tl_fraction < *b->tl_fraction; });
    s << "<polyline fill=\"none\" stroke=\"" << kPalette[i % 7] << "\" stroke-width=\"2\" points=\"";
    for (const auto* p : pts) s << f2(px(*p->tl_fraction)) << ',' << f2(py(100.0 * p->stats.overall.mean)) << ' ';
    s << "\"/>\n";
    for (const auto* p : pts) {
      const double x = px(*p->tl_fraction), m = 100.0 * p->stats.overall.mean, e = 100.0 * p->stats.overall.sem;
      s << "<circle cx=\"" << f2(x) << "\" cy=\"" << f2(py(m)) << "\" r=\"3\" fill=\"" << kPalette[i % 7] << "\"/>\n";
      s << "<line x1=\"" << f2(x) << "\" y1=\"" << f2(py(m - e)) << "\" x2=\"" << f2(x) << "\" y2=\"" << f2(py(m + e))
        << "\" stroke=\"" << kPalette[i % 7] << "\"/>\n";
    }
  }
  legend(s, order);
  s << "</svg>\n";
  return s.str();
}

}  // namespace gaitmind::cli
