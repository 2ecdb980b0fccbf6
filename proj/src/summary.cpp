#include "fdpo/summary.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fdpo {

namespace {

double z_value(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("summarize: confidence must lie in (0, 1)");
  if (confidence == 0.95) return 1.96;
  return boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * confidence);
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<SummaryCell> summarize(const std::vector<ResultRow>& rows, double confidence, Metric metric) {
  const double z = z_value(confidence);
  std::vector<std::string> order;
  std::map<std::string, std::map<double, std::vector<double>>> cells;
  for (const auto& r : rows) {
    if (!cells.count(r.algorithm)) order.push_back(r.algorithm);
    cells[r.algorithm][r.sweep_value].push_back(metric == Metric::suboptimality ? r.suboptimality : r.mean_return);
  }
  std::vector<SummaryCell> out;
  for (const auto& name : order) {
    for (const auto& [x, values] : cells[name]) {
      if (values.size() < 2) {
        throw std::invalid_argument("summarize: fewer than 2 rows for algorithm " + name + " at " + tick_label(x));
      }
      const double n = static_cast<double>(values.size());
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= n;
      out.push_back({name, x, values.size(), mean, z * std::sqrt(var) / std::sqrt(n)});
    }
  }
  return out;
}

std::string render_plot_svg(const std::vector<SummaryCell>& summary, const PlotOptions& options) {
  if (summary.empty()) throw std::invalid_argument("emit_plot: summary is empty");
  constexpr double width = 720, height = 480, left = 80, right = 160, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  const auto to_x = [&](double v) {
    if (options.log_x) {
      if (!(v > 0.0)) throw std::invalid_argument("emit_plot: log axis needs positive sweep values");
      return std::log10(v);
    }
    return v;
  };
  double x_lo = to_x(summary.front().sweep_value), x_hi = x_lo;
  double y_lo = summary.front().mean - summary.front().half_width, y_hi = summary.front().mean + summary.front().half_width;
  for (const auto& c : summary) {
    x_lo = std::min(x_lo, to_x(c.sweep_value));
    x_hi = std::max(x_hi, to_x(c.sweep_value));
    y_lo = std::min(y_lo, c.mean - c.half_width);
    y_hi = std::max(y_hi, c.mean + c.half_width);
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;
  const auto px = [&](double v) { return left + (to_x(v) - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * plot_h; };

  std::vector<std::string> names;
  for (const auto& c : summary) {
    if (std::find(names.begin(), names.end(), c.algorithm) == names.end()) names.push_back(c.algorithm);
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(options.title) << "</text>\n";
  }
  svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + plot_h) << "\" x2=\"" << fmt(left + plot_w)
      << "\" y2=\"" << fmt(top + plot_h) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\""
      << fmt(top + plot_h) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = i / 4.0;
    const double xv = x_lo + t * (x_hi - x_lo);
    const double yv = y_lo + t * (y_hi - y_lo);
    const double xpix = left + t * plot_w;
    const double ypix = top + (1.0 - t) * plot_h;
    svg << "<text x=\"" << fmt(xpix) << "\" y=\"" << fmt(top + plot_h + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(options.log_x ? std::pow(10.0, xv) : xv)
        << "</text>\n";
    svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(ypix + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
        << tick_label(yv) << "</text>\n";
  }
  svg << "<text class=\"x-label\" x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(height - 16)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(options.x_label) << "</text>\n";
  svg << "<text class=\"y-label\" x=\"18\" y=\"" << fmt(top + plot_h / 2) << "\" text-anchor=\"middle\" font-size=\"13\""
      << " transform=\"rotate(-90 18 " << fmt(top + plot_h / 2) << ")\">" << escape(options.y_label) << "</text>\n";

  for (std::size_t k = 0; k < names.size(); ++k) {
    const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
    std::vector<const SummaryCell*> cells;
    for (const auto& c : summary) {
      if (c.algorithm == names[k]) cells.push_back(&c);
    }
    std::sort(cells.begin(), cells.end(),
              [](const SummaryCell* a, const SummaryCell* b) { return a->sweep_value < b->sweep_value; });
    std::string band, line;
    for (const auto* c : cells) band += fmt(px(c->sweep_value)) + "," + fmt(py(c->mean + c->half_width)) + " ";
    for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
      band += fmt(px((*it)->sweep_value)) + "," + fmt(py((*it)->mean - (*it)->half_width)) + " ";
    }
    for (const auto* c : cells) line += fmt(px(c->sweep_value)) + "," + fmt(py(c->mean)) + " ";
    band.pop_back();
    line.pop_back();
    svg << "<polygon class=\"band\" points=\"" << band << "\" fill=\"" << color
        << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg << "<polyline class=\"series\" points=\"" << line << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    const double ly = top + 16 + 20.0 * static_cast<double>(k);
    svg << "<line x1=\"" << fmt(left + plot_w + 16) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(left + plot_w + 40)
        << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(left + plot_w + 46) << "\" y=\"" << fmt(ly + 4) << "\" font-size=\"12\">"
        << escape(names[k]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<SummaryCell>& summary, const std::filesystem::path& path,
               const PlotOptions& options) {
  const std::string svg = render_plot_svg(summary, options);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_plot: cannot open " + path.string());
  out << svg;
  if (!out) throw std::runtime_error("emit_plot: write failed for " + path.string());
}

}  // namespace fdpo
