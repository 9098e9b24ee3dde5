#include "topicdrift/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "topicdrift/error.hpp"

namespace topicdrift::svg {

namespace {

constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Frame {
  double width, height, left = 60, right = 20, top = 40, bottom = 50;
  double lo = 0.0, hi = 1.0;

  double y(double v) const {
    const double span = hi > lo ? hi - lo : 1.0;
    return top + (height - top - bottom) * (1.0 - (v - lo) / span);
  }
};

std::string header(double w, double h, const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + ' ' + num(h) + "\" font-family=\"sans-serif\" font-size=\"11\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + "<text x=\"" + num(w / 2) +
         "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
}

std::string y_axis(const Frame& f) {
  std::string out = "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.left) +
                    "\" y2=\"" + num(f.height - f.bottom) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = f.lo + (f.hi - f.lo) * i / 4.0;
    out += "<text x=\"" + num(f.left - 5) + "\" y=\"" + num(f.y(v) + 4) + "\" text-anchor=\"end\">" +
           label_num(v) + "</text>\n";
  }
  return out;
}

void legend(std::string& out, const std::vector<std::string>& names, double x) {
  for (std::size_t s = 0; s < names.size(); ++s) {
    const double y = 40 + 16.0 * static_cast<double>(s);
    out += "<rect x=\"" + num(x) + "\" y=\"" + num(y - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
           kPalette[s % std::size(kPalette)] + "\"/>\n";
    out += "<text x=\"" + num(x + 14) + "\" y=\"" + num(y) + "\">" + escape(names[s]) + "</text>\n";
  }
}

}  // namespace

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw ValidationError("box plot needs at least one value");
  std::sort(values.begin(), values.end());
  BoxStats b;
  b.q1 = quantile(values, 0.25);
  b.median = quantile(values, 0.5);
  b.q3 = quantile(values, 0.75);
  const double reach = 1.5 * (b.q3 - b.q1);
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  for (double v : values) {
    if (v < b.q1 - reach || v > b.q3 + reach) {
      b.outliers.push_back(v);
    } else {
      b.whisker_low = std::min(b.whisker_low, v);
      b.whisker_high = std::max(b.whisker_high, v);
    }
  }
  return b;
}

std::string box_plot(const std::string& title, const std::vector<std::string>& categories,
                     const std::vector<std::string>& series,
                     const std::vector<std::vector<std::vector<double>>>& values) {
  if (values.size() != categories.size()) throw ValidationError("box plot: category count mismatch");
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& cat : values) {
    if (cat.size() != series.size()) throw ValidationError("box plot: series count mismatch");
    for (const auto& sample : cat)
      for (double v : sample) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  const double slot = 30.0 * static_cast<double>(std::max<std::size_t>(series.size(), 1)) + 20.0;
  Frame f{60 + slot * static_cast<double>(categories.size()) + 120, 400};
  f.lo = lo;
  f.hi = hi;
  std::string out = header(f.width, f.height, title) + y_axis(f);
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double x0 = f.left + 10 + slot * static_cast<double>(c);
    out += "<text x=\"" + num(x0 + slot / 2 - 10) + "\" y=\"" + num(f.height - f.bottom + 18) +
           "\" text-anchor=\"middle\">" + escape(categories[c]) + "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (values[c][s].empty()) continue;
      const auto b = box_stats(values[c][s]);
      const double x = x0 + 30.0 * static_cast<double>(s);
      const double mid = x + 10;
      const char* color = kPalette[s % std::size(kPalette)];
      out += "<line x1=\"" + num(mid) + "\" y1=\"" + num(f.y(b.whisker_low)) + "\" x2=\"" + num(mid) + "\" y2=\"" +
             num(f.y(b.whisker_high)) + "\" stroke=\"" + color + "\"/>\n";
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(f.y(b.q3)) + "\" width=\"20\" height=\"" +
             num(std::max(f.y(b.q1) - f.y(b.q3), 0.5)) + "\" fill=\"" + color + "\" fill-opacity=\"0.35\" stroke=\"" +
             color + "\"/>\n";
      out += "<line x1=\"" + num(x) + "\" y1=\"" + num(f.y(b.median)) + "\" x2=\"" + num(x + 20) + "\" y2=\"" +
             num(f.y(b.median)) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
      for (double o : b.outliers)
        out += "<circle cx=\"" + num(mid) + "\" cy=\"" + num(f.y(o)) + "\" r=\"2\" fill=\"none\" stroke=\"" + color +
               "\"/>\n";
    }
  }
  legend(out, series, f.width - 110);
  return out + "</svg>\n";
}

std::string scatter(const std::string& title, const Eigen::MatrixXd& points, const std::vector<std::string>& labels) {
  if (points.cols() < 2) throw ValidationError("scatter plot needs two columns");
  if (static_cast<std::size_t>(points.rows()) != labels.size()) throw ValidationError("scatter: label count mismatch");
  std::map<std::string, std::size_t> colour_of;
  std::vector<std::string> names;
  for (const auto& l : labels)
    if (colour_of.emplace(l, colour_of.size()).second) names.push_back(l);
  const double xlo = points.rows() ? points.col(0).minCoeff() : 0.0;
  const double xhi = points.rows() ? points.col(0).maxCoeff() : 1.0;
  Frame f{560, 440};
  f.lo = points.rows() ? points.col(1).minCoeff() : 0.0;
  f.hi = points.rows() ? points.col(1).maxCoeff() : 1.0;
  const double plot_right = f.width - 120;
  auto x_of = [&](double v) { return f.left + (plot_right - f.left) * (xhi > xlo ? (v - xlo) / (xhi - xlo) : 0.5); };
  std::string out = header(f.width, f.height, title) + y_axis(f);
  out += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.height - f.bottom) + "\" x2=\"" + num(plot_right) +
         "\" y2=\"" + num(f.height - f.bottom) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = xlo + (xhi - xlo) * i / 4.0;
    out += "<text x=\"" + num(x_of(v)) + "\" y=\"" + num(f.height - f.bottom + 16) + "\" text-anchor=\"middle\">" +
           label_num(v) + "</text>\n";
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out += "<circle cx=\"" + num(x_of(points(i, 0))) + "\" cy=\"" + num(f.y(points(i, 1))) + "\" r=\"2.5\" fill=\"" +
           kPalette[colour_of[labels[static_cast<std::size_t>(i)]] % std::size(kPalette)] +
           "\" fill-opacity=\"0.7\"/>\n";
  }
  legend(out, names, plot_right + 10);
  return out + "</svg>\n";
}

}  // namespace topicdrift::svg
