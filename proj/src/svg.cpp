#include "credsel/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace credsel::svg {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kMargin = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

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

void header(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";
}

}  // namespace

std::string line_plot(const PlotSpec& spec, const std::vector<Series>& series) {
  double x_lo = spec.x_lo, x_hi = spec.x_hi, y_lo = spec.y_lo, y_hi = spec.y_hi;
  if (x_lo == x_hi || y_lo == y_hi) {
    double a = HUGE_VAL, b = -HUGE_VAL, c = HUGE_VAL, d = -HUGE_VAL;
    for (const auto& s : series) {
      for (const auto& [x, y] : s.points) {
        a = std::min(a, x); b = std::max(b, x);
        c = std::min(c, y); d = std::max(d, y);
      }
    }
    if (x_lo == x_hi) { x_lo = a; x_hi = b; }
    if (y_lo == y_hi) { y_lo = c; y_hi = d; }
    if (!(x_hi > x_lo)) { x_lo -= 0.5; x_hi += 0.5; }
    if (!(y_hi > y_lo)) { y_lo -= 0.5; y_hi += 0.5; }
  }
  const double pw = kWidth - 2 * kMargin;
  const double ph = kHeight - 2 * kMargin;
  auto sx = [&](double x) { return kMargin + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return kHeight - kMargin - (y - y_lo) / (y_hi - y_lo) * ph; };

  std::ostringstream os;
  os.precision(6);
  header(os, spec.title);
  os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << pw << "\" height=\""
     << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x_lo + (x_hi - x_lo) * t / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * t / 4.0;
    os << "<text x=\"" << sx(fx) << "\" y=\"" << kHeight - kMargin + 16
       << "\" text-anchor=\"middle\">" << fx << "</text>\n";
    os << "<text x=\"" << kMargin - 6 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">" << fy
       << "</text>\n";
  }
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
     << escape(spec.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 16 " << kHeight / 2
     << ")\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    if (s.markers) {
      for (const auto& [x, y] : s.points) {
        os << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"2.5\" fill=\"" << color
           << "\" fill-opacity=\"0.6\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : s.points) os << sx(x) << ',' << sy(y) << ' ';
      os << "\"/>\n";
    }
    os << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin + 16 + 16 * k << "\" fill=\""
       << color << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values) {
  std::ostringstream os;
  os.precision(6);
  header(os, title);
  const double top = values.empty() ? 1.0 : *std::max_element(values.begin(), values.end());
  const double row_h = (kHeight - 2 * kMargin) / std::max<std::size_t>(1, values.size());
  const double label_w = 200;
  const double bar_w = kWidth - kMargin - label_w - 20;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = kMargin + i * row_h;
    const double w = top > 0 ? values[i] / top * bar_w : 0.0;
    os << "<text x=\"" << label_w - 6 << "\" y=\"" << y + row_h * 0.65
       << "\" text-anchor=\"end\">" << escape(labels[i]) << "</text>\n";
    os << "<rect x=\"" << label_w << "\" y=\"" << y + row_h * 0.15 << "\" width=\"" << w
       << "\" height=\"" << row_h * 0.7 << "\" fill=\"" << kPalette[0] << "\"/>\n";
    os << "<text x=\"" << label_w + w + 4 << "\" y=\"" << y + row_h * 0.65 << "\">" << values[i]
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace credsel::svg
