#include "dynmap/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace dynmap {

namespace {

constexpr double kMargin = 48.0;
constexpr const char* kDefaultColor = "#1f4e79";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Maps data coordinates to the canvas with a shared scale on both axes.
struct Frame {
  double min_x = 0, max_x = 1, min_y = 0, max_y = 1;
  double scale = 1, off_x = 0, off_y = 0;
  bool one_d = false;
  double height = 0;

  double px(double v) const { return off_x + (v - min_x) * scale; }
  double py(double v) const { return one_d ? height / 2.0 : off_y - (v - min_y) * scale; }
};

Frame make_frame(const ConfigurationSequence& x, const InclusionMask* mask, std::size_t first, std::size_t last,
                 const PlotOptions& o) {
  Frame f;
  f.one_d = x.dims() == 1;
  f.height = o.height;
  bool any = false;
  for (std::size_t t = first; t < last; ++t) {
    for (Index i = 0; i < x.objects(); ++i) {
      if (!is_included(mask, t, i)) continue;
      const double vx = x.coords[t](i, 0);
      const double vy = f.one_d ? 0.0 : x.coords[t](i, 1);
      if (!any) {
        f.min_x = f.max_x = vx;
        f.min_y = f.max_y = vy;
        any = true;
      }
      f.min_x = std::min(f.min_x, vx);
      f.max_x = std::max(f.max_x, vx);
      f.min_y = std::min(f.min_y, vy);
      f.max_y = std::max(f.max_y, vy);
    }
  }
  const double span_x = std::max(f.max_x - f.min_x, 1e-12);
  const double span_y = std::max(f.max_y - f.min_y, 1e-12);
  const double avail_x = o.width - 2 * kMargin;
  const double avail_y = o.height - 2 * kMargin;
  f.scale = f.one_d ? avail_x / span_x : std::min(avail_x / span_x, avail_y / span_y);
  if (f.max_x - f.min_x <= 1e-12 && (f.one_d || f.max_y - f.min_y <= 1e-12)) f.scale = 1.0;
  f.off_x = kMargin + (avail_x - (f.max_x - f.min_x) * f.scale) / 2.0;
  f.off_y = o.height - kMargin - (avail_y - (f.max_y - f.min_y) * f.scale) / 2.0;
  return f;
}

std::string color_of(const PlotOptions& o, Index i) {
  return o.colors.empty() ? kDefaultColor : o.colors[static_cast<std::size_t>(i)];
}

double size_of(const PlotOptions& o, Index i) { return o.sizes.empty() ? 4.0 : o.sizes[static_cast<std::size_t>(i)]; }

void point(std::ostringstream& s, const Frame& f, const PlotOptions& o, const Matrix& x, Index i,
           const std::string& label, double opacity, bool with_label) {
  const double cx = f.px(x(i, 0));
  const double cy = f.py(f.one_d ? 0.0 : x(i, 1));
  s << "  <circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(size_of(o, i)) << "\" fill=\""
    << escape(color_of(o, i)) << "\" fill-opacity=\"" << num(opacity) << "\"/>\n";
  if (with_label) {
    s << "  <text x=\"" << num(cx + size_of(o, i) + 2) << "\" y=\"" << num(cy - size_of(o, i) - 2)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill-opacity=\"" << num(opacity) << "\">" << escape(label)
      << "</text>\n";
  }
}

}  // namespace

PlotMode parse_plot_mode(const std::string& s) {
  if (s == "static") return PlotMode::static_map;
  if (s == "dynamic") return PlotMode::dynamic_map;
  if (s == "trajectories") return PlotMode::trajectories;
  fail(ErrorKind::config, "unknown plot mode '" + s + "'");
}

std::string render_svg(const ConfigurationSequence& x, const std::vector<std::string>& labels,
                       const std::vector<std::string>& periods, const PlotOptions& o, const InclusionMask* mask) {
  x.validate();
  const std::size_t periods_n = x.periods_count();
  const Index n = x.objects();
  if (labels.size() != static_cast<std::size_t>(n)) fail(ErrorKind::data, "plot: label count does not match");
  if (periods.size() != periods_n) fail(ErrorKind::data, "plot: period count does not match");
  if (!o.colors.empty() && o.colors.size() != labels.size()) fail(ErrorKind::data, "plot: one color per label");
  if (!o.sizes.empty() && o.sizes.size() != labels.size()) fail(ErrorKind::data, "plot: one size per label");
  if (mask != nullptr) mask->validate(periods_n, n);
  if (o.width <= 2 * kMargin || o.height <= 2 * kMargin) fail(ErrorKind::config, "plot: canvas too small");

  std::size_t first = 0;
  std::size_t last = periods_n;
  if (o.mode == PlotMode::static_map) {
    if (o.period >= periods_n) fail(ErrorKind::config, "plot: period index out of range");
    first = o.period;
    last = o.period + 1;
  }
  const Frame f = make_frame(x, mask, first, last, o);

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height
    << "\" viewBox=\"0 0 " << o.width << ' ' << o.height << "\">\n";
  s << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (o.show_arrows) {
    s << "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
         "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#555\"/></marker></defs>\n";
  }
  if (!o.title.empty()) {
    s << "  <text class=\"title\" x=\"" << num(o.width / 2.0)
      << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape(o.title)
      << "</text>\n";
  }
  if (f.one_d) {
    s << "  <line x1=\"" << num(kMargin) << "\" y1=\"" << num(o.height / 2.0) << "\" x2=\"" << num(o.width - kMargin)
      << "\" y2=\"" << num(o.height / 2.0) << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  }

  switch (o.mode) {
    case PlotMode::static_map:
      for (Index i = 0; i < n; ++i) {
        if (is_included(mask, first, i)) point(s, f, o, x.coords[first], i, labels[static_cast<std::size_t>(i)], 1.0, o.show_labels);
      }
      break;
    case PlotMode::dynamic_map:
      for (std::size_t t = 0; t < periods_n; ++t) {
        const double frac = periods_n > 1 ? static_cast<double>(t) / static_cast<double>(periods_n - 1) : 1.0;
        const double opacity = o.transparency_start + frac * (o.transparency_end - o.transparency_start);
        s << "  <g class=\"period\" data-period=\"" << escape(periods[t]) << "\">\n";
        for (Index i = 0; i < n; ++i) {
          if (!is_included(mask, t, i)) continue;
          if (o.show_arrows && t > 0 && is_included(mask, t - 1, i)) {
            const Matrix& a = x.coords[t - 1];
            const Matrix& b = x.coords[t];
            s << "  <line x1=\"" << num(f.px(a(i, 0))) << "\" y1=\"" << num(f.py(f.one_d ? 0 : a(i, 1))) << "\" x2=\""
              << num(f.px(b(i, 0))) << "\" y2=\"" << num(f.py(f.one_d ? 0 : b(i, 1)))
              << "\" stroke=\"#555\" stroke-width=\"1\" marker-end=\"url(#arrow)\"/>\n";
          }
          point(s, f, o, x.coords[t], i, labels[static_cast<std::size_t>(i)], opacity, o.show_labels);
        }
        s << "  </g>\n";
      }
      break;
    case PlotMode::trajectories:
      for (Index i = 0; i < n; ++i) {
        std::vector<std::size_t> present;
        for (std::size_t t = 0; t < periods_n; ++t) {
          if (is_included(mask, t, i)) present.push_back(t);
        }
        if (present.empty()) continue;
        if (present.size() > 1) {
          s << "  <polyline fill=\"none\" stroke=\"" << escape(color_of(o, i)) << "\" stroke-width=\"1.5\" points=\"";
          for (std::size_t k = 0; k < present.size(); ++k) {
            const Matrix& m = x.coords[present[k]];
            s << (k ? " " : "") << num(f.px(m(i, 0))) << ',' << num(f.py(f.one_d ? 0 : m(i, 1)));
          }
          s << "\"/>\n";
          for (std::size_t k = 0; k + 1 < present.size(); ++k) {
            const Matrix& m = x.coords[present[k]];
            s << "  <text class=\"tick\" x=\"" << num(f.px(m(i, 0))) << "\" y=\"" << num(f.py(f.one_d ? 0 : m(i, 1)) + 10)
              << "\" font-family=\"sans-serif\" font-size=\"8\" fill=\"#777\">" << escape(periods[present[k]])
              << "</text>\n";
          }
        }
        point(s, f, o, x.coords[present.back()], i, labels[static_cast<std::size_t>(i)], 1.0, o.show_labels);
      }
      break;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace dynmap
