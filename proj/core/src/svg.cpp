#include "hyperwind/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "hyperwind/io.hpp"
#include "hyperwind/pipeline.hpp"

namespace hyperwind {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string tick(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::line(std::vector<double> x, std::vector<double> y, std::string color, bool dashed) {
  series_.push_back({Series::Kind::line, std::move(x), std::move(y), std::move(color), dashed});
}

void SvgPlot::points(std::vector<double> x, std::vector<double> y, std::string color) {
  series_.push_back({Series::Kind::points, std::move(x), std::move(y), std::move(color)});
}

void SvgPlot::bars(std::vector<double> edges, std::vector<double> heights, std::string color) {
  series_.push_back({Series::Kind::bars, std::move(edges), std::move(heights), std::move(color)});
}

void SvgPlot::horizontal(double y, std::string color) { rules_.emplace_back(y, std::move(color)); }

std::string SvgPlot::render(int width, int height) const {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series_) {
    for (double v : s.x) {
      x0 = std::min(x0, v);
      x1 = std::max(x1, v);
    }
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
    if (s.kind == Series::Kind::bars) y0 = std::min(y0, 0.0);
  }
  for (const auto& r : rules_) {
    y0 = std::min(y0, r.first);
    y1 = std::max(y1, r.first);
  }
  if (!(x1 > x0)) {
    x0 -= 1.0;
    x1 += 1.0;
  }
  if (!(y1 > y0)) {
    y0 -= 1.0;
    y1 += 1.0;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double left = 70, right = width - 20.0, top = 40, bottom = height - 50.0;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (right - left); };
  auto py = [&](double y) { return bottom - (y - y0) / (y1 - y0) * (bottom - top); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title_)
    << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\"" << bottom
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    o << "<text x=\"" << px(xv) << "\" y=\"" << bottom + 16 << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
  }
  o << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
    << escape(x_label_) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (top + bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (top + bottom) / 2 << ")\">" << escape(y_label_) << "</text>\n";
  for (const auto& [y, color] : rules_)
    o << "<line x1=\"" << left << "\" y1=\"" << py(y) << "\" x2=\"" << right << "\" y2=\"" << py(y) << "\" stroke=\""
      << color << "\" stroke-dasharray=\"4 3\"/>\n";
  for (const auto& s : series_) {
    switch (s.kind) {
      case Series::Kind::line: {
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.3\"";
        if (s.dashed) o << " stroke-dasharray=\"5 3\"";
        o << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
          if (std::isfinite(s.y[i])) o << px(s.x[i]) << "," << py(s.y[i]) << " ";
        o << "\"/>\n";
        break;
      }
      case Series::Kind::points:
        for (std::size_t i = 0; i < s.x.size(); ++i)
          if (std::isfinite(s.y[i]))
            o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << s.color
              << "\"/>\n";
        break;
      case Series::Kind::bars:
        for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
          const double h = s.y[i];
          o << "<rect x=\"" << px(s.x[i]) << "\" y=\"" << py(h) << "\" width=\"" << px(s.x[i + 1]) - px(s.x[i])
            << "\" height=\"" << py(0.0) - py(h) << "\" fill=\"" << s.color << "\" fill-opacity=\"0.45\"/>\n";
        }
        break;
    }
  }
  o << "</svg>\n";
  return o.str();
}

void write_report_plots(const RunConfig& config, const Dataset& data, const Estimates& e,
                        const std::vector<TestReport>& reports, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (!data.paths.empty() && !data.paths.front().steps.empty()) {
    SvgPlot p("winding trajectories, first coordinate", "step", "pi(w_k)_1");
    const std::size_t shown = std::min<std::size_t>(8, data.paths.size());
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& path = data.paths[i];
      std::vector<double> x, y;
      for (std::size_t c = 0; c < path.steps.size(); ++c) {
        x.push_back(static_cast<double>(path.steps[c]));
        y.push_back(static_cast<double>(path.winding_at(c)[0]));
      }
      p.line(x, y, kPalette[i % 8]);
    }
    write_text(dir / "winding_trajectories.svg", p.render());
  }

  const std::size_t d = data.paths.empty() ? 0 : data.paths.front().dim;
  if (!e.covariance.empty() && config.estimate.ray_time > 0.0 && !data.paths.empty()) {
    const auto& times = data.paths.front().ray_times;
    const auto it = std::find(times.begin(), times.end(), config.estimate.ray_time);
    Eigen::Map<const Eigen::MatrixXd> a(e.covariance.data(), static_cast<Eigen::Index>(d),
                                        static_cast<Eigen::Index>(d));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (it != times.end() && solver.eigenvalues().minCoeff() > 1e-12) {
      const auto ti = static_cast<std::size_t>(it - times.begin());
      const double t = *it;
      const auto s = inverse_sqrt(e.covariance, d);
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> z;
        for (const auto& path : data.paths) {
          const auto w = path.ray_winding_at(ti);
          double v = 0.0;
          for (std::size_t k = 0; k < d; ++k)
            v += s[j * d + k] * (static_cast<double>(w[k]) + lattice_jitter(data.master_seed, path.index, k) -
                                 t * e.e[k]) / std::sqrt(t);
          z.push_back(v);
        }
        const int bins = 40;
        std::vector<double> edges, heights(bins, 0.0), cx, cy;
        for (int b = 0; b <= bins; ++b) edges.push_back(-4.0 + 8.0 * b / bins);
        for (double v : z) {
          const int b = static_cast<int>(std::floor((v + 4.0) / 8.0 * bins));
          if (b >= 0 && b < bins) heights[static_cast<std::size_t>(b)] += 1.0;
        }
        for (auto& h : heights) h /= static_cast<double>(z.size()) * (8.0 / bins);
        for (int i = 0; i <= 200; ++i) {
          const double x = -4.0 + 8.0 * i / 200.0;
          cx.push_back(x);
          cy.push_back(std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI));
        }
        SvgPlot p("whitened winding, marginal " + std::to_string(j + 1) + ", t = " + format_double(t), "z",
                  "density");
        p.bars(edges, heights, kPalette[0]);
        p.line(cx, cy, kPalette[1]);
        write_text(dir / ("clt_marginal_" + std::to_string(j + 1) + ".svg"), p.render());
      }
    }
  }

  for (const auto& r : reports) {
    if (r.name == "pld") {
      const auto* t = r.detail("times");
      const auto* p = r.detail("tail_probability");
      const auto* f = r.detail("fit");
      if (!t || !p) continue;
      SvgPlot plot("tail probability, alpha = " + format_double(config.tolerances.pld.alpha_dev), "t", "log p");
      std::vector<double> x, y;
      for (std::size_t i = 0; i < t->size(); ++i)
        if ((*p)[i] > 0.0) {
          x.push_back((*t)[i]);
          y.push_back(std::log((*p)[i]));
        }
      plot.points(x, y, kPalette[0]);
      if (f && !x.empty())
        plot.line({x.front(), x.back()}, {(*f)[1] + (*f)[0] * x.front(), (*f)[1] + (*f)[0] * x.back()}, kPalette[1]);
      write_text(dir / "pld_tail_fit.svg", plot.render());
    }
  }

  std::vector<const TestReport*> gr;
  for (const auto& r : reports)
    if (r.name.rfind("gr:", 0) == 0) gr.push_back(&r);
  if (!gr.empty()) {
    SvgPlot plot("upper-exit frequency against s", "s", "P(exit through the top)");
    for (std::size_t i = 0; i < gr.size(); ++i) {
      const auto* s = gr[i]->detail("s");
      const auto* f = gr[i]->detail("upper_frequency");
      const auto* k = gr[i]->detail("k_l_target");
      if (!s || !f || !k) continue;
      plot.line(*s, *f, kPalette[i % 8]);
      plot.points(*s, *f, kPalette[i % 8]);
      plot.horizontal((*k)[2], kPalette[i % 8]);
    }
    write_text(dir / "exit_probability.svg", plot.render());
  }

  for (const auto& r : reports) {
    if (r.name != "tracking:tail" || data.paths.empty()) continue;
    SvgPlot plot("tracking distance at tau_s, empirical tail", "distance", "log P(X >= v)");
    const auto& stops = data.paths.front().stopping;
    for (std::size_t i = 0; i < stops.size(); ++i) {
      std::vector<double> v;
      for (const auto& p : data.paths)
        if (p.stopping[i].tracking != kCensored) v.push_back(static_cast<double>(p.stopping[i].tracking));
      if (v.empty()) continue;
      std::sort(v.begin(), v.end());
      std::vector<double> x, y;
      for (std::size_t j = 0; j < v.size(); ++j)
        if (j == 0 || v[j] != v[j - 1]) {
          x.push_back(v[j]);
          y.push_back(std::log(static_cast<double>(v.size() - j) / static_cast<double>(v.size())));
        }
      plot.line(x, y, kPalette[i % 8]);
    }
    write_text(dir / "tracking_tail.svg", plot.render());
  }
}

}  // namespace hyperwind
