#pragma once

// Minimal static SVG charts for run reports.

#include <filesystem>
#include <string>
#include <vector>

#include "hyperwind/config.hpp"
#include "hyperwind/dataset.hpp"
#include "hyperwind/stats.hpp"

namespace hyperwind {

struct Estimates;

class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void line(std::vector<double> x, std::vector<double> y, std::string color, bool dashed = false);
  void points(std::vector<double> x, std::vector<double> y, std::string color);
  /// Bars over consecutive edges; heights.size() == edges.size() - 1.
  void bars(std::vector<double> edges, std::vector<double> heights, std::string color);
  void horizontal(double y, std::string color);

  std::string render(int width = 640, int height = 400) const;

 private:
  struct Series {
    enum class Kind { line, points, bars } kind;
    std::vector<double> x, y;
    std::string color;
    bool dashed = false;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<std::pair<double, std::string>> rules_;
};

/// Winding trajectories, whitened CLT histograms against the normal density,
/// tail-fit lines and exit frequencies against s, as far as the run has them.
void write_report_plots(const RunConfig& config, const Dataset& data, const Estimates& estimates,
                        const std::vector<TestReport>& reports, const std::filesystem::path& dir);

}  // namespace hyperwind
