#include "kpirl/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <stdexcept>

namespace kpirl {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* kClusterColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

}  // namespace

std::string svg_dendrogram(const Dendrogram& dendrogram,
                           const std::vector<std::string>& leaf_names,
                           const std::vector<int>& cut_assignment) {
  const int n = dendrogram.leaf_count;
  if (static_cast<int>(leaf_names.size()) != n || static_cast<int>(cut_assignment.size()) != n)
    throw std::invalid_argument("svg_dendrogram: name/assignment size mismatch");

  // Leaf order by recursive traversal so subtrees stay contiguous.
  std::vector<double> leaf_x(static_cast<std::size_t>(n), 0.0);
  std::vector<int> order;
  std::function<void(int)> walk = [&](int id) {
    if (id < n) {
      order.push_back(id);
      return;
    }
    const Merge& m = dendrogram.merges[static_cast<std::size_t>(id - n)];
    walk(m.cluster_a);
    walk(m.cluster_b);
  };
  int root = n == 1 ? 0 : 2 * n - 2;
  walk(root);

  const double dx = 28.0, left = 50.0, top = 30.0, plot_h = 360.0, label_h = 90.0;
  const double width = left * 2 + dx * std::max(1, n - 1);
  for (std::size_t i = 0; i < order.size(); ++i)
    leaf_x[static_cast<std::size_t>(order[i])] = left + dx * static_cast<double>(i);

  double max_h = 1e-12;
  for (const Merge& m : dendrogram.merges) max_h = std::max(max_h, m.height);
  auto ycoord = [&](double h) { return top + plot_h * (1.0 - h / max_h); };

  std::string body;
  std::vector<double> node_x(static_cast<std::size_t>(2 * n - 1), 0.0);
  std::vector<double> node_h(static_cast<std::size_t>(2 * n - 1), 0.0);
  for (int i = 0; i < n; ++i) node_x[static_cast<std::size_t>(i)] = leaf_x[static_cast<std::size_t>(i)];

  for (std::size_t s = 0; s < dendrogram.merges.size(); ++s) {
    const Merge& m = dendrogram.merges[s];
    double xa = node_x[static_cast<std::size_t>(m.cluster_a)];
    double xb = node_x[static_cast<std::size_t>(m.cluster_b)];
    double ha = node_h[static_cast<std::size_t>(m.cluster_a)];
    double hb = node_h[static_cast<std::size_t>(m.cluster_b)];
    double y = ycoord(m.height);
    body += "<path d=\"M " + num(xa) + ' ' + num(ycoord(ha)) + " L " + num(xa) + ' ' + num(y) +
            " L " + num(xb) + ' ' + num(y) + " L " + num(xb) + ' ' + num(ycoord(hb)) +
            "\" fill=\"none\" stroke=\"#555\" stroke-width=\"1.2\"/>\n";
    node_x[static_cast<std::size_t>(n + static_cast<int>(s))] = (xa + xb) / 2.0;
    node_h[static_cast<std::size_t>(n + static_cast<int>(s))] = m.height;
  }

  for (int i = 0; i < n; ++i) {
    const char* color =
        kClusterColors[static_cast<std::size_t>(cut_assignment[static_cast<std::size_t>(i)]) %
                       (sizeof kClusterColors / sizeof *kClusterColors)];
    body += "<text x=\"" + num(leaf_x[static_cast<std::size_t>(i)]) + "\" y=\"" +
            num(top + plot_h + 12.0) + "\" fill=\"" + color +
            "\" font-size=\"9\" text-anchor=\"end\" transform=\"rotate(-60 " +
            num(leaf_x[static_cast<std::size_t>(i)]) + ' ' + num(top + plot_h + 12.0) + ")\">" +
            leaf_names[static_cast<std::size_t>(i)] + "</text>\n";
  }

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                    "\" height=\"" + num(top + plot_h + label_h) + "\">\n<rect width=\"100%\" " +
                    "height=\"100%\" fill=\"white\"/>\n" + body + "</svg>\n";
  return out;
}

std::string svg_overlay(const std::vector<std::pair<double, double>>& expert,
                        const std::vector<std::pair<double, double>>& policy, double arena_width,
                        double arena_height) {
  const double scale = 600.0 / std::max(arena_width, arena_height);
  const double margin = 20.0;
  auto sx = [&](double x) { return margin + x * scale; };
  auto sy = [&](double y) { return margin + (arena_height - y) * scale; };

  auto track = [&](const std::vector<std::pair<double, double>>& pts, int r, int g, int b) {
    std::string s;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      // Dark early, light late.
      double t = n <= 2 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 2);
      int rr = static_cast<int>(r + (235 - r) * t);
      int gg = static_cast<int>(g + (235 - g) * t);
      int bb = static_cast<int>(b + (235 - b) * t);
      char color[16];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", rr, gg, bb);
      s += "<line x1=\"" + num(sx(pts[i].first)) + "\" y1=\"" + num(sy(pts[i].second)) +
           "\" x2=\"" + num(sx(pts[i + 1].first)) + "\" y2=\"" + num(sy(pts[i + 1].second)) +
           "\" stroke=\"" + color + "\" stroke-width=\"2.5\"/>\n";
    }
    return s;
  };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    num(arena_width * scale + 2 * margin) + "\" height=\"" +
                    num(arena_height * scale + 2 * margin) + "\">\n<rect width=\"100%\" " +
                    "height=\"100%\" fill=\"white\"/>\n<rect x=\"" + num(margin) + "\" y=\"" +
                    num(margin) + "\" width=\"" + num(arena_width * scale) + "\" height=\"" +
                    num(arena_height * scale) +
                    "\" fill=\"none\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  out += track(expert, 16, 64, 160);   // expert: blue
  out += track(policy, 200, 96, 10);   // learned policy: orange
  out += "</svg>\n";
  return out;
}

}  // namespace kpirl
