// svg.hpp — self-contained SVG line/scatter plots, written directly as text
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "nsac/common.hpp"

namespace nsac {

class SvgPlot {
  public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool loglog = false)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
          loglog_(loglog) {}

    void add_line(const std::vector<double>& x, const std::vector<double>& y, std::string color,
                  std::string label) {
        series_.push_back({x, y, std::move(color), std::move(label), false});
    }
    void add_markers(const std::vector<double>& x, const std::vector<double>& y, std::string color,
                     std::string label) {
        series_.push_back({x, y, std::move(color), std::move(label), true});
    }

    void write(const std::string& path) const {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& s : series_)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double px = tx(s.x[i]), py = tx(s.y[i]);
                if (!std::isfinite(px) || !std::isfinite(py)) continue;
                xmin = std::min(xmin, px);
                xmax = std::max(xmax, px);
                ymin = std::min(ymin, py);
                ymax = std::max(ymax, py);
            }
        if (xmin > xmax) {
            xmin = 0;
            xmax = 1;
        }
        if (ymin > ymax) {
            ymin = 0;
            ymax = 1;
        }
        if (xmax - xmin < 1e-12) {
            xmin -= 0.5;
            xmax += 0.5;
        }
        if (ymax - ymin < 1e-12) {
            ymin -= 0.5;
            ymax += 0.5;
        }
        const double W = 720, H = 480, L = 80, R = 24, T = 40, B = 56;
        auto X = [&](double v) { return L + (tx(v) - xmin) / (xmax - xmin) * (W - L - R); };
        auto Y = [&](double v) { return H - B - (tx(v) - ymin) / (ymax - ymin) * (H - T - B); };

        std::ofstream out(path);
        if (!out) throw config_error("SvgPlot: cannot open " + path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
            << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
            << title_ << "</text>\n";
        // axes box
        out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
            << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
        // ticks
        for (int k = 0; k <= 4; ++k) {
            const double fx = xmin + (xmax - xmin) * k / 4.0;
            const double fy = ymin + (ymax - ymin) * k / 4.0;
            const double px = L + (W - L - R) * k / 4.0;
            const double py = H - B - (H - T - B) * k / 4.0;
            out << "<line x1=\"" << px << "\" y1=\"" << H - B << "\" x2=\"" << px << "\" y2=\""
                << H - B + 5 << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << px << "\" y=\"" << H - B + 20
                << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(fx) << "</text>\n";
            out << "<line x1=\"" << L - 5 << "\" y1=\"" << py << "\" x2=\"" << L << "\" y2=\"" << py
                << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << L - 8 << "\" y=\"" << py + 4
                << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(fy) << "</text>\n";
        }
        out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
            << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel_ << "</text>\n";
        out << "<text x=\"18\" y=\"" << H / 2
            << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " << H / 2
            << ")\">" << ylabel_ << "</text>\n";
        // series
        int legend_row = 0;
        for (const auto& s : series_) {
            if (s.markers) {
                for (std::size_t i = 0; i < s.x.size(); ++i) {
                    if (!std::isfinite(tx(s.x[i])) || !std::isfinite(tx(s.y[i]))) continue;
                    out << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i])
                        << "\" r=\"4\" fill=\"" << s.color << "\"/>\n";
                }
            } else {
                out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
                for (std::size_t i = 0; i < s.x.size(); ++i) {
                    if (!std::isfinite(tx(s.x[i])) || !std::isfinite(tx(s.y[i]))) continue;
                    out << X(s.x[i]) << ',' << Y(s.y[i]) << ' ';
                }
                out << "\"/>\n";
            }
            out << "<text x=\"" << W - R - 180 << "\" y=\"" << T + 18 + 16 * legend_row
                << "\" font-size=\"12\" fill=\"" << s.color << "\">" << s.label << "</text>\n";
            ++legend_row;
        }
        out << "</svg>\n";
    }

  private:
    struct Series {
        std::vector<double> x, y;
        std::string color, label;
        bool markers;
    };

    double tx(double v) const { return loglog_ ? std::log10(std::max(v, 1e-300)) : v; }
    std::string tick_label(double v) const {
        char buf[40];
        std::snprintf(buf, sizeof(buf), loglog_ ? "1e%.2g" : "%.4g", v);
        return buf;
    }

    std::string title_, xlabel_, ylabel_;
    bool loglog_;
    std::vector<Series> series_;
};

}  // namespace nsac
