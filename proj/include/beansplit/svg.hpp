#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace beansplit {

// Standalone SVG charts for histograms, training curves and scatter plots.
// File outputs only; nothing interactive.
namespace svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

namespace detail {

constexpr int kWidth = 640, kHeight = 420;
constexpr int kMarginLeft = 70, kMarginRight = 20, kMarginTop = 30, kMarginBottom = 50;

struct Scale {
    double lo, hi;
    double to_px(double v, int px_lo, int px_hi) const {
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return px_lo + t * (px_hi - px_lo);
    }
};

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline std::string open_svg() {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "font-family=\"sans-serif\" font-size=\"12\">\n",
                  kWidth, kHeight);
    return std::string(buf) + "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline std::string axes(const Scale& sx, const Scale& sy, const std::string& xlabel,
                        const std::string& ylabel, const std::string& title) {
    std::string out;
    char buf[256];
    const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n"
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                  x0, y0, x1, y0, x0, y0, x0, y1);
    out += buf;
    for (int i = 0; i <= 4; ++i) {
        const double fx = sx.lo + (sx.hi - sx.lo) * i / 4.0;
        const double fy = sy.lo + (sy.hi - sy.lo) * i / 4.0;
        const double px = sx.to_px(fx, x0, x1);
        const double py = sy.to_px(fy, y0, y1);
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\">%s</text>\n", px, y0 + 18,
                      fmt(fx).c_str());
        out += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\">%s</text>\n", x0 - 6,
                      py + 4, fmt(fy).c_str());
        out += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">%s</text>\n",
                  (x0 + x1) / 2, kHeight - 12, xlabel.c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"16\" y=\"%d\" text-anchor=\"middle\" transform=\"rotate(-90 16 %d)\">%s</text>\n",
                  (y0 + y1) / 2, (y0 + y1) / 2, ylabel.c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">%s</text>\n",
                  kWidth / 2, title.c_str());
    out += buf;
    return out;
}

}  // namespace detail

inline std::string line_chart(const std::vector<Series>& series, const std::string& title,
                              const std::string& xlabel, const std::string& ylabel) {
    using namespace detail;
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xlo = xhi = s.x[i];
                ylo = yhi = s.y[i];
                first = false;
            }
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    }
    if (ylo == yhi) yhi = ylo + 1.0;
    if (xlo == xhi) xhi = xlo + 1.0;
    const Scale sx{xlo, xhi}, sy{ylo, yhi};

    std::string out = open_svg() + axes(sx, sy, xlabel, ylabel, title);
    char buf[128];
    int legend_y = kMarginTop + 8;
    for (const auto& s : series) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f ",
                          sx.to_px(s.x[i], kMarginLeft, kWidth - kMarginRight),
                          sy.to_px(s.y[i], kHeight - kMarginBottom, kMarginTop));
            pts += buf;
        }
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" +
               pts + "\"/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%d\" fill=\"%s\">%s</text>\n", kWidth - 180, legend_y,
                      s.color.c_str(), s.name.c_str());
        out += buf;
        legend_y += 16;
    }
    return out + "</svg>\n";
}

inline std::string bar_chart(const std::vector<double>& values, const std::string& title,
                             const std::string& xlabel, const std::string& ylabel) {
    using namespace detail;
    double hi = 0.0;
    for (double v : values) hi = std::max(hi, v);
    if (hi == 0.0) hi = 1.0;
    const Scale sx{0.0, static_cast<double>(values.size())}, sy{0.0, hi};

    std::string out = open_svg() + axes(sx, sy, xlabel, ylabel, title);
    char buf[160];
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double px0 = sx.to_px(static_cast<double>(i) + 0.1, kMarginLeft, kWidth - kMarginRight);
        const double px1 = sx.to_px(static_cast<double>(i) + 0.9, kMarginLeft, kWidth - kMarginRight);
        const double py = sy.to_px(values[i], kHeight - kMarginBottom, kMarginTop);
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"#2ca02c\"/>\n",
                      px0, py, px1 - px0, (kHeight - kMarginBottom) - py);
        out += buf;
    }
    return out + "</svg>\n";
}

inline std::string scatter_chart(const Series& s, const std::string& title,
                                 const std::string& xlabel, const std::string& ylabel) {
    using namespace detail;
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (first) {
            xlo = xhi = s.x[i];
            ylo = yhi = s.y[i];
            first = false;
        }
        xlo = std::min(xlo, s.x[i]);
        xhi = std::max(xhi, s.x[i]);
        ylo = std::min(ylo, s.y[i]);
        yhi = std::max(yhi, s.y[i]);
    }
    if (ylo == yhi) yhi = ylo + 1.0;
    if (xlo == xhi) xhi = xlo + 1.0;
    const Scale sx{xlo, xhi}, sy{ylo, yhi};
    std::string out = open_svg() + axes(sx, sy, xlabel, ylabel, title);
    char buf[96];
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n",
                      sx.to_px(s.x[i], kMarginLeft, kWidth - kMarginRight),
                      sy.to_px(s.y[i], kHeight - kMarginBottom, kMarginTop), s.color.c_str());
        out += buf;
    }
    return out + "</svg>\n";
}

}  // namespace svg
}  // namespace beansplit
