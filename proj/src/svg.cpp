#include "mutbif/svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mutbif {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace

SvgCanvas::SvgCanvas(double x_min, double x_max, double y_min, double y_max, int width, int height)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), w_(width), h_(height) {
    if (!(x_max > x_min) || !(y_max > y_min)) throw std::invalid_argument("SvgCanvas: empty range");
}

double SvgCanvas::px(double x) const {
    return margin_ + (x - x_min_) / (x_max_ - x_min_) * (w_ - 2 * margin_);
}

double SvgCanvas::py(double y) const {
    return h_ - margin_ - (y - y_min_) / (y_max_ - y_min_) * (h_ - 2 * margin_);
}

void SvgCanvas::polyline(const std::vector<double>& x, const std::vector<double>& y,
                         const std::string& color, double stroke_width, const std::string& dash) {
    if (x.size() != y.size() || x.empty()) return;
    std::string d = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                    fmt(stroke_width) + "\"";
    if (!dash.empty()) d += " stroke-dasharray=\"" + dash + "\"";
    d += " points=\"";
    for (size_t k = 0; k < x.size(); ++k) {
        if (!std::isfinite(x[k]) || !std::isfinite(y[k])) continue;
        d += fmt(px(x[k])) + "," + fmt(py(y[k])) + " ";
    }
    d += "\"/>";
    body_.push_back(d);
}

void SvgCanvas::scatter(const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& color, double radius) {
    for (size_t k = 0; k < x.size() && k < y.size(); ++k) {
        body_.push_back("<circle cx=\"" + fmt(px(x[k])) + "\" cy=\"" + fmt(py(y[k])) +
                        "\" r=\"" + fmt(radius) + "\" fill=\"" + color + "\"/>");
    }
}

void SvgCanvas::text(double x, double y, const std::string& label, const std::string& color,
                     int font_size) {
    body_.push_back("<text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(py(y)) + "\" fill=\"" + color +
                    "\" font-size=\"" + std::to_string(font_size) +
                    "\" font-family=\"sans-serif\">" + label + "</text>");
}

void SvgCanvas::rect(double x0, double y0, double x1, double y1, const std::string& fill) {
    const double X0 = px(x0), Y1 = py(y0), X1 = px(x1), Y0 = py(y1);
    body_.push_back("<rect x=\"" + fmt(X0) + "\" y=\"" + fmt(Y0) + "\" width=\"" +
                    fmt(X1 - X0) + "\" height=\"" + fmt(Y1 - Y0) + "\" fill=\"" + fill + "\"/>");
}

void SvgCanvas::axes(const std::string& x_label, const std::string& y_label) {
    std::string d;
    d += "<rect x=\"" + fmt(margin_) + "\" y=\"" + fmt(margin_) + "\" width=\"" +
         fmt(w_ - 2 * margin_) + "\" height=\"" + fmt(h_ - 2 * margin_) +
         "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.00\"/>";
    body_.push_back(d);
    for (int k = 0; k <= 5; ++k) {
        const double xv = x_min_ + (x_max_ - x_min_) * k / 5.0;
        const double yv = y_min_ + (y_max_ - y_min_) * k / 5.0;
        body_.push_back("<text x=\"" + fmt(px(xv) - 10) + "\" y=\"" + fmt(h_ - margin_ + 18) +
                        "\" font-size=\"10\" font-family=\"sans-serif\">" + fmt_tick(xv) +
                        "</text>");
        body_.push_back("<text x=\"" + fmt(margin_ - 46) + "\" y=\"" + fmt(py(yv) + 4) +
                        "\" font-size=\"10\" font-family=\"sans-serif\">" + fmt_tick(yv) +
                        "</text>");
    }
    body_.push_back("<text x=\"" + fmt(w_ / 2.0) + "\" y=\"" + fmt(h_ - 14.0) +
                    "\" font-size=\"13\" font-family=\"sans-serif\">" + x_label + "</text>");
    body_.push_back("<text x=\"14.00\" y=\"" + fmt(margin_ - 20.0) +
                    "\" font-size=\"13\" font-family=\"sans-serif\">" + y_label + "</text>");
}

std::string SvgCanvas::render() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w_) +
                      "\" height=\"" + std::to_string(h_) + "\" viewBox=\"0 0 " +
                      std::to_string(w_) + " " + std::to_string(h_) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    for (const auto& b : body_) {
        out += b;
        out += "\n";
    }
    out += "</svg>\n";
    return out;
}

void SvgCanvas::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("SvgCanvas: cannot write " + path);
    f << render();
}

} // namespace mutbif
