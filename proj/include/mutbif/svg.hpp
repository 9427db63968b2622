#pragma once

#include <string>
#include <vector>

namespace mutbif {

/// Minimal deterministic SVG canvas: fixed viewport, fixed decimal
/// formatting, insertion-ordered elements. Byte-identical output for
/// identical inputs.
class SvgCanvas {
  public:
    SvgCanvas(double x_min, double x_max, double y_min, double y_max, int width = 860,
              int height = 640);

    void polyline(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, double stroke_width = 1.5,
                  const std::string& dash = "");
    void scatter(const std::vector<double>& x, const std::vector<double>& y,
                 const std::string& color, double radius = 3.0);
    void text(double x, double y, const std::string& label, const std::string& color = "#000000",
              int font_size = 12);
    void rect(double x0, double y0, double x1, double y1, const std::string& fill);
    void axes(const std::string& x_label, const std::string& y_label);

    std::string render() const;
    void write(const std::string& path) const;

  private:
    double px(double x) const;
    double py(double y) const;

    double x_min_, x_max_, y_min_, y_max_;
    int w_, h_;
    static constexpr int margin_ = 56;
    std::vector<std::string> body_;
};

} // namespace mutbif
