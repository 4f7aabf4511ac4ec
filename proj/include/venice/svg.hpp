#pragma once

// Minimal SVG emission for section box sets and planar phase portraits.

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "venice/skew2d.hpp"

namespace venice::svg {

class Canvas {
public:
    Canvas(double xlo, double xhi, double ylo, double yhi, int width = 800, int height = 400)
        : xlo_(xlo), xhi_(xhi), ylo_(ylo), yhi_(yhi), w_(width), h_(height) {
        body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\""
              << h_ << "\" viewBox=\"0 0 " << w_ << ' ' << h_ << "\">\n";
        body_ << "<rect x=\"0\" y=\"0\" width=\"" << w_ << "\" height=\"" << h_
              << "\" fill=\"white\"/>\n";
    }

    double px(double x) const { return (x - xlo_) / (xhi_ - xlo_) * w_; }
    double py(double y) const { return (yhi_ - y) / (yhi_ - ylo_) * h_; }

    void rect(double x0, double x1, double y0, double y1, const std::string& fill,
              double opacity = 0.6) {
        double a = px(x0), b = px(x1), c = py(y1), d = py(y0);
        body_ << "<rect x=\"" << a << "\" y=\"" << c << "\" width=\"" << std::max(0.5, b - a)
              << "\" height=\"" << std::max(0.5, d - c) << "\" fill=\"" << fill
              << "\" fill-opacity=\"" << opacity << "\"/>\n";
    }

    void circle(double x, double y, double r_px, const std::string& fill) {
        body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"" << r_px
              << "\" fill=\"" << fill << "\"/>\n";
    }

    void polyline(const std::vector<std::array<double, 2>>& pts, const std::string& stroke) {
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1\" points=\"";
        for (const auto& p : pts) body_ << px(p[0]) << ',' << py(p[1]) << ' ';
        body_ << "\"/>\n";
    }

    void line(double x0, double y0, double x1, double y1, const std::string& stroke) {
        body_ << "<line x1=\"" << px(x0) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(x1)
              << "\" y2=\"" << py(y1) << "\" stroke=\"" << stroke << "\" stroke-width=\"1\"/>\n";
    }

    void text(double x, double y, const std::string& s) {
        body_ << "<text x=\"" << px(x) << "\" y=\"" << py(y) << "\" font-size=\"12\">" << s
              << "</text>\n";
    }

    std::string str() const { return body_.str() + "</svg>\n"; }

private:
    double xlo_, xhi_, ylo_, yhi_;
    int w_, h_;
    std::ostringstream body_;
};

// Section overlay: A+ boxes, A- boxes, intersection cluster, fixed point P.
inline std::string render_section(const skew2d::BoxSet& plus, const skew2d::BoxSet& minus,
                                  const skew2d::BoxSet& inter, skew2d::Point P) {
    Canvas c(-1.05, 1.05, -0.05, 1.05, 840, 440);
    c.line(-1.0, 0.0, 1.0, 0.0, "#cccccc");
    c.line(0.0, 0.0, 0.0, 1.0, "#888888");
    for (const auto& b : plus.boxes) c.rect(b.ulo, b.uhi, b.ylo, b.yhi, "#2060c0", 0.45);
    for (const auto& b : minus.boxes) c.rect(b.ulo, b.uhi, b.ylo, b.yhi, "#c04020", 0.45);
    for (const auto& b : inter.boxes) c.rect(b.ulo, b.uhi, b.ylo, b.yhi, "#109030", 0.8);
    c.circle(P.u, P.y, 3.0, "black");
    return c.str();
}

}  // namespace venice::svg
