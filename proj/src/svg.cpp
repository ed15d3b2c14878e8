#include "lorenzband/svg.hpp"

#include <iomanip>
#include <sstream>

namespace lorenzband {

namespace {

constexpr double kMargin = 0.05;
constexpr double kSize = 512.0;

double sx(double p) { return (kMargin + p * (1.0 - 2.0 * kMargin)) * kSize; }
double sy(double q) { return (1.0 - kMargin - q * (1.0 - 2.0 * kMargin)) * kSize; }

std::string fmt(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << v;
    std::string s = out.str();
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string path_data(const std::vector<CurvePoint>& points, bool close) {
    std::string d;
    for (std::size_t i = 0; i < points.size(); ++i) {
        d += i == 0 ? "M" : "L";
        d += fmt(sx(points[i].p)) + " " + fmt(sy(points[i].q));
    }
    if (close) d += "Z";
    return d;
}

}  // namespace

SvgFigure::SvgFigure() = default;

void SvgFigure::add_frame() {
    const std::string x0 = fmt(sx(0.0)), x1 = fmt(sx(1.0));
    const std::string y0 = fmt(sy(0.0)), y1 = fmt(sy(1.0));
    body_ += "<rect class=\"frame\" x=\"" + x0 + "\" y=\"" + y1 + "\" width=\"" +
             fmt(sx(1.0) - sx(0.0)) + "\" height=\"" + fmt(sy(0.0) - sy(1.0)) +
             "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    body_ += "<path class=\"diagonal\" d=\"M" + x0 + " " + y0 + "L" + x1 + " " + y1 +
             "\" fill=\"none\" stroke=\"#bbb\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
}

void SvgFigure::add_curve(const std::vector<CurvePoint>& points, const std::string& css_class,
                          const std::string& stroke, double width) {
    if (points.empty()) return;
    body_ += "<path class=\"" + css_class + "\" d=\"" + path_data(points, false) +
             "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) + "\"/>\n";
}

void SvgFigure::add_rings(const std::vector<std::vector<CurvePoint>>& rings,
                          const std::string& css_class, const std::string& fill, double opacity) {
    std::string d;
    for (const auto& ring : rings) {
        if (ring.size() < 3) continue;
        d += path_data(ring, true);
    }
    if (d.empty()) return;
    body_ += "<path class=\"" + css_class + "\" d=\"" + d + "\" fill=\"" + fill +
             "\" fill-opacity=\"" + fmt(opacity) + "\" stroke=\"none\"/>\n";
}

std::string SvgFigure::str() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kSize) + "\" height=\"" +
           fmt(kSize) + "\" viewBox=\"0 0 " + fmt(kSize) + " " + fmt(kSize) + "\">\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

}  // namespace lorenzband
