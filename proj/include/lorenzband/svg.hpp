#pragma once

#include <string>
#include <vector>

#include "lorenzband/population.hpp"

namespace lorenzband {

/// Minimal deterministic SVG builder for curves in the unit square.
/// Fixed viewport with 5% margins, ordinate axis flipped so q grows upward,
/// coordinates printed with fixed precision.
class SvgFigure {
public:
    SvgFigure();

    /// Unit-square frame and the equality diagonal.
    void add_frame();

    /// One polyline as a single <path> element.
    void add_curve(const std::vector<CurvePoint>& points, const std::string& css_class,
                   const std::string& stroke, double width);

    /// Many closed rings as one <path> element (one M...Z subpath per ring).
    void add_rings(const std::vector<std::vector<CurvePoint>>& rings, const std::string& css_class,
                   const std::string& fill, double opacity);

    std::string str() const;

private:
    std::string body_;
};

}  // namespace lorenzband
