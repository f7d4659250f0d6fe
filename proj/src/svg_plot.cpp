#include "chaosmeter/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "chaosmeter/errors.hpp"

namespace chaosmeter {

namespace {

constexpr double kWidth = 640.0, kHeight = 480.0;
constexpr double kMarginLeft = 70.0, kMarginRight = 25.0;
constexpr double kMarginTop = 40.0, kMarginBottom = 55.0;

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

std::string render_loglog(std::span<const std::pair<double, double>> points,
                          const std::string& x_label, const std::string& y_label,
                          const std::string& title) {
    if (points.empty()) throw NonPositiveData("render_loglog: no data");
    for (const auto& [x, y] : points)
        if (x <= 0.0 || y <= 0.0)
            throw NonPositiveData("render_loglog: nonpositive coordinate");

    const RateFit fit = fit_rate(points);

    double lx_min = std::log10(points[0].first), lx_max = lx_min;
    double ly_min = std::log10(points[0].second), ly_max = ly_min;
    for (const auto& [x, y] : points) {
        lx_min = std::min(lx_min, std::log10(x));
        lx_max = std::max(lx_max, std::log10(x));
        ly_min = std::min(ly_min, std::log10(y));
        ly_max = std::max(ly_max, std::log10(y));
    }
    const double x_pad = std::max(0.05 * (lx_max - lx_min), 0.05);
    const double y_pad = std::max(0.05 * (ly_max - ly_min), 0.05);
    lx_min -= x_pad; lx_max += x_pad;
    ly_min -= y_pad; ly_max += y_pad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto px = [&](double lx) {
        return kMarginLeft + (lx - lx_min) / (lx_max - lx_min) * plot_w;
    };
    const auto py = [&](double ly) {
        return kMarginTop + (ly_max - ly) / (ly_max - ly_min) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
        << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
        << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Fitted line clipped to the data's abscissa span.
    const double lx0 = lx_min + x_pad, lx1 = lx_max - x_pad;
    const double ln10 = std::log(10.0);
    const auto fit_ly = [&](double lx) {
        return (fit.intercept + fit.exponent * lx * ln10) / ln10;
    };
    svg << "<line x1=\"" << fmt(px(lx0)) << "\" y1=\"" << fmt(py(fit_ly(lx0)))
        << "\" x2=\"" << fmt(px(lx1)) << "\" y2=\"" << fmt(py(fit_ly(lx1)))
        << "\" stroke=\"#b22222\" stroke-width=\"1.5\"/>\n";

    for (const auto& [x, y] : points)
        svg << "<circle cx=\"" << fmt(px(std::log10(x))) << "\" cy=\""
            << fmt(py(std::log10(y))) << "\" r=\"3.5\" fill=\"#1f4e8c\"/>\n";

    // Corner tick labels.
    svg << "<text x=\"" << kMarginLeft << "\" y=\"" << kHeight - 35
        << "\" font-size=\"12\">" << fmt(std::pow(10.0, lx0)) << "</text>\n";
    svg << "<text x=\"" << kWidth - kMarginRight - 50 << "\" y=\"" << kHeight - 35
        << "\" font-size=\"12\">" << fmt(std::pow(10.0, lx1)) << "</text>\n";
    svg << "<text x=\"8\" y=\"" << kHeight - kMarginBottom
        << "\" font-size=\"12\">" << fmt(std::pow(10.0, ly_min + y_pad))
        << "</text>\n";
    svg << "<text x=\"8\" y=\"" << kMarginTop + 12 << "\" font-size=\"12\">"
        << fmt(std::pow(10.0, ly_max - y_pad)) << "</text>\n";

    svg << "<text x=\"" << kWidth / 2 - 40 << "\" y=\"" << kHeight - 12
        << "\" font-size=\"14\">" << x_label << "</text>\n";
    svg << "<text x=\"14\" y=\"" << kMarginTop - 14 << "\" font-size=\"14\">"
        << y_label << "</text>\n";
    if (!title.empty())
        svg << "<text x=\"" << kWidth / 2 - 80 << "\" y=\"20\" font-size=\"15\">"
            << title << "</text>\n";
    svg << "<text x=\"" << kMarginLeft + 10 << "\" y=\"" << kMarginTop + 20
        << "\" font-size=\"14\" fill=\"#b22222\">slope = "
        << fmt(fit.exponent, "%.17g") << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace chaosmeter
