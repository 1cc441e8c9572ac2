#include "flyby/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace flyby
{

namespace
{

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

constexpr double kLeft = 70.0, kRight = 150.0, kTop = 40.0, kBottom = 55.0;

std::pair<double, double> padded(double lo, double hi)
{
    if (!(hi > lo))
    {
        const double pad = std::max(1.0, std::abs(lo) * 0.1);
        return {lo - pad, hi + pad};
    }
    return {lo, hi};
}

std::string tick_label(double v)
{
    if (v == 0.0)
    {
        return "0";
    }
    const double a = std::abs(v);
    return a >= 1e4 || a < 1e-3 ? fmt::format("{:.2g}", v) : fmt::format("{:g}", v);
}

}  // namespace

std::string xml_escape(const std::string& text)
{
    std::string out;
    for (const char c : text)
    {
        switch (c)
        {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::vector<double> nice_ticks(double lo, double hi, int target)
{
    std::vector<double> ticks;
    if (!(hi > lo) || target < 1 || !std::isfinite(lo) || !std::isfinite(hi))
    {
        return ticks;
    }
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (const double m : {1.0, 2.0, 5.0, 10.0})
    {
        step = m * mag;
        if (step >= raw)
        {
            break;
        }
    }
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label, double width, double height)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)), width_(width),
      height_(height)
{
}

std::string SvgPlot::next_color()
{
    return kPalette[series_.size() % std::size(kPalette)];
}

void SvgPlot::add_line(const std::string& name, std::vector<double> x, std::vector<double> y, std::string color)
{
    if (x.size() != y.size())
    {
        throw std::invalid_argument("SvgPlot: x and y differ in length");
    }
    if (color.empty())
    {
        color = next_color();
    }
    series_.push_back({name, std::move(x), std::move(y), std::move(color), false});
}

void SvgPlot::add_scatter(const std::string& name, std::vector<double> x, std::vector<double> y, std::string color)
{
    if (x.size() != y.size())
    {
        throw std::invalid_argument("SvgPlot: x and y differ in length");
    }
    if (color.empty())
    {
        color = next_color();
    }
    series_.push_back({name, std::move(x), std::move(y), std::move(color), true});
}

void SvgPlot::add_hline(double y, const std::string& label, std::string color)
{
    references_.push_back({y, label, std::move(color)});
}

std::string SvgPlot::render() const
{
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series_)
    {
        for (std::size_t i = 0; i < s.x.size(); ++i)
        {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
            {
                x_lo = std::min(x_lo, s.x[i]);
                x_hi = std::max(x_hi, s.x[i]);
                y_lo = std::min(y_lo, s.y[i]);
                y_hi = std::max(y_hi, s.y[i]);
            }
        }
    }
    for (const auto& r : references_)
    {
        y_lo = std::min(y_lo, r.y);
        y_hi = std::max(y_hi, r.y);
    }
    if (!std::isfinite(x_lo))
    {
        x_lo = 0.0;
        x_hi = 1.0;
    }
    if (!std::isfinite(y_lo))
    {
        y_lo = 0.0;
        y_hi = 1.0;
    }
    std::tie(x_lo, x_hi) = x_range_ ? *x_range_ : padded(x_lo, x_hi);
    std::tie(y_lo, y_hi) = y_range_ ? *y_range_ : padded(y_lo, y_hi);

    const double pw = width_ - kLeft - kRight;
    const double ph = height_ - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

    std::string out = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
        width_, height_, kLeft + pw / 2.0, xml_escape(title_));

    out += "<g class=\"axes\" stroke=\"#cccccc\" stroke-width=\"0.5\">\n";
    for (const double t : nice_ticks(x_lo, x_hi))
    {
        out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", px(t), kTop,
                           kTop + ph);
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" stroke=\"none\" fill=\"black\">{}</text>\n",
                           px(t), kTop + ph + 16.0, tick_label(t));
    }
    for (const double t : nice_ticks(y_lo, y_hi))
    {
        out += fmt::format("<line x1=\"{1:.2f}\" y1=\"{0:.2f}\" x2=\"{2:.2f}\" y2=\"{0:.2f}\"/>\n", py(t), kLeft,
                           kLeft + pw);
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" stroke=\"none\" fill=\"black\">{}</text>\n",
                           kLeft - 6.0, py(t) + 4.0, tick_label(t));
    }
    out += "</g>\n";
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
                       kLeft, kTop, pw, ph);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2.0,
                       height_ - 12.0, xml_escape(x_label_));
    out += fmt::format("<text transform=\"translate(18,{:.2f}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                       kTop + ph / 2.0, xml_escape(y_label_));

    out += fmt::format("<clipPath id=\"plot-area\"><rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\"/></clipPath>\n",
                       kLeft, kTop, pw, ph);
    for (const auto& r : references_)
    {
        out += fmt::format("<line class=\"reference\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
                           "stroke=\"{}\" stroke-dasharray=\"6 4\" clip-path=\"url(#plot-area)\"/>\n",
                           kLeft, py(r.y), kLeft + pw, py(r.y), r.color);
    }

    double legend_y = kTop + 10.0;
    auto legend = [&](const std::string& name, const std::string& color) {
        out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"12\" height=\"3\" fill=\"{}\"/>\n",
                           kLeft + pw + 12.0, legend_y - 4.0, color);
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", kLeft + pw + 30.0, legend_y,
                           xml_escape(name));
        legend_y += 18.0;
    };

    for (const auto& s : series_)
    {
        if (s.scatter)
        {
            out += fmt::format("<g class=\"scatter\" data-name=\"{}\" data-points=\"{}\" fill=\"{}\" fill-opacity=\"0.7\" "
                               "clip-path=\"url(#plot-area)\">\n",
                               xml_escape(s.name), s.x.size(), s.color);
            for (std::size_t i = 0; i < s.x.size(); ++i)
            {
                out += fmt::format("<circle class=\"point\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\"/>\n", px(s.x[i]),
                                   py(s.y[i]));
            }
            out += "</g>\n";
        }
        else
        {
            std::string points;
            for (std::size_t i = 0; i < s.x.size(); ++i)
            {
                points += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px(s.x[i]), py(s.y[i]));
            }
            out += fmt::format("<polyline class=\"line\" data-name=\"{}\" data-points=\"{}\" fill=\"none\" stroke=\"{}\" "
                               "stroke-width=\"1.5\" clip-path=\"url(#plot-area)\" points=\"{}\"/>\n",
                               xml_escape(s.name), s.x.size(), s.color, points);
        }
        legend(s.name, s.color);
    }
    for (const auto& r : references_)
    {
        legend(r.label, r.color);
    }
    out += "</svg>\n";
    return out;
}

void SvgPlot::save(const std::string& path) const
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
    {
        throw std::runtime_error("cannot write " + path);
    }
    f << render();
    if (!f)
    {
        throw std::runtime_error("failed writing " + path);
    }
}

}  // namespace flyby
