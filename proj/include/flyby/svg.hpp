#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flyby
{

/**
 * Minimal native SVG chart: line and scatter series over linear axes, plus
 * horizontal reference lines. Every series is tagged with its point count
 * (data-points attribute) so outputs can be checked without rendering.
 */
class SvgPlot
{
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label, double width = 720.0, double height = 420.0);

    void add_line(const std::string& name, std::vector<double> x, std::vector<double> y, std::string color = {});
    void add_scatter(const std::string& name, std::vector<double> x, std::vector<double> y, std::string color = {});
    void add_hline(double y, const std::string& label, std::string color = "#888888");

    void set_x_range(double lo, double hi) { x_range_ = {lo, hi}; }
    void set_y_range(double lo, double hi) { y_range_ = {lo, hi}; }

    std::string render() const;
    /// Throws std::runtime_error when the file cannot be written.
    void save(const std::string& path) const;

private:
    struct Series
    {
        std::string name;
        std::vector<double> x, y;
        std::string color;
        bool scatter = false;
    };
    struct Reference
    {
        double y;
        std::string label;
        std::string color;
    };

    std::string next_color();

    std::string title_, x_label_, y_label_;
    double width_, height_;
    std::vector<Series> series_;
    std::vector<Reference> references_;
    std::optional<std::pair<double, double>> x_range_, y_range_;
};

/// Escapes the five XML special characters.
std::string xml_escape(const std::string& text);

/// Round tick positions covering [lo, hi] with roughly `target` intervals.
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

}  // namespace flyby
