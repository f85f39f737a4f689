#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cosmicbell::cli {

// Minimal line-plot writer.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel, double x0, double x1, double y0, double y1);

    void line(const std::vector<std::pair<double, double>>& pts, const std::string& colour, double width = 1.5,
              bool dashed = false);
    void marker(double x, double y, const std::string& colour, const std::string& label = {});
    void fill(const std::vector<std::pair<double, double>>& pts, const std::string& colour, double opacity);
    std::string str() const;
    void save(const std::string& path) const;

private:
    double px(double x) const;
    double py(double y) const;

    std::string title_, xlabel_, ylabel_;
    double x0_, x1_, y0_, y1_;
    std::string body_;
    static constexpr double kW = 640, kH = 440, kL = 70, kR = 20, kT = 40, kB = 50;
};

}  // namespace cosmicbell::cli
