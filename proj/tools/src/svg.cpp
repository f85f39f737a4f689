#include "svg.hpp"

#include "cosmicbell/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace cosmicbell::cli {

namespace {

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return b;
}

std::string tick(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel, double x0, double x1, double y0, double y1)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)), x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (!(x1 > x0) || !(y1 > y0)) throw InternalError("degenerate plot range");
}

double SvgPlot::px(double x) const { return kL + (x - x0_) / (x1_ - x0_) * (kW - kL - kR); }
double SvgPlot::py(double y) const { return kH - kB - (y - y0_) / (y1_ - y0_) * (kH - kT - kB); }

void SvgPlot::line(const std::vector<std::pair<double, double>>& pts, const std::string& colour, double width, bool dashed) {
    if (pts.size() < 2) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"" + num(width) + "\"";
    if (dashed) body_ += " stroke-dasharray=\"5,4\"";
    body_ += " points=\"";
    for (const auto& [x, y] : pts) body_ += num(px(x)) + "," + num(py(y)) + " ";
    body_ += "\"/>\n";
}

void SvgPlot::fill(const std::vector<std::pair<double, double>>& pts, const std::string& colour, double opacity) {
    if (pts.size() < 3) return;
    body_ += "<polygon fill=\"" + colour + "\" fill-opacity=\"" + num(opacity) + "\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : pts) body_ += num(px(x)) + "," + num(py(y)) + " ";
    body_ += "\"/>\n";
}

void SvgPlot::marker(double x, double y, const std::string& colour, const std::string& label) {
    body_ += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"4\" fill=\"" + colour + "\"/>\n";
    if (!label.empty())
        body_ += "<text x=\"" + num(px(x) + 6) + "\" y=\"" + num(py(y) - 6) + "\" font-size=\"12\">" + escape(label) + "</text>\n";
}

std::string SvgPlot::str() const {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" + num(kH) +
                    "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(kW / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(title_) + "</text>\n";
    // axes and ticks
    s += "<rect x=\"" + num(kL) + "\" y=\"" + num(kT) + "\" width=\"" + num(kW - kL - kR) + "\" height=\"" +
         num(kH - kT - kB) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = x0_ + (x1_ - x0_) * k / 5.0, yv = y0_ + (y1_ - y0_) * k / 5.0;
        s += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kH - kB + 16) + "\" text-anchor=\"middle\" font-size=\"11\">" +
             tick(xv) + "</text>\n";
        s += "<text x=\"" + num(kL - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
             tick(yv) + "</text>\n";
    }
    s += "<text x=\"" + num(kW / 2) + "\" y=\"" + num(kH - 10) + "\" text-anchor=\"middle\" font-size=\"13\">" +
         escape(xlabel_) + "</text>\n";
    s += "<text transform=\"translate(16," + num(kH / 2) + ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" +
         escape(ylabel_) + "</text>\n";
    s += "<g clip-path=\"none\">\n" + body_ + "</g>\n</svg>\n";
    return s;
}

void SvgPlot::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << str();
}

}  // namespace cosmicbell::cli
