#include "lobviz/render.hpp"

#include "lobviz/error.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace lobviz {

namespace {

// Stops of the blue -> yellow map, evenly spaced.
constexpr std::array<Rgb, 9> kStops{{
    {53, 42, 135},
    {15, 92, 221},
    {20, 129, 214},
    {6, 164, 202},
    {46, 183, 164},
    {135, 191, 119},
    {209, 187, 89},
    {254, 200, 50},
    {249, 251, 14},
}};

// Classic 5x7 glyphs for ASCII 0x20..0x7e, one byte per column, bit 0 on top.
constexpr std::uint8_t kFont[95][5] = {
    {0x00, 0x00, 0x00, 0x00, 0x00}, {0x00, 0x00, 0x5F, 0x00, 0x00}, {0x00, 0x07, 0x00, 0x07, 0x00},
    {0x14, 0x7F, 0x14, 0x7F, 0x14}, {0x24, 0x2A, 0x7F, 0x2A, 0x12}, {0x23, 0x13, 0x08, 0x64, 0x62},
    {0x36, 0x49, 0x55, 0x22, 0x50}, {0x00, 0x05, 0x03, 0x00, 0x00}, {0x00, 0x1C, 0x22, 0x41, 0x00},
    {0x00, 0x41, 0x22, 0x1C, 0x00}, {0x08, 0x2A, 0x1C, 0x2A, 0x08}, {0x08, 0x08, 0x3E, 0x08, 0x08},
    {0x00, 0x50, 0x30, 0x00, 0x00}, {0x08, 0x08, 0x08, 0x08, 0x08}, {0x00, 0x60, 0x60, 0x00, 0x00},
    {0x20, 0x10, 0x08, 0x04, 0x02}, {0x3E, 0x51, 0x49, 0x45, 0x3E}, {0x00, 0x42, 0x7F, 0x40, 0x00},
    {0x42, 0x61, 0x51, 0x49, 0x46}, {0x21, 0x41, 0x45, 0x4B, 0x31}, {0x18, 0x14, 0x12, 0x7F, 0x10},
    {0x27, 0x45, 0x45, 0x45, 0x39}, {0x3C, 0x4A, 0x49, 0x49, 0x30}, {0x01, 0x71, 0x09, 0x05, 0x03},
    {0x36, 0x49, 0x49, 0x49, 0x36}, {0x06, 0x49, 0x49, 0x29, 0x1E}, {0x00, 0x36, 0x36, 0x00, 0x00},
    {0x00, 0x56, 0x36, 0x00, 0x00}, {0x00, 0x08, 0x14, 0x22, 0x41}, {0x14, 0x14, 0x14, 0x14, 0x14},
    {0x41, 0x22, 0x14, 0x08, 0x00}, {0x02, 0x01, 0x51, 0x09, 0x06}, {0x32, 0x49, 0x79, 0x41, 0x3E},
    {0x7E, 0x11, 0x11, 0x11, 0x7E}, {0x7F, 0x49, 0x49, 0x49, 0x36}, {0x3E, 0x41, 0x41, 0x41, 0x22},
    {0x7F, 0x41, 0x41, 0x22, 0x1C}, {0x7F, 0x49, 0x49, 0x49, 0x41}, {0x7F, 0x09, 0x09, 0x01, 0x01},
    {0x3E, 0x41, 0x41, 0x51, 0x32}, {0x7F, 0x08, 0x08, 0x08, 0x7F}, {0x00, 0x41, 0x7F, 0x41, 0x00},
    {0x20, 0x40, 0x41, 0x3F, 0x01}, {0x7F, 0x08, 0x14, 0x22, 0x41}, {0x7F, 0x40, 0x40, 0x40, 0x40},
    {0x7F, 0x02, 0x04, 0x02, 0x7F}, {0x7F, 0x04, 0x08, 0x10, 0x7F}, {0x3E, 0x41, 0x41, 0x41, 0x3E},
    {0x7F, 0x09, 0x09, 0x09, 0x06}, {0x3E, 0x41, 0x51, 0x21, 0x5E}, {0x7F, 0x09, 0x19, 0x29, 0x46},
    {0x46, 0x49, 0x49, 0x49, 0x31}, {0x01, 0x01, 0x7F, 0x01, 0x01}, {0x3F, 0x40, 0x40, 0x40, 0x3F},
    {0x1F, 0x20, 0x40, 0x20, 0x1F}, {0x7F, 0x20, 0x18, 0x20, 0x7F}, {0x63, 0x14, 0x08, 0x14, 0x63},
    {0x03, 0x04, 0x78, 0x04, 0x03}, {0x61, 0x51, 0x49, 0x45, 0x43}, {0x00, 0x00, 0x7F, 0x41, 0x41},
    {0x02, 0x04, 0x08, 0x10, 0x20}, {0x41, 0x41, 0x7F, 0x00, 0x00}, {0x04, 0x02, 0x01, 0x02, 0x04},
    {0x40, 0x40, 0x40, 0x40, 0x40}, {0x00, 0x01, 0x02, 0x04, 0x00}, {0x20, 0x54, 0x54, 0x54, 0x78},
    {0x7F, 0x48, 0x44, 0x44, 0x38}, {0x38, 0x44, 0x44, 0x44, 0x20}, {0x38, 0x44, 0x44, 0x48, 0x7F},
    {0x38, 0x54, 0x54, 0x54, 0x18}, {0x08, 0x7E, 0x09, 0x01, 0x02}, {0x08, 0x14, 0x54, 0x54, 0x3C},
    {0x7F, 0x08, 0x04, 0x04, 0x78}, {0x00, 0x44, 0x7D, 0x40, 0x00}, {0x20, 0x40, 0x44, 0x3D, 0x00},
    {0x00, 0x7F, 0x10, 0x28, 0x44}, {0x00, 0x41, 0x7F, 0x40, 0x00}, {0x7C, 0x04, 0x18, 0x04, 0x78},
    {0x7C, 0x08, 0x04, 0x04, 0x78}, {0x38, 0x44, 0x44, 0x44, 0x38}, {0x7C, 0x14, 0x14, 0x14, 0x08},
    {0x08, 0x14, 0x14, 0x18, 0x7C}, {0x7C, 0x08, 0x04, 0x04, 0x08}, {0x48, 0x54, 0x54, 0x54, 0x20},
    {0x04, 0x3F, 0x44, 0x40, 0x20}, {0x3C, 0x40, 0x40, 0x20, 0x7C}, {0x1C, 0x20, 0x40, 0x20, 0x1C},
    {0x3C, 0x40, 0x30, 0x40, 0x3C}, {0x44, 0x28, 0x10, 0x28, 0x44}, {0x0C, 0x50, 0x50, 0x50, 0x3C},
    {0x44, 0x64, 0x54, 0x4C, 0x44}, {0x00, 0x08, 0x36, 0x41, 0x00}, {0x00, 0x00, 0x7F, 0x00, 0x00},
    {0x00, 0x41, 0x36, 0x08, 0x00}, {0x08, 0x08, 0x2A, 0x1C, 0x08},
};

std::string hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    // Avoid "-0.00" so output does not depend on the sign of tiny values.
    if (std::string_view(buf) == "-0.00") return "0.00";
    return buf;
}

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

int round_px(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace

Rgb heat_color(double t) {
    if (!(t > 0)) t = 0;  // also maps NaN to the low end
    if (t > 1) t = 1;
    const double pos = t * static_cast<double>(kStops.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), kStops.size() - 2);
    const double f = pos - static_cast<double>(i);
    auto mix = [f](std::uint8_t a, std::uint8_t b) {
        return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * f));
    };
    return Rgb{mix(kStops[i].r, kStops[i + 1].r), mix(kStops[i].g, kStops[i + 1].g),
               mix(kStops[i].b, kStops[i + 1].b)};
}

double linear_scale(double value, double max) { return max > 0 ? value / max : 0.0; }

double log_scale(double value, double max) {
    if (value <= 1 || max <= 1) return max <= 1 && value >= 1 ? 1.0 : 0.0;
    return std::log10(value) / std::log10(max);
}

SvgCanvas::SvgCanvas(int width, int height) : width_(width), height_(height) {}

void SvgCanvas::rect(double x, double y, double w, double h, Rgb fill) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
             "\" fill=\"" + hex(fill) + "\"/>\n";
}

void SvgCanvas::line(double x1, double y1, double x2, double y2, Rgb color, double width) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
             "\" stroke=\"" + hex(color) + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void SvgCanvas::polyline(std::span<const Point> points, Rgb color, double width) {
    if (points.size() < 2) {
        if (points.size() == 1) rect(points[0].x - width / 2, points[0].y - width / 2, width, width, color);
        return;
    }
    body_ += "<polyline fill=\"none\" stroke=\"" + hex(color) + "\" stroke-width=\"" + num(width) + "\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) body_ += ' ';
        body_ += num(points[i].x) + "," + num(points[i].y);
    }
    body_ += "\"/>\n";
}

void SvgCanvas::text(double x, double y, std::string_view s, Rgb color, Anchor anchor, double size, bool vertical) {
    const char* a = anchor == Anchor::Start ? "start" : (anchor == Anchor::Middle ? "middle" : "end");
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"monospace\" font-size=\"" +
             num(size * 1.3) + "\" fill=\"" + hex(color) + "\" text-anchor=\"" + a + "\"";
    if (vertical) body_ += " transform=\"rotate(-90 " + num(x) + " " + num(y) + ")\"";
    body_ += ">" + escape_xml(s) + "</text>\n";
}

std::string SvgCanvas::finish() {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) + "\" height=\"" +
           std::to_string(height_) + "\" viewBox=\"0 0 " + std::to_string(width_) + " " + std::to_string(height_) +
           "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
           "\" fill=\"#ffffff\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

RasterCanvas::RasterCanvas(int width, int height, Rgb background)
    : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = background.r;
        pixels_[i + 1] = background.g;
        pixels_[i + 2] = background.b;
    }
}

void RasterCanvas::plot(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
}

Rgb RasterCanvas::pixel(int x, int y) const {
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
    return Rgb{pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void RasterCanvas::rect(double x, double y, double w, double h, Rgb fill) {
    // Sub-pixel cells still cover one pixel so dense heatmaps stay visible.
    int x0 = round_px(x), x1 = round_px(x + w);
    int y0 = round_px(y), y1 = round_px(y + h);
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, width_);
    y1 = std::min(y1, height_);
    for (int yy = y0; yy < y1; ++yy) {
        for (int xx = x0; xx < x1; ++xx) plot(xx, yy, fill);
    }
}

void RasterCanvas::line(double x1, double y1, double x2, double y2, Rgb color, double width) {
    const double dx = x2 - x1, dy = y2 - y1;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::max(std::fabs(dx), std::fabs(dy)))));
    const int thick = std::max(1, round_px(width));
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const int px = static_cast<int>(std::floor(x1 + dx * t));
        const int py = static_cast<int>(std::floor(y1 + dy * t));
        for (int a = 0; a < thick; ++a) {
            for (int b = 0; b < thick; ++b) plot(px + a - thick / 2, py + b - thick / 2, color);
        }
    }
}

void RasterCanvas::polyline(std::span<const Point> points, Rgb color, double width) {
    if (points.size() == 1) {
        line(points[0].x, points[0].y, points[0].x, points[0].y, color, width);
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        line(points[i - 1].x, points[i - 1].y, points[i].x, points[i].y, color, width);
    }
}

void RasterCanvas::text(double x, double y, std::string_view s, Rgb color, Anchor anchor, double size,
                        bool vertical) {
    const int scale = std::max(1, static_cast<int>(size / 7.0 + 0.25));
    const int advance = 6 * scale;
    const int total = static_cast<int>(s.size()) * advance - scale;
    int offset = 0;
    if (anchor == Anchor::Middle) offset = -total / 2;
    if (anchor == Anchor::End) offset = -total;
    const int bx = round_px(x), by = round_px(y);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        const auto* glyph = kFont[(c >= 0x20 && c <= 0x7e) ? c - 0x20 : '?' - 0x20];
        for (int col = 0; col < 5; ++col) {
            for (int row = 0; row < 7; ++row) {
                if (!(glyph[col] >> row & 1)) continue;
                for (int a = 0; a < scale; ++a) {
                    for (int b = 0; b < scale; ++b) {
                        // Baseline at y: glyph rows occupy [y - 7*scale, y).
                        const int u = offset + static_cast<int>(i) * advance + col * scale + a;
                        const int v = (row - 7) * scale + b;
                        if (vertical) {
                            plot(bx + v, by - u, color);
                        } else {
                            plot(bx + u, by + v, color);
                        }
                    }
                }
            }
        }
    }
}

std::string encode_png(const RasterCanvas& canvas) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(canvas.width());
    image.height = static_cast<png_uint_32>(canvas.height());
    image.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    const auto stride = static_cast<png_int_32>(canvas.width() * 3);
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, canvas.pixels().data(), stride, nullptr)) {
        throw Error(std::string("png encoding failed: ") + image.message);
    }
    std::string out(size, '\0');
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, canvas.pixels().data(), stride, nullptr)) {
        throw Error(std::string("png encoding failed: ") + image.message);
    }
    out.resize(size);
    return out;
}

}  // namespace lobviz
