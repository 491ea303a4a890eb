#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lobviz {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const Rgb&) const = default;
};

namespace colors {
inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kGrid{220, 220, 220};
inline constexpr Rgb kAxis{60, 60, 60};
inline constexpr Rgb kMidpoint{220, 20, 20};
inline constexpr Rgb kCumulative{31, 90, 200};
inline constexpr Rgb kBars{40, 160, 60};
inline constexpr Rgb kMessageBars{90, 140, 110};
inline constexpr Rgb kAskTotal{235, 110, 180};
inline constexpr Rgb kBidTotal{225, 190, 20};
inline constexpr Rgb kElapsed{70, 70, 70};
}  // namespace colors

/// Blue-to-yellow map; `t` is clamped to [0, 1].
Rgb heat_color(double t);

/// Position on the color map for `value` in [1, max] (or [0, max] linear).
double linear_scale(double value, double max);
double log_scale(double value, double max);

struct Point {
    double x = 0;
    double y = 0;
};

enum class Anchor { Start, Middle, End };

/// Minimal drawing surface shared by the SVG and raster back ends, so both
/// formats come from the same drawing code.
class Canvas {
public:
    virtual ~Canvas() = default;
    virtual void rect(double x, double y, double w, double h, Rgb fill) = 0;
    virtual void line(double x1, double y1, double x2, double y2, Rgb color, double width = 1.0) = 0;
    virtual void polyline(std::span<const Point> points, Rgb color, double width = 1.0) = 0;
    /// `size` is the cap height in pixels; `vertical` rotates 90 degrees
    /// counter-clockwise around (x, y).
    virtual void text(double x, double y, std::string_view s, Rgb color, Anchor anchor = Anchor::Start,
                      double size = 11.0, bool vertical = false) = 0;
    virtual int width() const = 0;
    virtual int height() const = 0;
};

/// Deterministic SVG writer; coordinates are printed with two decimals.
class SvgCanvas final : public Canvas {
public:
    SvgCanvas(int width, int height);
    void rect(double x, double y, double w, double h, Rgb fill) override;
    void line(double x1, double y1, double x2, double y2, Rgb color, double width) override;
    void polyline(std::span<const Point> points, Rgb color, double width) override;
    void text(double x, double y, std::string_view s, Rgb color, Anchor anchor, double size, bool vertical) override;
    int width() const override { return width_; }
    int height() const override { return height_; }
    std::string finish();

private:
    int width_;
    int height_;
    std::string body_;
};

/// 8-bit RGB raster with a built-in 5x7 bitmap font.
class RasterCanvas final : public Canvas {
public:
    RasterCanvas(int width, int height, Rgb background = colors::kWhite);
    void rect(double x, double y, double w, double h, Rgb fill) override;
    void line(double x1, double y1, double x2, double y2, Rgb color, double width) override;
    void polyline(std::span<const Point> points, Rgb color, double width) override;
    void text(double x, double y, std::string_view s, Rgb color, Anchor anchor, double size, bool vertical) override;
    int width() const override { return width_; }
    int height() const override { return height_; }

    Rgb pixel(int x, int y) const;
    const std::vector<std::uint8_t>& pixels() const { return pixels_; }

private:
    void plot(int x, int y, Rgb c);

    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

/// PNG bytes for an 8-bit RGB raster.
std::string encode_png(const RasterCanvas& canvas);

}  // namespace lobviz
