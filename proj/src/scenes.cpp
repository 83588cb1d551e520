#include "pgnoise/scenes.hpp"

#include "pgnoise/error.hpp"
#include "pgnoise/philox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace pgnoise {

namespace {

// Bilinear lattice noise with smoothstep weights.
class ValueNoise {
public:
    ValueNoise(std::size_t cells_x, std::size_t cells_y, PhiloxStream& rng)
        : nx_(cells_x + 1), ny_(cells_y + 1), lattice_(nx_ * ny_) {
        for (auto& v : lattice_)
            v = rng.uniform();
    }

    // u, v in [0,1]
    double operator()(double u, double v) const {
        const double fx = u * static_cast<double>(nx_ - 1);
        const double fy = v * static_cast<double>(ny_ - 1);
        const auto ix = std::min(static_cast<std::size_t>(fx), nx_ - 2);
        const auto iy = std::min(static_cast<std::size_t>(fy), ny_ - 2);
        const double tx = smooth(fx - static_cast<double>(ix));
        const double ty = smooth(fy - static_cast<double>(iy));
        const double v00 = lattice_[iy * nx_ + ix], v10 = lattice_[iy * nx_ + ix + 1];
        const double v01 = lattice_[(iy + 1) * nx_ + ix], v11 = lattice_[(iy + 1) * nx_ + ix + 1];
        return (v00 * (1 - tx) + v10 * tx) * (1 - ty) + (v01 * (1 - tx) + v11 * tx) * ty;
    }

private:
    static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

    std::size_t nx_, ny_;
    std::vector<double> lattice_;
};

struct Shape {
    bool ellipse;
    double cx, cy, rx, ry, angle;
    double level;
    double shade;  // linear shading across the shape
};

}  // namespace

ImageBuffer generate_scene(std::size_t width, std::size_t height, std::uint64_t seed) {
    if (width < 2 || height < 2)
        throw InvalidArgument("scene must be at least 2x2");
    PhiloxStream rng(seed, 0x5CE7E, 0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };

    const double grad_angle = uni(0.0, 2.0 * std::numbers::pi);
    const double grad_strength = uni(0.2, 0.5);
    const double base = uni(0.25, 0.6);

    std::vector<ValueNoise> octaves;
    std::vector<double> amplitudes;
    for (std::size_t o = 0, cells = 3; o < 5; ++o, cells *= 2) {
        octaves.emplace_back(cells, cells, rng);
        amplitudes.push_back(0.35 / std::pow(1.9, static_cast<double>(o)));
    }

    const auto n_shapes = static_cast<std::size_t>(uni(6.0, 14.0));
    std::vector<Shape> shapes;
    for (std::size_t s = 0; s < n_shapes; ++s) {
        Shape sh;
        sh.ellipse = rng.uniform() < 0.6;
        sh.cx = uni(0.0, 1.0);
        sh.cy = uni(0.0, 1.0);
        sh.rx = uni(0.04, 0.3);
        sh.ry = uni(0.04, 0.3);
        sh.angle = uni(0.0, std::numbers::pi);
        sh.level = uni(0.0, 1.0);
        sh.shade = uni(-0.3, 0.3);
        shapes.push_back(sh);
    }

    std::vector<double> data(width * height);
    const double gx = std::cos(grad_angle), gy = std::sin(grad_angle);
    for (std::size_t row = 0; row < height; ++row) {
        const double v = static_cast<double>(row) / static_cast<double>(height - 1);
        for (std::size_t col = 0; col < width; ++col) {
            const double u = static_cast<double>(col) / static_cast<double>(width - 1);
            double value = base + grad_strength * ((u - 0.5) * gx + (v - 0.5) * gy);
            for (std::size_t o = 0; o < octaves.size(); ++o)
                value += amplitudes[o] * (octaves[o](u, v) - 0.5);
            for (const auto& sh : shapes) {
                const double dx = u - sh.cx, dy = v - sh.cy;
                const double c = std::cos(sh.angle), s = std::sin(sh.angle);
                const double lx = (dx * c + dy * s) / sh.rx;
                const double ly = (-dx * s + dy * c) / sh.ry;
                const bool inside = sh.ellipse ? lx * lx + ly * ly <= 1.0
                                               : std::fabs(lx) <= 1.0 && std::fabs(ly) <= 1.0;
                if (inside)
                    value = sh.level + sh.shade * 0.5 * lx + 0.15 * (octaves[3](u, v) - 0.5);
            }
            data[row * width + col] = std::round(std::clamp(value, 0.0, 1.0) * 255.0) / 255.0;
        }
    }
    return ImageBuffer(width, height, std::move(data));
}

}  // namespace pgnoise
