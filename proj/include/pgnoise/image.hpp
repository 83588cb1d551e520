#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pgnoise {

/// Row-major grayscale intensities. Immutable once constructed.
class ImageBuffer {
public:
    ImageBuffer() = default;
    /// Throws InvalidArgument if width or height is zero or data.size() != width * height.
    ImageBuffer(std::size_t width, std::size_t height, std::vector<double> data);

    static ImageBuffer filled(std::size_t width, std::size_t height, double value);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::span<const double> data() const noexcept { return data_; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }
    double at(std::size_t col, std::size_t row) const { return data_.at(row * width_ + col); }

    bool same_shape(const ImageBuffer& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> data_;
};

/// Where an image pair came from. All fields optional.
struct PairMeta {
    std::string source;
    std::optional<std::uint64_t> seed;
    std::optional<double> a;
    std::optional<double> b;
};

/// A pixel-aligned clean/noisy pair. Construction enforces equal shapes.
class ImagePair {
public:
    ImagePair(ImageBuffer clean, ImageBuffer noisy, PairMeta meta = {});

    const ImageBuffer& clean() const noexcept { return clean_; }
    const ImageBuffer& noisy() const noexcept { return noisy_; }
    const PairMeta& meta() const noexcept { return meta_; }
    std::size_t size() const noexcept { return clean_.size(); }

private:
    ImageBuffer clean_;
    ImageBuffer noisy_;
    PairMeta meta_;
};

enum class ColorMode {
    Reject,  ///< color input is an error
    Luma,    ///< ITU-R BT.601: 0.299 R + 0.587 G + 0.114 B
    Red,
    Green,
    Blue,
};

struct LoadOptions {
    /// Overrides the normalization divisor to 2^depth - 1 (e.g. 12-bit data in a 16-bit PGM).
    std::optional<int> bit_depth_hint;
    ColorMode color = ColorMode::Reject;
};

/// Reads a binary PGM (P5) or, with a color mode other than Reject, a binary PPM (P6).
/// Intensities are divided by the maxval (or 2^hint - 1) so that they lie in [0,1].
ImageBuffer load_image(const std::filesystem::path& path, const LoadOptions& opts = {});

/// Decodes an in-memory PNM stream. Same rules as load_image.
ImageBuffer decode_pnm(std::span<const std::uint8_t> bytes, const LoadOptions& opts = {});

/// Lossless float container: "PGFL", u32 width, u32 height, u32 reserved (all little-endian),
/// then width*height little-endian IEEE-754 doubles in row-major order.
void save_buffer(const ImageBuffer& buf, const std::filesystem::path& path);
ImageBuffer load_float(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_float(const ImageBuffer& buf);
ImageBuffer decode_float(std::span<const std::uint8_t> bytes);

/// 8-bit P5 export: values are clamped to [0,1] and quantized by round(v * 255).
void export_pgm8(const ImageBuffer& buf, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_pgm8(const ImageBuffer& buf);

/// Loads either container, picking by magic bytes.
ImageBuffer load_any(const std::filesystem::path& path, const LoadOptions& opts = {});

}  // namespace pgnoise
