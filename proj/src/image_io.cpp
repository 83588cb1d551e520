#include "pgnoise/image.hpp"

#include "pgnoise/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>

namespace pgnoise {

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width_ == 0 || height_ == 0)
        throw InvalidArgument("image dimensions must be positive");
    if (data_.size() != width_ * height_)
        throw InvalidArgument("image data length does not match width * height");
}

ImageBuffer ImageBuffer::filled(std::size_t width, std::size_t height, double value) {
    return ImageBuffer(width, height, std::vector<double>(width * height, value));
}

ImagePair::ImagePair(ImageBuffer clean, ImageBuffer noisy, PairMeta meta)
    : clean_(std::move(clean)), noisy_(std::move(noisy)), meta_(std::move(meta)) {
    if (!clean_.same_shape(noisy_))
        throw InvalidArgument("clean and noisy images differ in shape");
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failed for " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

// Minimal tokenizer for the PNM header: whitespace separated, '#' comments to end of line.
class PnmHeader {
public:
    explicit PnmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    unsigned long next_uint() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
            throw FormatError("malformed PNM header");
        unsigned long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 0xFFFFFFFFul)
                throw FormatError("PNM header value out of range");
            ++pos_;
        }
        return v;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw FormatError("malformed PNM header");
        return pos_ + 1;
    }

    void skip(std::size_t n) { pos_ += n; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32le(std::span<const std::uint8_t> in, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(in[off + i]) << (8 * i);
    return v;
}

constexpr std::size_t kFloatHeader = 16;

}  // namespace

ImageBuffer decode_pnm(std::span<const std::uint8_t> bytes, const LoadOptions& opts) {
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw FormatError("not a PNM stream");
    const char kind = static_cast<char>(bytes[1]);
    if (kind != '5' && kind != '6')
        throw FormatError(std::string("unsupported PNM variant P") + kind);
    const bool color = kind == '6';
    if (color && opts.color == ColorMode::Reject)
        throw FormatError("color image requires a luma or channel conversion mode");

    PnmHeader header(bytes);
    header.skip(2);
    const auto width = header.next_uint();
    const auto height = header.next_uint();
    const auto maxval = header.next_uint();
    if (width == 0 || height == 0)
        throw FormatError("PNM image has zero size");
    if (maxval == 0 || maxval > 65535)
        throw FormatError("PNM maxval must be in [1, 65535]");
    const std::size_t offset = header.raster_offset();

    double scale = static_cast<double>(maxval);
    if (opts.bit_depth_hint) {
        const int depth = *opts.bit_depth_hint;
        if (depth < 1 || depth > 16)
            throw InvalidArgument("bit depth hint must be in [1, 16]");
        const unsigned long hinted = (1ul << depth) - 1;
        if (hinted < maxval)
            throw FormatError("bit depth hint is smaller than the file's maxval");
        scale = static_cast<double>(hinted);
    }

    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    const std::size_t channels = color ? 3 : 1;
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (bytes.size() < offset + n * channels * sample_bytes)
        throw FormatError("PNM raster is truncated");

    auto sample = [&](std::size_t idx) -> double {
        const std::size_t p = offset + idx * sample_bytes;
        // 16-bit PNM samples are big-endian.
        const unsigned v = sample_bytes == 2 ? (unsigned(bytes[p]) << 8) | bytes[p + 1] : bytes[p];
        if (v > maxval)
            throw FormatError("PNM sample exceeds maxval");
        return static_cast<double>(v) / scale;
    };

    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!color) {
            data[i] = sample(i);
            continue;
        }
        const double r = sample(3 * i), g = sample(3 * i + 1), b = sample(3 * i + 2);
        switch (opts.color) {
        case ColorMode::Luma: data[i] = std::clamp(luma(r, g, b), 0.0, 1.0); break;
        case ColorMode::Red: data[i] = r; break;
        case ColorMode::Green: data[i] = g; break;
        case ColorMode::Blue: data[i] = b; break;
        case ColorMode::Reject: break;
        }
    }
    return ImageBuffer(width, height, std::move(data));
}

ImageBuffer load_image(const std::filesystem::path& path, const LoadOptions& opts) {
    const auto bytes = read_file(path);
    return decode_pnm(bytes, opts);
}

std::vector<std::uint8_t> encode_float(const ImageBuffer& buf) {
    if (buf.width() > 0xFFFFFFFFu || buf.height() > 0xFFFFFFFFu)
        throw InvalidArgument("image too large for the float container");
    std::vector<std::uint8_t> out;
    out.reserve(kFloatHeader + 8 * buf.size());
    for (char c : {'P', 'G', 'F', 'L'})
        out.push_back(static_cast<std::uint8_t>(c));
    put_u32le(out, static_cast<std::uint32_t>(buf.width()));
    put_u32le(out, static_cast<std::uint32_t>(buf.height()));
    put_u32le(out, 0);
    for (double v : buf.data()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i)
            out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    return out;
}

ImageBuffer decode_float(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFloatHeader || std::memcmp(bytes.data(), "PGFL", 4) != 0)
        throw FormatError("not a float image container");
    const std::size_t width = get_u32le(bytes, 4);
    const std::size_t height = get_u32le(bytes, 8);
    if (width == 0 || height == 0)
        throw FormatError("float container has zero size");
    const std::size_t n = width * height;
    if (bytes.size() != kFloatHeader + 8 * n)
        throw FormatError("float container length does not match its header");
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits = 0;
        const std::size_t p = kFloatHeader + 8 * i;
        for (int k = 0; k < 8; ++k)
            bits |= static_cast<std::uint64_t>(bytes[p + k]) << (8 * k);
        data[i] = std::bit_cast<double>(bits);
    }
    return ImageBuffer(width, height, std::move(data));
}

void save_buffer(const ImageBuffer& buf, const std::filesystem::path& path) {
    write_file(path, encode_float(buf));
}

ImageBuffer load_float(const std::filesystem::path& path) { return decode_float(read_file(path)); }

std::vector<std::uint8_t> encode_pgm8(const ImageBuffer& buf) {
    const std::string header =
        "P5\n" + std::to_string(buf.width()) + " " + std::to_string(buf.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + buf.size());
    for (double v : buf.data()) {
        const double c = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
        out.push_back(static_cast<std::uint8_t>(std::lround(c * 255.0)));
    }
    return out;
}

void export_pgm8(const ImageBuffer& buf, const std::filesystem::path& path) {
    write_file(path, encode_pgm8(buf));
}

ImageBuffer load_any(const std::filesystem::path& path, const LoadOptions& opts) {
    const auto bytes = read_file(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), "PGFL", 4) == 0)
        return decode_float(bytes);
    return decode_pnm(bytes, opts);
}

}  // namespace pgnoise
