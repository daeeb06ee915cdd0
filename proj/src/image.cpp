// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#include "olat/image.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <png.h>

#include "atomic_file.hpp"

namespace olat {

namespace {

constexpr std::size_t kMaxValues = std::size_t(1) << 30;

void check_dims(int width, int height)
{
    if (width < 1 || height < 1)
        fail(ErrorCode::InvalidArgument, "image dims must be >= 1x1");
    if (std::size_t(width) * std::size_t(height) * 3 > kMaxValues)
        fail(ErrorCode::InvalidArgument, "image dims overflow");
}

} // namespace

ImageF::ImageF(int width, int height, double fill)
    : width_(width), height_(height)
{
    check_dims(width, height);
    data_.assign(value_count(), fill);
}

ImageF::ImageF(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data))
{
    check_dims(width, height);
    if (data_.size() != value_count())
        fail(ErrorCode::InvalidArgument, "image data length != width*height*3");
}

MaskImage::MaskImage(int width, int height, double fill)
    : width_(width), height_(height)
{
    check_dims(width, height);
    data_.assign(std::size_t(width) * height, std::clamp(fill, 0.0, 1.0));
}

MaskImage::MaskImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data))
{
    check_dims(width, height);
    if (data_.size() != std::size_t(width) * height)
        fail(ErrorCode::InvalidArgument, "mask data length != width*height");
    clamp_values();
}

void MaskImage::clamp_values()
{
    for (double& v : data_) {
        if (!std::isfinite(v))
            fail(ErrorCode::InvalidArgument, "non-finite mask value");
        v = std::clamp(v, 0.0, 1.0);
    }
}

namespace diag {

namespace {
std::atomic<std::uint64_t> g_negative{0};
std::atomic<std::uint64_t> g_over_range{0};
} // namespace

std::uint64_t negative_clamp_count() { return g_negative.load(); }
std::uint64_t over_range_clamp_count() { return g_over_range.load(); }
void reset_counters()
{
    g_negative.store(0);
    g_over_range.store(0);
}
void add_negative_clamps(std::uint64_t n) { g_negative.fetch_add(n); }
void add_over_range_clamps(std::uint64_t n) { g_over_range.fetch_add(n); }

} // namespace diag

// ---------------------------------------------------------------------------
// PFM
// ---------------------------------------------------------------------------

namespace {

std::string read_pfm_token(std::istream& in)
{
    std::string tok;
    char c;
    while (in.get(c)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty())
                return tok;
        } else {
            tok.push_back(c);
        }
    }
    return tok;
}

float byteswap_float(float v)
{
    auto bits = std::bit_cast<std::uint32_t>(v);
    bits = __builtin_bswap32(bits);
    return std::bit_cast<float>(bits);
}

constexpr bool host_is_little_endian()
{
    return std::endian::native == std::endian::little;
}

struct PfmPayload {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> samples; // top row first, interleaved
};

PfmPayload load_pfm(std::istream& in, const std::string& path)
{
    const std::string magic = read_pfm_token(in);
    const bool color = (magic == "PF");
    if (!color && magic != "Pf")
        fail(ErrorCode::Format, path + ": not a PFM file");

    int width = 0, height = 0;
    double scale = 0.0;
    try {
        width = std::stoi(read_pfm_token(in));
        height = std::stoi(read_pfm_token(in));
        scale = std::stod(read_pfm_token(in));
    } catch (const std::exception&) {
        fail(ErrorCode::Format, path + ": malformed PFM header");
    }
    check_dims(width, height);
    if (scale == 0.0)
        fail(ErrorCode::Format, path + ": PFM scale must be nonzero");
    const bool file_little = scale < 0.0;

    const int channels = color ? 3 : 1;
    const std::size_t count = std::size_t(width) * height * channels;
    std::vector<float> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()),
            std::streamsize(count * sizeof(float)));
    if (std::size_t(in.gcount()) != count * sizeof(float))
        fail(ErrorCode::Format, path + ": truncated PFM payload");

    if (file_little != host_is_little_endian())
        for (float& v : raw)
            v = byteswap_float(v);

    // Rows are stored bottom-to-top; flip into top-first order.
    PfmPayload out;
    out.width = width;
    out.height = height;
    out.channels = channels;
    out.samples.resize(count);
    const std::size_t row = std::size_t(width) * channels;
    for (int y = 0; y < height; ++y)
        std::memcpy(out.samples.data() + std::size_t(y) * row,
                    raw.data() + std::size_t(height - 1 - y) * row,
                    row * sizeof(float));
    return out;
}

std::string encode_pfm(const float* samples, int width, int height, int channels)
{
    std::ostringstream head;
    head << (channels == 3 ? "PF" : "Pf") << "\n"
         << width << " " << height << "\n"
         << "-1.0\n";
    std::string bytes = head.str();
    const std::size_t row = std::size_t(width) * channels;
    std::vector<float> scratch;
    for (int y = height - 1; y >= 0; --y) {
        const float* src = samples + std::size_t(y) * row;
        if (host_is_little_endian()) {
            bytes.append(reinterpret_cast<const char*>(src), row * sizeof(float));
        } else {
            scratch.assign(src, src + row);
            for (float& v : scratch)
                v = byteswap_float(v);
            bytes.append(reinterpret_cast<const char*>(scratch.data()),
                         row * sizeof(float));
        }
    }
    return bytes;
}

// ---------------------------------------------------------------------------
// PNG (libpng simplified API)
// ---------------------------------------------------------------------------

struct PngPayload {
    int width = 0;
    int height = 0;
    bool has_alpha = false;
    std::vector<std::uint8_t> rgba;
};

PngPayload load_png(const std::string& path)
{
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        fail(ErrorCode::Format, path + ": " + image.message);
    const bool has_alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    image.format = PNG_FORMAT_RGBA;
    check_dims(int(image.width), int(image.height));

    PngPayload out;
    out.width = int(image.width);
    out.height = int(image.height);
    out.has_alpha = has_alpha;
    out.rgba.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.rgba.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        fail(ErrorCode::Format, path + ": " + msg);
    }
    return out;
}

void save_png(const ImageF& img, const std::string& path)
{
    std::vector<std::uint8_t> rgb(img.value_count());
    const double* src = img.data();
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        const double v = std::clamp(src[i], 0.0, 1.0);
        rgb[i] = std::uint8_t(std::floor(v * 255.0 + 0.5));
    }

    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = png_uint_32(img.width());
    image.height = png_uint_32(img.height());
    image.format = PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(image, size, 0, rgb.data(), 0, nullptr))
        fail(ErrorCode::Io, path + ": " + image.message);
    std::string bytes(size, '\0');
    if (!png_image_write_to_memory(&image, bytes.data(), &size, 0, rgb.data(), 0,
                                   nullptr))
        fail(ErrorCode::Io, path + ": " + image.message);
    bytes.resize(size);
    detail::atomic_write_file(path, bytes);
}

bool has_png_signature(const unsigned char* bytes, std::size_t n)
{
    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return n >= 8 && std::memcmp(bytes, sig, 8) == 0;
}

enum class FileKind { Pfm, Png };

FileKind sniff_format(const std::string& path, std::ifstream& in)
{
    unsigned char head[8] = {};
    in.read(reinterpret_cast<char*>(head), 8);
    const std::size_t got = std::size_t(in.gcount());
    if (got < 2)
        fail(ErrorCode::Format, path + ": file too short");
    in.clear();
    in.seekg(0);
    if (head[0] == 'P' && (head[1] == 'F' || head[1] == 'f'))
        return FileKind::Pfm;
    if (has_png_signature(head, got))
        return FileKind::Png;
    fail(ErrorCode::Format, path + ": unsupported format (want PFM or PNG)");
}

void scrub_loaded_values(std::vector<double>& vals, const std::string& path)
{
    std::uint64_t negatives = 0;
    for (double& v : vals) {
        if (!std::isfinite(v))
            fail(ErrorCode::Format, path + ": non-finite pixel value");
        if (v < 0.0) {
            v = 0.0;
            ++negatives;
        }
    }
    if (negatives)
        diag::add_negative_clamps(negatives);
}

} // namespace

ImageF load_image(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::Io, "cannot open: " + path);
    switch (sniff_format(path, in)) {
    case FileKind::Pfm: {
        PfmPayload pfm = load_pfm(in, path);
        std::vector<double> vals(std::size_t(pfm.width) * pfm.height * 3);
        if (pfm.channels == 3) {
            for (std::size_t i = 0; i < vals.size(); ++i)
                vals[i] = pfm.samples[i];
        } else {
            for (std::size_t i = 0; i < pfm.samples.size(); ++i)
                vals[i * 3] = vals[i * 3 + 1] = vals[i * 3 + 2] = pfm.samples[i];
        }
        scrub_loaded_values(vals, path);
        return ImageF(pfm.width, pfm.height, std::move(vals));
    }
    case FileKind::Png: {
        in.close();
        PngPayload png = load_png(path);
        std::vector<double> vals(std::size_t(png.width) * png.height * 3);
        for (std::size_t p = 0; p < vals.size() / 3; ++p)
            for (int c = 0; c < 3; ++c)
                vals[p * 3 + c] = png.rgba[p * 4 + c] / 255.0;
        return ImageF(png.width, png.height, std::move(vals));
    }
    }
    fail(ErrorCode::Format, path + ": unreachable");
}

MaskImage load_mask(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::Io, "cannot open: " + path);
    switch (sniff_format(path, in)) {
    case FileKind::Pfm: {
        PfmPayload pfm = load_pfm(in, path);
        std::vector<double> vals(std::size_t(pfm.width) * pfm.height);
        if (pfm.channels == 1) {
            for (std::size_t i = 0; i < vals.size(); ++i)
                vals[i] = pfm.samples[i];
        } else {
            for (std::size_t i = 0; i < vals.size(); ++i)
                vals[i] = (pfm.samples[i * 3] + pfm.samples[i * 3 + 1] +
                           pfm.samples[i * 3 + 2]) / 3.0;
        }
        return MaskImage(pfm.width, pfm.height, std::move(vals));
    }
    case FileKind::Png: {
        in.close();
        PngPayload png = load_png(path);
        std::vector<double> vals(std::size_t(png.width) * png.height);
        for (std::size_t p = 0; p < vals.size(); ++p) {
            if (png.has_alpha)
                vals[p] = png.rgba[p * 4 + 3] / 255.0;
            else
                vals[p] = (png.rgba[p * 4] + png.rgba[p * 4 + 1] +
                           png.rgba[p * 4 + 2]) / (3.0 * 255.0);
        }
        return MaskImage(png.width, png.height, std::move(vals));
    }
    }
    fail(ErrorCode::Format, path + ": unreachable");
}

namespace {

bool wants_png(const std::string& path)
{
    const auto ext = std::filesystem::path(path).extension().string();
    std::string lower;
    for (char c : ext)
        lower.push_back(char(std::tolower(static_cast<unsigned char>(c))));
    return lower == ".png";
}

} // namespace

void save_image(const ImageF& img, const std::string& path)
{
    if (img.width() < 1)
        fail(ErrorCode::InvalidArgument, "cannot save empty image");
    if (wants_png(path)) {
        save_png(img, path);
        return;
    }
    std::vector<float> f(img.value_count());
    const double* src = img.data();
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = float(src[i]);
    detail::atomic_write_file(path,
                              encode_pfm(f.data(), img.width(), img.height(), 3));
}

void save_mask(const MaskImage& mask, const std::string& path)
{
    if (mask.width() < 1)
        fail(ErrorCode::InvalidArgument, "cannot save empty mask");
    if (wants_png(path)) {
        ImageF rgb(mask.width(), mask.height());
        for (int y = 0; y < mask.height(); ++y)
            for (int x = 0; x < mask.width(); ++x)
                for (int c = 0; c < 3; ++c)
                    rgb.at(x, y, c) = mask.at(x, y);
        save_png(rgb, path);
        return;
    }
    std::vector<float> f(mask.values().size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = float(mask.values()[i]);
    detail::atomic_write_file(
        path, encode_pfm(f.data(), mask.width(), mask.height(), 1));
}

double bilinear_sample(const ImageF& img, double x, double y, int c)
{
    // Continuous -> index space (pixel centers at integers).
    const double ix = x - 0.5;
    const double iy = y - 0.5;
    const double fx = std::floor(ix);
    const double fy = std::floor(iy);
    const double tx = ix - fx;
    const double ty = iy - fy;
    const int x0 = std::clamp(int(fx), 0, img.width() - 1);
    const int x1 = std::clamp(int(fx) + 1, 0, img.width() - 1);
    const int y0 = std::clamp(int(fy), 0, img.height() - 1);
    const int y1 = std::clamp(int(fy) + 1, 0, img.height() - 1);
    const double a = img.at(x0, y0, c) * (1.0 - tx) + img.at(x1, y0, c) * tx;
    const double b = img.at(x0, y1, c) * (1.0 - tx) + img.at(x1, y1, c) * tx;
    return a * (1.0 - ty) + b * ty;
}

ImageF pad_and_resize(const ImageF& img, ImageDims target)
{
    if (target.width < 1 || target.height < 1)
        fail(ErrorCode::InvalidArgument, "pad_and_resize target must be >= 1x1");

    // Smallest canvas with the target aspect ratio containing the input.
    const int g = std::gcd(target.width, target.height);
    const std::int64_t wu = target.width / g;
    const std::int64_t hu = target.height / g;
    const std::int64_t k =
        std::max((img.width() + wu - 1) / wu, (img.height() + hu - 1) / hu);
    const int cw = int(k * wu);
    const int ch = int(k * hu);
    const int xoff = (cw - img.width()) / 2;
    const int yoff = (ch - img.height()) / 2;

    ImageF canvas(cw, ch, 0.0);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < 3; ++c)
                canvas.at(x + xoff, y + yoff, c) = img.at(x, y, c);

    ImageF out(target.width, target.height);
    const double sx = double(cw) / target.width;
    const double sy = double(ch) / target.height;
    for (int y = 0; y < target.height; ++y)
        for (int x = 0; x < target.width; ++x)
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) =
                    bilinear_sample(canvas, (x + 0.5) * sx, (y + 0.5) * sy, c);
    return out;
}

ImageF apply_mask(const ImageF& img, const MaskImage& mask)
{
    if (img.dims() != mask.dims())
        fail(ErrorCode::DimensionMismatch, "apply_mask: dims differ");
    ImageF out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const double m = mask.at(x, y);
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = img.at(x, y, c) * m;
        }
    return out;
}

double mask_mass(const MaskImage& mask)
{
    double sum = 0.0;
    for (double v : mask.values())
        sum += v;
    return sum;
}

} // namespace olat
