#include "advdir/idx_io.hpp"

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "advdir/errors.hpp"

namespace advdir {

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t off,
                   const std::string& what) {
    if (off + 4 > b.size())
        throw FormatError(what + ": truncated header at offset " +
                          std::to_string(off));
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

std::string hex32(std::uint32_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s = "0x";
    for (int shift = 28; shift >= 0; shift -= 4)
        s += digits[(v >> shift) & 0xf];
    return s;
}

}  // namespace

LabeledDataset read_idx(const std::string& images_path,
                        const std::string& labels_path) {
    const auto img = read_file(images_path);
    const auto lab = read_file(labels_path);

    const std::uint32_t img_magic = be32(img, 0, "images");
    if (img_magic != 0x00000803u)
        throw FormatError("images: bad magic " + hex32(img_magic) +
                          " at offset 0 (want 0x00000803)");
    const std::uint32_t count = be32(img, 4, "images");
    const std::uint32_t rows = be32(img, 8, "images");
    const std::uint32_t cols = be32(img, 12, "images");
    const std::size_t dim = std::size_t(rows) * cols;
    if (count > 0 && dim == 0)
        throw FormatError("images: zero-sized images (rows*cols = 0) at offset 8");
    const std::size_t want_img = 16 + std::size_t(count) * dim;
    if (img.size() != want_img)
        throw FormatError("images: payload size mismatch, want " +
                          std::to_string(want_img) + " bytes, file has " +
                          std::to_string(img.size()) +
                          " (payload begins at offset 16)");

    const std::uint32_t lab_magic = be32(lab, 0, "labels");
    if (lab_magic != 0x00000801u)
        throw FormatError("labels: bad magic " + hex32(lab_magic) +
                          " at offset 0 (want 0x00000801)");
    const std::uint32_t lab_count = be32(lab, 4, "labels");
    if (lab_count != count)
        throw FormatError("labels: count " + std::to_string(lab_count) +
                          " != image count " + std::to_string(count));
    const std::size_t want_lab = 8 + std::size_t(count);
    if (lab.size() != want_lab)
        throw FormatError("labels: payload size mismatch, want " +
                          std::to_string(want_lab) + " bytes, file has " +
                          std::to_string(lab.size()) +
                          " (payload begins at offset 8)");

    std::vector<Vec> points;
    std::vector<int> labels;
    points.reserve(count);
    labels.reserve(count);
    int max_label = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        Vec x(dim);
        const std::size_t base = 16 + std::size_t(i) * dim;
        for (std::size_t j = 0; j < dim; ++j) x[j] = img[base + j] / 255.0;
        points.push_back(std::move(x));
        const int l = int(lab[8 + i]) + 1;
        labels.push_back(l);
        max_label = std::max(max_label, l);
    }
    // ten classes for digit data even when some digits are absent
    const int class_count = std::max(10, max_label);
    return LabeledDataset(dim, std::move(points), std::move(labels),
                          LabelKind::Multiclass, class_count);
}

}  // namespace advdir
