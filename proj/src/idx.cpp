#include "resist/idx.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace resist {

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw std::runtime_error("truncated IDX file: " + path);
    return (static_cast<std::uint32_t>(buf[0]) << 24) | (static_cast<std::uint32_t>(buf[1]) << 16) |
           (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) throw std::runtime_error("cannot open IDX file: " + images_path);
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) throw std::runtime_error("cannot open IDX file: " + labels_path);

    if (read_be32(images, images_path) != 0x00000803u)
        throw std::runtime_error("bad magic in IDX image file: " + images_path);
    const std::uint32_t image_count = read_be32(images, images_path);
    const std::uint32_t rows = read_be32(images, images_path);
    const std::uint32_t cols = read_be32(images, images_path);

    if (read_be32(labels, labels_path) != 0x00000801u)
        throw std::runtime_error("bad magic in IDX label file: " + labels_path);
    const std::uint32_t label_count = read_be32(labels, labels_path);

    if (image_count != label_count)
        throw std::runtime_error("IDX image/label count mismatch: " + std::to_string(image_count) +
                                 " images vs " + std::to_string(label_count) + " labels");

    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    Dataset data;
    data.label_count = 10;
    std::vector<unsigned char> buf(pixels);
    for (std::uint32_t i = 0; i < image_count; ++i) {
        if (!images.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels)))
            throw std::runtime_error("truncated IDX file: " + images_path);
        std::vector<double> x(pixels);
        for (std::size_t p = 0; p < pixels; ++p) x[p] = static_cast<double>(buf[p]) / 255.0;
        data.features.push_back(std::move(x));
        char y;
        if (!labels.get(y)) throw std::runtime_error("truncated IDX file: " + labels_path);
        data.labels.push_back(static_cast<unsigned char>(y));
    }
    return data;
}

}  // namespace resist
