#include "deepnet/data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "deepnet/errors.hpp"
#include "deepnet/rng.hpp"

namespace deepnet {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;  // 2051
constexpr std::uint32_t kLabelsMagic = 0x00000801;  // 2049

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                        const std::string& path) {
    if (offset + 4 > bytes.size()) {
        throw FormatError("'" + path + "': truncated at byte " + std::to_string(offset) +
                          ", expected 4 more header bytes");
    }
    return (std::uint32_t(bytes[offset]) << 24) | (std::uint32_t(bytes[offset + 1]) << 16) |
           (std::uint32_t(bytes[offset + 2]) << 8) | std::uint32_t(bytes[offset + 3]);
}

}  // namespace

Dataset make_dataset(Matrix X, std::vector<int> y, std::size_t n_classes) {
    if (X.rows() != y.size())
        throw ShapeError("make_dataset: " + std::to_string(X.rows()) + " examples but " +
                         std::to_string(y.size()) + " labels");
    for (double v : X.data())
        if (!(v >= 0.0 && v <= 1.0))
            throw ParamError("make_dataset: features must lie in [0, 1]");
    Dataset ds;
    ds.Y = one_hot(y, n_classes);
    ds.X = std::move(X);
    ds.y = std::move(y);
    return ds;
}

Matrix IdxImages::to_matrix() const {
    const std::size_t n = rows * cols;
    Matrix m(count, n);
    for (std::size_t i = 0; i < count * n; ++i) m.data()[i] = double(pixels[i]);
    return m;
}

IdxImages load_idx_images(const std::string& path) {
    auto bytes = read_file_bytes(path);
    const std::uint32_t magic = read_be32(bytes, 0, path);
    if (magic != kImagesMagic) {
        throw FormatError("'" + path + "': bad magic " + std::to_string(magic) +
                          ", expected " + std::to_string(kImagesMagic) + " (IDX images)");
    }
    IdxImages img;
    img.count = read_be32(bytes, 4, path);
    img.rows = read_be32(bytes, 8, path);
    img.cols = read_be32(bytes, 12, path);
    const std::size_t expected = 16 + img.count * img.rows * img.cols;
    if (bytes.size() < expected) {
        throw FormatError("'" + path + "': truncated at byte " +
                          std::to_string(bytes.size()) + ", header promises " +
                          std::to_string(expected) + " bytes");
    }
    img.pixels.assign(bytes.begin() + 16, bytes.begin() + std::ptrdiff_t(expected));
    return img;
}

std::vector<int> load_idx_labels(const std::string& path) {
    auto bytes = read_file_bytes(path);
    const std::uint32_t magic = read_be32(bytes, 0, path);
    if (magic != kLabelsMagic) {
        throw FormatError("'" + path + "': bad magic " + std::to_string(magic) +
                          ", expected " + std::to_string(kLabelsMagic) + " (IDX labels)");
    }
    const std::size_t count = read_be32(bytes, 4, path);
    const std::size_t expected = 8 + count;
    if (bytes.size() < expected) {
        throw FormatError("'" + path + "': truncated at byte " +
                          std::to_string(bytes.size()) + ", header promises " +
                          std::to_string(expected) + " bytes");
    }
    std::vector<int> labels(count);
    for (std::size_t i = 0; i < count; ++i) labels[i] = bytes[8 + i];
    return labels;
}

CsvTable load_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    if (has_header) {
        std::getline(in, line);
        ++lineno;
    }

    std::vector<int> labels;
    std::vector<double> pixels;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        std::size_t row_width = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            long value = 0;
            std::size_t consumed = 0;
            try {
                value = std::stol(cell, &consumed);
            } catch (const std::exception&) {
                consumed = std::string::npos;
            }
            if (consumed != cell.size() || cell.empty()) {
                throw FormatError("'" + path + "': non-integer cell '" + cell + "' at row " +
                                  std::to_string(lineno) + ", column " + std::to_string(col));
            }
            if (col == 1) {
                labels.push_back(int(value));
            } else {
                if (value < 0 || value > 255) {
                    throw FormatError("'" + path + "': pixel " + std::to_string(value) +
                                      " outside [0, 255] at row " + std::to_string(lineno) +
                                      ", column " + std::to_string(col));
                }
                pixels.push_back(double(value));
                ++row_width;
            }
        }
        if (width == 0) width = row_width;
        if (row_width != width) {
            throw FormatError("'" + path + "': ragged row " + std::to_string(lineno) +
                              " has " + std::to_string(row_width) + " pixels, expected " +
                              std::to_string(width));
        }
    }
    if (labels.empty()) throw FormatError("'" + path + "': no data rows");
    const std::size_t n = labels.size();
    return {std::move(labels), Matrix(n, width, std::move(pixels))};
}

Matrix normalize_255(const Matrix& bytes) {
    for (double v : bytes.data()) {
        if (!(v >= 0.0 && v <= 255.0))
            throw ParamError("normalize_255: value " + std::to_string(v) +
                             " outside [0, 255]");
    }
    return scale(bytes, 1.0 / 255.0);
}

Matrix bilinear_downsample_2x(const Matrix& image) {
    if (image.rows() % 2 != 0 || image.cols() % 2 != 0) {
        throw ParamError("bilinear_downsample_2x: dimensions " +
                         std::to_string(image.rows()) + "x" + std::to_string(image.cols()) +
                         " must be even");
    }
    Matrix out(image.rows() / 2, image.cols() / 2);
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j)
            out(i, j) = 0.25 * (image(2 * i, 2 * j) + image(2 * i, 2 * j + 1) +
                                image(2 * i + 1, 2 * j) + image(2 * i + 1, 2 * j + 1));
    return out;
}

Matrix downsample_rows_2x(const Matrix& X, std::size_t rows, std::size_t cols) {
    if (rows * cols != X.cols())
        throw ShapeError("downsample_rows_2x: row length " + std::to_string(X.cols()) +
                         " != " + std::to_string(rows) + "*" + std::to_string(cols));
    Matrix out(X.rows(), (rows / 2) * (cols / 2));
    for (std::size_t r = 0; r < X.rows(); ++r) {
        Matrix img(rows, cols,
                   std::vector<double>(X.row(r).begin(), X.row(r).end()));
        Matrix small = bilinear_downsample_2x(img);
        std::copy(small.data().begin(), small.data().end(), out.row(r).begin());
    }
    return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, std::size_t n_train,
                                             std::size_t n_test, std::uint64_t seed) {
    if (n_train + n_test > ds.size()) {
        throw ParamError("train_test_split: " + std::to_string(n_train) + "+" +
                         std::to_string(n_test) + " rows requested from " +
                         std::to_string(ds.size()));
    }
    Rng rng(seed);
    auto order = rng.permutation(ds.size());
    auto slice = [&](std::size_t begin, std::size_t len) {
        std::span<const std::size_t> idx(order.data() + begin, len);
        std::vector<int> y(len);
        for (std::size_t i = 0; i < len; ++i) y[i] = ds.y[idx[i]];
        Dataset out;
        out.X = take_rows(ds.X, idx);
        out.Y = take_rows(ds.Y, idx);
        out.y = std::move(y);
        return out;
    };
    return {slice(0, n_train), slice(n_train, n_test)};
}

Matrix one_hot(const std::vector<int>& y, std::size_t n_classes) {
    Matrix Y(y.size(), n_classes);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0 || std::size_t(y[i]) >= n_classes) {
            throw ParamError("one_hot: label " + std::to_string(y[i]) + " outside [0, " +
                             std::to_string(n_classes) + ")");
        }
        Y(i, std::size_t(y[i])) = 1.0;
    }
    return Y;
}

}  // namespace deepnet
