#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepnet/matrix.hpp"

namespace deepnet {

/// Supervised dataset: X holds one example per row with entries in
/// [0, 1], y the integer labels, Y their one-hot rows.
struct Dataset {
    Matrix X;
    std::vector<int> y;
    Matrix Y;

    std::size_t size() const { return X.rows(); }
    std::size_t n_classes() const { return Y.cols(); }
};

Dataset make_dataset(Matrix X, std::vector<int> y, std::size_t n_classes);

/// Raw images from an IDX file (big-endian header, magic 2051), pixel
/// bytes row-major.
struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;

    /// count x (rows*cols) matrix of byte values as doubles.
    Matrix to_matrix() const;
};

IdxImages load_idx_images(const std::string& path);
std::vector<int> load_idx_labels(const std::string& path);  // magic 2049

/// Label-first CSV: each row is `label,p0,...,p(n-1)` with pixel bytes
/// in [0, 255]. Pixels come back unnormalized.
struct CsvTable {
    std::vector<int> labels;
    Matrix pixels;
};

CsvTable load_csv(const std::string& path, bool has_header);

/// x / 255 elementwise; input entries must lie in [0, 255].
Matrix normalize_255(const Matrix& bytes);

/// Halve both image dimensions; with a factor of exactly 2 and
/// half-pixel centers the bilinear weights are uniform, so each output
/// pixel is the mean of its 2x2 source block.
Matrix bilinear_downsample_2x(const Matrix& image);

/// Apply bilinear_downsample_2x to every row of X, treating each row as
/// a rows x cols image.
Matrix downsample_rows_2x(const Matrix& X, std::size_t rows, std::size_t cols);

/// Shuffle with the given seed, then take the first n_train rows as the
/// training split and the next n_test as the test split.
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, std::size_t n_train,
                                             std::size_t n_test, std::uint64_t seed);

Matrix one_hot(const std::vector<int>& y, std::size_t n_classes);

}  // namespace deepnet
