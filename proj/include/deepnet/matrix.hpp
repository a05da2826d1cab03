#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace deepnet {

/// Dense row-major matrix of doubles. One row per training example
/// throughout the library.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class MatmulAlgo { naive, strassen, auto_select };

/// Matrix product. `strassen` pads to the next power of two and recurses
/// with seven block multiplications, falling back to the naive kernel
/// below a 64x64 cutoff; `auto_select` uses strassen only when every
/// dimension involved is at least 512.
Matrix matmul(const Matrix& a, const Matrix& b, MatmulAlgo algo = MatmulAlgo::auto_select);

Matrix transpose(const Matrix& a);

Matrix map(const Matrix& a, const std::function<double(double)>& f);
Matrix zip(const Matrix& a, const Matrix& b, const std::function<double(double, double)>& f);

/// Column means as a 1 x cols row vector.
Matrix col_means(const Matrix& a);

// Plumbing used by the training loops; shape-checked like zip.
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
void add_scaled_in_place(Matrix& a, const Matrix& b, double s);  // a += s*b
void scale_in_place(Matrix& a, double s);

/// Broadcast-add a 1 x cols row vector to every row of a.
Matrix add_row_broadcast(const Matrix& a, const Matrix& row);

/// Copy the selected rows of a, in the given order.
Matrix take_rows(const Matrix& a, std::span<const std::size_t> idx);

bool all_finite(const Matrix& a);

double frobenius_sq(const Matrix& a);

void require_same_shape(const Matrix& a, const Matrix& b, const char* op);

}  // namespace deepnet
