#include "deepnet/matrix.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "deepnet/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace deepnet {

namespace {

std::string shape_str(const Matrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("ragged initializer for matrix");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                         shape_str(b));
    }
}

namespace {

// c += a*b on raw row-major buffers; ikj order keeps the inner loop
// contiguous in both b and c. Each output row is owned by one thread,
// so results are identical for any thread count.
void matmul_accumulate(const double* a, const double* b, double* c, std::size_t n,
                       std::size_t k, std::size_t m) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n * k * m > 262144)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * k;
        double* crow = c + static_cast<std::size_t>(i) * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = arow[p];
            const double* brow = b + p * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += aip * brow[j];
        }
    }
}

// serial variant for strassen leaves, which already run inside tasks
void matmul_accumulate_serial(const double* a, const double* b, double* c, std::size_t n,
                              std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = arow[p];
            const double* brow = b + p * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += aip * brow[j];
        }
    }
}

Matrix matmul_naive(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    matmul_accumulate(a.data().data(), b.data().data(), c.data().data(), a.rows(), a.cols(),
                      b.cols());
    return c;
}

constexpr std::size_t kStrassenCutoff = 64;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Square power-of-two matrices stored as contiguous n*n buffers.
using Block = std::vector<double>;

void block_add(const Block& x, const Block& y, Block& out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
}

void block_sub(const Block& x, const Block& y, Block& out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
}

void split(const Block& x, std::size_t n, Block& q11, Block& q12, Block& q21, Block& q22) {
    const std::size_t h = n / 2;
    for (std::size_t i = 0; i < h; ++i) {
        const double* top = x.data() + i * n;
        const double* bot = x.data() + (i + h) * n;
        for (std::size_t j = 0; j < h; ++j) {
            q11[i * h + j] = top[j];
            q12[i * h + j] = top[j + h];
            q21[i * h + j] = bot[j];
            q22[i * h + j] = bot[j + h];
        }
    }
}

void strassen_rec(const Block& a, const Block& b, Block& c, std::size_t n, int depth) {
    if (n <= kStrassenCutoff) {
        std::fill(c.begin(), c.end(), 0.0);
        matmul_accumulate_serial(a.data(), b.data(), c.data(), n, n, n);
        return;
    }
    const std::size_t h = n / 2;
    const std::size_t hs = h * h;
    Block a11(hs), a12(hs), a21(hs), a22(hs);
    Block b11(hs), b12(hs), b21(hs), b22(hs);
    split(a, n, a11, a12, a21, a22);
    split(b, n, b11, b12, b21, b22);

    std::vector<Block> m(7, Block(hs));
    // The seven products; left/right operands per Strassen's scheme.
    auto compute = [&](int which) {
        Block l(hs), r(hs);
        switch (which) {
            case 0: block_add(a11, a22, l); block_add(b11, b22, r); break;
            case 1: block_add(a21, a22, l); r = b11; break;
            case 2: l = a11; block_sub(b12, b22, r); break;
            case 3: l = a22; block_sub(b21, b11, r); break;
            case 4: block_add(a11, a12, l); r = b22; break;
            case 5: block_sub(a21, a11, l); block_add(b11, b12, r); break;
            case 6: block_sub(a12, a22, l); block_add(b21, b22, r); break;
        }
        strassen_rec(l, r, m[which], h, depth + 1);
    };
#ifdef _OPENMP
    // The seven products are independent with disjoint outputs, so task
    // order cannot change the result. Two task levels (49 tasks) balance
    // across small core counts.
    if (depth < 2) {
        for (int i = 0; i < 7; ++i) {
#pragma omp task shared(m, a11, a12, a21, a22, b11, b12, b21, b22) firstprivate(i)
            compute(i);
        }
#pragma omp taskwait
    } else {
        for (int i = 0; i < 7; ++i) compute(i);
    }
#else
    for (int i = 0; i < 7; ++i) compute(i);
#endif

    for (std::size_t i = 0; i < h; ++i) {
        double* top = c.data() + i * n;
        double* bot = c.data() + (i + h) * n;
        for (std::size_t j = 0; j < h; ++j) {
            const std::size_t q = i * h + j;
            top[j] = m[0][q] + m[3][q] - m[4][q] + m[6][q];
            top[j + h] = m[2][q] + m[4][q];
            bot[j] = m[1][q] + m[3][q];
            bot[j + h] = m[0][q] - m[1][q] + m[2][q] + m[5][q];
        }
    }
}

Matrix matmul_strassen(const Matrix& a, const Matrix& b) {
    const std::size_t n = next_pow2(std::max({a.rows(), a.cols(), b.cols()}));
    Block pa(n * n, 0.0), pb(n * n, 0.0), pc(n * n, 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) pa[i * n + j] = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) pb[i * n + j] = b(i, j);
#ifdef _OPENMP
#pragma omp parallel
#pragma omp single
#endif
    strassen_rec(pa, pb, pc, n, 0);
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) = pc[i * n + j];
    return c;
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b, MatmulAlgo algo) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ, " + shape_str(a) + " times " +
                         shape_str(b));
    }
    switch (algo) {
        case MatmulAlgo::naive:
            return matmul_naive(a, b);
        case MatmulAlgo::strassen:
            return matmul_strassen(a, b);
        case MatmulAlgo::auto_select:
        default:
            if (a.rows() >= 512 && a.cols() >= 512 && b.cols() >= 512)
                return matmul_strassen(a, b);
            return matmul_naive(a, b);
    }
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix map(const Matrix& a, const std::function<double(double)>& f) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = f(a.data()[i]);
    return out;
}

Matrix zip(const Matrix& a, const Matrix& b, const std::function<double(double, double)>& f) {
    require_same_shape(a, b, "zip");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = f(a.data()[i], b.data()[i]);
    return out;
}

Matrix col_means(const Matrix& a) {
    if (a.rows() == 0) throw ShapeError("col_means: empty matrix");
    Matrix out(1, a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(0, j) += a(i, j);
    const double inv = 1.0 / static_cast<double>(a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j) out(0, j) *= inv;
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
    return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "sub");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
    return out;
}

Matrix scale(const Matrix& a, double s) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * s;
    return out;
}

void add_scaled_in_place(Matrix& a, const Matrix& b, double s) {
    require_same_shape(a, b, "add_scaled");
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += s * b.data()[i];
}

void scale_in_place(Matrix& a, double s) {
    for (double& v : a.data()) v *= s;
}

Matrix add_row_broadcast(const Matrix& a, const Matrix& row) {
    if (row.rows() != 1 || row.cols() != a.cols()) {
        throw ShapeError("add_row_broadcast: need 1x" + std::to_string(a.cols()) +
                         " row, got " + shape_str(row));
    }
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + row(0, j);
    return out;
}

Matrix take_rows(const Matrix& a, std::span<const std::size_t> idx) {
    Matrix out(idx.size(), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto src = a.row(idx[i]);
        auto dst = out.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

bool all_finite(const Matrix& a) {
    for (double v : a.data())
        if (!std::isfinite(v)) return false;
    return true;
}

double frobenius_sq(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return s;
}

}  // namespace deepnet
