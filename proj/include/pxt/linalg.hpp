#pragma once

#include <cstddef>
#include <vector>

namespace pxt {

// Small dense row-major matrix. Sized for regression designs (hundreds of
// rows, a handful of columns), not for anything large.
class Matrix {
  public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
    double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

  private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<double> data_;
};

struct LeastSquares {
    std::vector<double> coef;
    std::vector<double> std_err;       // homoskedastic OLS standard errors
    std::vector<double> t_stat;
    std::vector<double> p_value;       // two-sided, t(n - k)
    std::vector<double> fitted;
    std::vector<double> residuals;
    double ssr = 0.0;                  // sum of squared residuals
    double r_squared = 0.0;            // about the mean of y
    double sigma2 = 0.0;               // ssr / (n - k)
    size_t n = 0;
    size_t k = 0;
    double condition = 0.0;            // |R00| / min |Rii| from the QR factor
};

// OLS by Householder QR. Throws NumericError on a (numerically) singular
// design; the message carries the condition diagnostic.
LeastSquares ols(const Matrix& x, const std::vector<double>& y);

// Solve A b = rhs for symmetric positive definite A (Cholesky).
// Returns false if A is not positive definite.
bool solve_spd(Matrix a, std::vector<double>& rhs);

}  // namespace pxt
