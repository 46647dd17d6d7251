#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mmdvar {

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// m observations of a d-dimensional variable, one observation per row.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(Matrix values) : values_(std::move(values)) {}
  SampleSet(std::size_t m, std::size_t d, std::vector<double> row_major)
      : values_(m, d, std::move(row_major)) {}
  SampleSet(std::initializer_list<std::initializer_list<double>> rows)
      : values_(rows) {}

  /// Scalar observations (d = 1).
  static SampleSet from_column(std::span<const double> values);

  std::size_t size() const noexcept { return values_.rows(); }
  std::size_t dim() const noexcept { return values_.cols(); }
  std::span<const double> operator[](std::size_t i) const noexcept {
    return values_.row(i);
  }
  const Matrix& values() const noexcept { return values_; }

  /// Rows of `parts` stacked in order. All parts must share a dimension.
  static SampleSet pooled(std::span<const SampleSet* const> parts);

 private:
  Matrix values_;
};

}  // namespace mmdvar
