#include "mmdvar/sample_set.hpp"

#include <string>

#include "mmdvar/error.hpp"

namespace mmdvar {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InputError("matrix data has " + std::to_string(data_.size()) +
                     " values, expected " + std::to_string(rows_ * cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

SampleSet SampleSet::from_column(std::span<const double> values) {
  return SampleSet(values.size(), 1,
                   std::vector<double>(values.begin(), values.end()));
}

SampleSet SampleSet::pooled(std::span<const SampleSet* const> parts) {
  std::size_t rows = 0;
  std::size_t dim = parts.empty() ? 0 : parts.front()->dim();
  for (const SampleSet* p : parts) {
    if (p->dim() != dim) {
      throw PreconditionError("cannot pool samples of dimension " +
                              std::to_string(dim) + " and " +
                              std::to_string(p->dim()));
    }
    rows += p->size();
  }
  std::vector<double> data;
  data.reserve(rows * dim);
  for (const SampleSet* p : parts) {
    auto all = p->values().data();
    data.insert(data.end(), all.begin(), all.end());
  }
  return SampleSet(rows, dim, std::move(data));
}

}  // namespace mmdvar
