#include "marginopt/transfer_matrix.hpp"

#include "marginopt/error.hpp"

namespace marginopt {
namespace {

void require_square(const TransferMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": matrix is not square");
  }
}

TransferMatrix minor_of(const TransferMatrix& m, int row, int col) {
  const int n = m.rows();
  TransferMatrix out(n - 1, n - 1);
  for (int i = 0, oi = 0; i < n; ++i) {
    if (i == row) continue;
    for (int j = 0, oj = 0; j < n; ++j) {
      if (j == col) continue;
      out(oi, oj++) = m(i, j);
    }
    ++oi;
  }
  return out;
}

}  // namespace

TransferMatrix::TransferMatrix(int rows, int cols)
    : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "matrix dimensions must be positive");
  }
  entries_.resize(static_cast<size_t>(rows * cols));
}

TransferMatrix::TransferMatrix(int rows, int cols,
                               std::vector<TransferFunction> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows <= 0 || cols <= 0 ||
      entries_.size() != static_cast<size_t>(rows * cols)) {
    throw Error(ErrorCode::kInvalidArgument,
                "entry count does not match matrix dimensions");
  }
}

TransferMatrix TransferMatrix::identity(int n) {
  TransferMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = TransferFunction::constant(1.0);
  return m;
}

TransferMatrix TransferMatrix::constant(const Eigen::MatrixXd& c) {
  TransferMatrix m(static_cast<int>(c.rows()), static_cast<int>(c.cols()));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      m(i, j) = TransferFunction::constant(c(i, j));
    }
  }
  return m;
}

const TransferFunction& TransferMatrix::operator()(int i, int j) const {
  return entries_[static_cast<size_t>(i * cols_ + j)];
}

TransferFunction& TransferMatrix::operator()(int i, int j) {
  return entries_[static_cast<size_t>(i * cols_ + j)];
}

Eigen::MatrixXcd TransferMatrix::eval(Complex z) const {
  Eigen::MatrixXcd out(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j)(z);
  }
  return out;
}

TransferMatrix TransferMatrix::reduced() const {
  TransferMatrix out = *this;
  for (auto& e : out.entries_) e = e.reduced();
  return out;
}

TransferMatrix TransferMatrix::scaled_argument(double s) const {
  TransferMatrix out = *this;
  for (auto& e : out.entries_) e = e.scaled_argument(s);
  return out;
}

TransferMatrix operator+(const TransferMatrix& a, const TransferMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) {
    throw Error(ErrorCode::kInvalidArgument, "matrix sum: shape mismatch");
  }
  TransferMatrix out = a;
  for (size_t k = 0; k < out.entries_.size(); ++k) {
    out.entries_[k] = (a.entries_[k] + b.entries_[k]).reduced();
  }
  return out;
}

TransferMatrix operator-(const TransferMatrix& a, const TransferMatrix& b) {
  return a + TransferFunction::constant(-1.0) * b;
}

TransferMatrix operator*(const TransferMatrix& a, const TransferMatrix& b) {
  if (a.cols_ != b.rows_) {
    throw Error(ErrorCode::kInvalidArgument, "matrix product: shape mismatch");
  }
  TransferMatrix out(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i) {
    for (int j = 0; j < b.cols_; ++j) {
      TransferFunction acc;
      for (int k = 0; k < a.cols_; ++k) {
        acc = (acc + a(i, k) * b(k, j)).reduced();
      }
      out(i, j) = acc;
    }
  }
  return out;
}

TransferMatrix operator*(const TransferFunction& s, const TransferMatrix& m) {
  TransferMatrix out = m;
  for (auto& e : out.entries_) e = (s * e).reduced();
  return out;
}

Eigen::MatrixXd feedthrough_matrix(const TransferMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (!m(i, j).is_proper()) {
        throw Error(ErrorCode::kImproperEntry,
                    "improper entry (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      }
      out(i, j) = feedthrough(m(i, j));
    }
  }
  return out;
}

TransferFunction determinant(const TransferMatrix& m) {
  require_square(m, "determinant");
  const int n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).reduced();
  TransferFunction acc;
  for (int j = 0; j < n; ++j) {
    if (m(0, j).is_zero()) continue;
    TransferFunction term = m(0, j) * determinant(minor_of(m, 0, j));
    acc = (j % 2 == 0 ? acc + term : acc - term).reduced();
  }
  return acc;
}

TransferMatrix inverse(const TransferMatrix& m) {
  require_square(m, "inverse");
  const TransferFunction det = determinant(m);
  if (det.is_zero()) {
    throw Error(ErrorCode::kSingularTransform,
                "transfer matrix is singular");
  }
  const int n = m.rows();
  const TransferFunction inv_det = TransferFunction::constant(1.0) / det;
  if (n == 1) return TransferMatrix(1, 1, {inv_det.reduced()});
  TransferMatrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      TransferFunction cof = determinant(minor_of(m, j, i));
      if ((i + j) % 2 == 1) cof = -cof;
      out(i, j) = (cof * inv_det).reduced();
    }
  }
  return out;
}

}  // namespace marginopt
