#include "sparsereg/operators.hpp"

#include "sparsereg/random.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace sparsereg {

namespace {

void check_dims(Eigen::Index got, std::size_t want, const char* what) {
  if (static_cast<std::size_t>(got) != want) {
    throw InvalidArgument(std::string(what) + ": expected length " +
                          std::to_string(want) + ", got " + std::to_string(got));
  }
}

class DenseLinear final : public ForwardOperator {
 public:
  explicit DenseLinear(Matrix a) : a_(std::move(a)) {}
  std::size_t rows() const override { return static_cast<std::size_t>(a_.rows()); }
  std::size_t cols() const override { return static_cast<std::size_t>(a_.cols()); }
  bool is_linear() const override { return true; }
  std::string name() const override { return "dense"; }

 protected:
  DataVector do_apply(const CoefficientVector& u) const override { return a_ * u; }
  DataVector do_derivative_apply(const CoefficientVector&,
                                 const CoefficientVector& h) const override {
    return a_ * h;
  }
  CoefficientVector do_derivative_adjoint_apply(const CoefficientVector&,
                                                const DataVector& y) const override {
    return a_.transpose() * y;
  }

 private:
  Matrix a_;
};

class DiagonalLinear final : public ForwardOperator {
 public:
  explicit DiagonalLinear(Eigen::VectorXd s) : s_(std::move(s)) {}
  std::size_t rows() const override { return static_cast<std::size_t>(s_.size()); }
  std::size_t cols() const override { return rows(); }
  bool is_linear() const override { return true; }
  std::string name() const override { return "diagonal"; }

 protected:
  DataVector do_apply(const CoefficientVector& u) const override {
    return s_.cwiseProduct(u);
  }
  DataVector do_derivative_apply(const CoefficientVector&,
                                 const CoefficientVector& h) const override {
    return s_.cwiseProduct(h);
  }
  CoefficientVector do_derivative_adjoint_apply(const CoefficientVector&,
                                                const DataVector& y) const override {
    return s_.cwiseProduct(y);
  }

 private:
  Eigen::VectorXd s_;
};

class ConvolutionLinear final : public ForwardOperator {
 public:
  ConvolutionLinear(Eigen::VectorXd kernel, std::size_t n)
      : kernel_(std::move(kernel)), n_(n) {}
  std::size_t rows() const override { return n_; }
  std::size_t cols() const override { return n_; }
  bool is_linear() const override { return true; }
  std::string name() const override { return "convolution"; }

 protected:
  DataVector do_apply(const CoefficientVector& u) const override { return convolve(u); }
  DataVector do_derivative_apply(const CoefficientVector&,
                                 const CoefficientVector& h) const override {
    return convolve(h);
  }
  CoefficientVector do_derivative_adjoint_apply(const CoefficientVector&,
                                                const DataVector& y) const override {
    // correlation: x_j = sum_k kernel_k y_{(j+k) mod n}
    const auto n = static_cast<Eigen::Index>(n_);
    CoefficientVector x = CoefficientVector::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < kernel_.size(); ++k) {
        acc += kernel_[k] * y[(j + k) % n];
      }
      x[j] = acc;
    }
    return x;
  }

 private:
  DataVector convolve(const CoefficientVector& u) const {
    const auto n = static_cast<Eigen::Index>(n_);
    DataVector y = DataVector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < kernel_.size(); ++k) {
        acc += kernel_[k] * u[((i - k) % n + n) % n];
      }
      y[i] = acc;
    }
    return y;
  }

  Eigen::VectorXd kernel_;
  std::size_t n_;
};

class ToyNonlinear final : public ForwardOperator {
 public:
  ToyNonlinear(Matrix a, Matrix b, double eps)
      : a_(std::move(a)), b_(std::move(b)), eps_(eps) {}
  std::size_t rows() const override { return static_cast<std::size_t>(a_.rows()); }
  std::size_t cols() const override { return static_cast<std::size_t>(a_.cols()); }
  bool is_linear() const override { return eps_ == 0.0; }
  std::string name() const override { return "toy-nonlinear"; }

 protected:
  DataVector do_apply(const CoefficientVector& u) const override {
    return a_ * u + eps_ * (b_ * u.cwiseAbs2());
  }
  DataVector do_derivative_apply(const CoefficientVector& u,
                                 const CoefficientVector& h) const override {
    return a_ * h + 2.0 * eps_ * (b_ * u.cwiseProduct(h));
  }
  CoefficientVector do_derivative_adjoint_apply(const CoefficientVector& u,
                                                const DataVector& y) const override {
    return a_.transpose() * y +
           2.0 * eps_ * u.cwiseProduct(b_.transpose() * y);
  }

 private:
  Matrix a_;
  Matrix b_;
  double eps_;
};

class Linearization final : public ForwardOperator {
 public:
  Linearization(OperatorPtr op, CoefficientVector at)
      : op_(std::move(op)), at_(std::move(at)) {}
  std::size_t rows() const override { return op_->rows(); }
  std::size_t cols() const override { return op_->cols(); }
  bool is_linear() const override { return true; }
  std::string name() const override { return "linearized " + op_->name(); }

 protected:
  DataVector do_apply(const CoefficientVector& h) const override {
    return op_->derivative_apply(at_, h);
  }
  DataVector do_derivative_apply(const CoefficientVector&,
                                 const CoefficientVector& h) const override {
    return op_->derivative_apply(at_, h);
  }
  CoefficientVector do_derivative_adjoint_apply(const CoefficientVector&,
                                                const DataVector& y) const override {
    return op_->derivative_adjoint_apply(at_, y);
  }

 private:
  OperatorPtr op_;
  CoefficientVector at_;
};

}  // namespace

DataVector ForwardOperator::apply(const CoefficientVector& u) const {
  check_dims(u.size(), cols(), "apply");
  return do_apply(u);
}

DataVector ForwardOperator::derivative_apply(const CoefficientVector& u,
                                             const CoefficientVector& h) const {
  check_dims(u.size(), cols(), "derivative_apply point");
  check_dims(h.size(), cols(), "derivative_apply direction");
  return do_derivative_apply(u, h);
}

CoefficientVector ForwardOperator::derivative_adjoint_apply(
    const CoefficientVector& u, const DataVector& y) const {
  check_dims(u.size(), cols(), "derivative_adjoint_apply point");
  check_dims(y.size(), rows(), "derivative_adjoint_apply data");
  return do_derivative_adjoint_apply(u, y);
}

Matrix ForwardOperator::derivative_matrix(const CoefficientVector& u) const {
  const auto n = static_cast<Eigen::Index>(cols());
  Matrix m(static_cast<Eigen::Index>(rows()), n);
  CoefficientVector e = CoefficientVector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    m.col(j) = derivative_apply(u, e);
    e[j] = 0.0;
  }
  return m;
}

OperatorPtr make_dense_linear(Matrix matrix) {
  if (matrix.size() == 0) throw InvalidArgument("dense operator needs a nonempty matrix");
  if (!matrix.allFinite()) throw InvalidArgument("dense operator entries must be finite");
  return std::make_shared<DenseLinear>(std::move(matrix));
}

OperatorPtr make_diagonal_linear(Eigen::VectorXd singular_values) {
  if (singular_values.size() == 0) {
    throw InvalidArgument("diagonal operator needs at least one value");
  }
  if (!singular_values.allFinite() || (singular_values.array() <= 0.0).any()) {
    throw InvalidArgument("diagonal operator values must be finite and positive");
  }
  return std::make_shared<DiagonalLinear>(std::move(singular_values));
}

OperatorPtr make_convolution_linear(Eigen::VectorXd kernel, std::size_t n) {
  if (kernel.size() == 0) throw InvalidArgument("convolution kernel is empty");
  if (static_cast<std::size_t>(kernel.size()) > n) {
    throw InvalidArgument("convolution kernel longer than signal length");
  }
  if (!kernel.allFinite()) throw InvalidArgument("convolution kernel must be finite");
  return std::make_shared<ConvolutionLinear>(std::move(kernel), n);
}

OperatorPtr make_toy_nonlinear(Matrix a, Matrix b, double eps) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("toy nonlinear operator: A and B dimensions differ");
  }
  if (a.size() == 0) throw InvalidArgument("toy nonlinear operator needs nonempty A");
  if (!a.allFinite() || !b.allFinite() || !std::isfinite(eps)) {
    throw InvalidArgument("toy nonlinear operator entries must be finite");
  }
  return std::make_shared<ToyNonlinear>(std::move(a), std::move(b), eps);
}

OperatorPtr make_linearization(OperatorPtr op, CoefficientVector at) {
  check_dims(at.size(), op->cols(), "linearization point");
  return std::make_shared<Linearization>(std::move(op), std::move(at));
}

double operator_norm_sq(const ForwardOperator& op, const CoefficientVector& at) {
  const auto n = static_cast<Eigen::Index>(op.cols());
  Rng rng(0x5eed);
  CoefficientVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.normal();
  x.normalize();

  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    CoefficientVector y = op.derivative_adjoint_apply(at, op.derivative_apply(at, x));
    const double next = x.dot(y);  // Rayleigh quotient, x normalized
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
    const bool settled = std::abs(next - lambda) <= 1e-10 * std::abs(next);
    lambda = next;
    if (settled) break;
  }
  return lambda;
}

double operator_norm_sq(const ForwardOperator& op) {
  return operator_norm_sq(op, CoefficientVector::Zero(static_cast<Eigen::Index>(op.cols())));
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidArgument("matrix CSV line " + std::to_string(line_no) +
                              ": not a number: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument("matrix CSV line " + std::to_string(line_no) +
                            ": expected " + std::to_string(rows.front().size()) +
                            " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("matrix CSV is empty");

  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open matrix CSV " + path.string());
  return read_matrix_csv(in);
}

Eigen::VectorXd gaussian_kernel(double width) {
  if (!(width > 0.0)) throw InvalidArgument("kernel width must be positive");
  const int half = static_cast<int>(std::ceil(3.0 * width));
  Eigen::VectorXd k(2 * half + 1);
  for (int i = -half; i <= half; ++i) {
    k[i + half] = std::exp(-0.5 * (i / width) * (i / width));
  }
  return k / k.sum();
}

}  // namespace sparsereg
