#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace glbai {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Index = Eigen::Index;

/// Base class of every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The design matrix is (numerically) singular where an inverse is needed.
class SingularDesign : public Error {
 public:
  using Error::Error;
};

/// The exploratory phase could not make the design matrix invertible.
class RankDeficient : public Error {
 public:
  RankDeficient(const std::string& what, Index rank, Index dim)
      : Error(what), rank_(rank), dim_(dim) {}
  Index rank() const { return rank_; }
  Index dim() const { return dim_; }

 private:
  Index rank_;
  Index dim_;
};

class InfeasibleProgram : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace glbai
