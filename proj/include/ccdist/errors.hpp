// ccdist -- error types shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace ccdist {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class NotSkewSymmetric : public Error {
 public:
  explicit NotSkewSymmetric(int index)
      : Error("matrix " + std::to_string(index) + " is not skew-symmetric"), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

class LinearlyDependent : public Error {
 public:
  LinearlyDependent() : Error("matrix tuple is linearly dependent") {}
};

class NonPositiveScale : public Error {
 public:
  NonPositiveScale() : Error("dilation factor must be positive") {}
};

class UnknownFixture : public Error {
 public:
  explicit UnknownFixture(const std::string& name) : Error("unknown fixture: " + name) {}
};

class EigenFailure : public Error {
 public:
  explicit EigenFailure(const std::string& what) : Error(what) {}
};

// Scalar argument left the kernel's domain; index() is the offending
// eigenvalue slot, or -1 when the violation is not tied to one.
class DomainViolation : public Error {
 public:
  explicit DomainViolation(const std::string& what, int index = -1)
      : Error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(const std::string& what) : Error(what) {}
};

class SingularTheta : public Error {
 public:
  explicit SingularTheta(const std::string& what) : Error(what) {}
};

class MaxIterations : public Error {
 public:
  explicit MaxIterations(const std::string& what) : Error(what) {}
};

class NumericalBreakdown : public Error {
 public:
  explicit NumericalBreakdown(const std::string& what) : Error(what) {}
};

class UnsupportedDimension : public Error {
 public:
  explicit UnsupportedDimension(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

class NotInM : public Error {
 public:
  explicit NotInM(const std::string& what) : Error(what) {}
};

}  // namespace ccdist
