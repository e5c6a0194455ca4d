#ifndef NNORTH_CORE_HPP
#define NNORTH_CORE_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace nnorth {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library. `kind()` is a short
/// stable tag used by the CLI for its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define NNORTH_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(tag, what) {}         \
  };

NNORTH_DEFINE_ERROR(DimensionError, "dimension")
NNORTH_DEFINE_ERROR(ParameterError, "parameter")
NNORTH_DEFINE_ERROR(RetractionError, "retraction")
NNORTH_DEFINE_ERROR(LineSearchError, "line_search")
NNORTH_DEFINE_ERROR(RoundingError, "rounding")
NNORTH_DEFINE_ERROR(PreconditionError, "precondition")
NNORTH_DEFINE_ERROR(OracleSizeError, "oracle_size")
NNORTH_DEFINE_ERROR(HypothesisError, "hypothesis")
NNORTH_DEFINE_ERROR(InputError, "input")

#undef NNORTH_DEFINE_ERROR

/// Throws DimensionError unless `a` and `b` have identical shape.
void require_same_shape(const Matrix& a, const Matrix& b, const char* where);

/// Throws unless rows >= cols >= 1 and all entries are finite.
void require_valid_dense(const Matrix& x, const char* where);

/// ‖XᵀX − I‖_F
double orth_residual(const Matrix& x);

}  // namespace nnorth

#endif
