#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace parabifurc {

/// Broad failure category; the CLI maps Domain to exit code 2 and Numerical to 3.
enum class ErrorKind { Domain, Numerical };

class Error : public std::runtime_error {
  public:
    Error(std::string code, ErrorKind kind, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)), kind_(kind) {}

    const std::string& code() const noexcept { return code_; }
    ErrorKind kind() const noexcept { return kind_; }

  private:
    std::string code_;
    ErrorKind kind_;
};

#define PARABIFURC_ERROR(Name, Kind)                                                      \
    class Name : public Error {                                                           \
      public:                                                                             \
        explicit Name(const std::string& message) : Error(#Name, ErrorKind::Kind, message) {} \
    };

PARABIFURC_ERROR(DomainError, Domain)
PARABIFURC_ERROR(OrderError, Domain)
PARABIFURC_ERROR(ParameterOutsideW, Domain)
PARABIFURC_ERROR(ShapeMismatch, Domain)
PARABIFURC_ERROR(NotHyperbolic, Domain)
PARABIFURC_ERROR(NotParabolic, Domain)
PARABIFURC_ERROR(NotOdd, Domain)
PARABIFURC_ERROR(HypcohViolated, Domain)
PARABIFURC_ERROR(SuperattractingUnsupported, Domain)
PARABIFURC_ERROR(NoConvergence, Numerical)
PARABIFURC_ERROR(SingularJacobian, Numerical)
PARABIFURC_ERROR(DegenerateJacobian, Numerical)
PARABIFURC_ERROR(DegenerateParabolic, Numerical)
PARABIFURC_ERROR(DegenerateFold, Numerical)
PARABIFURC_ERROR(BranchJump, Numerical)
PARABIFURC_ERROR(DerivativeVanished, Numerical)
PARABIFURC_ERROR(NotAttracted, Numerical)
PARABIFURC_ERROR(CountMismatch, Numerical)
PARABIFURC_ERROR(CensusMismatch, Numerical)

#undef PARABIFURC_ERROR

/// An iterate left the dynamical domain; carries the orbit computed so far.
class EscapeError : public Error {
  public:
    EscapeError(const std::string& message, std::vector<std::complex<double>> partial)
        : Error("EscapeError", ErrorKind::Numerical, message), partial_(std::move(partial)) {}

    const std::vector<std::complex<double>>& partial_orbit() const noexcept { return partial_; }

  private:
    std::vector<std::complex<double>> partial_;
};

}  // namespace parabifurc
