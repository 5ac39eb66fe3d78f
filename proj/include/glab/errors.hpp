#pragma once

// Error taxonomy for the lab.  Every throw in the library goes through one of
// the named types below so callers (tests, CLI) can sort failures into config
// problems, violated invariants, solver non-convergence, and I/O trouble.

#include <stdexcept>
#include <string>

namespace glab {

enum class ErrorKind { config, invariant, convergence, io, internal };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what_arg)
      : std::runtime_error(what_arg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

#define GLAB_DEFINE_ERROR(NAME, KIND)                                         \
  class NAME : public Error {                                                 \
  public:                                                                     \
    explicit NAME(const std::string& msg)                                     \
        : Error(ErrorKind::KIND, std::string(#NAME) + ": " + msg) {}          \
  }

// configuration / input validation
GLAB_DEFINE_ERROR(ConfigError, config);
GLAB_DEFINE_ERROR(SchemaMismatch, config);
GLAB_DEFINE_ERROR(InvalidInputs, config);
GLAB_DEFINE_ERROR(BadRadii, config);
GLAB_DEFINE_ERROR(RegionInvalid, config);

// violated mathematical invariants
GLAB_DEFINE_ERROR(PositivityViolation, invariant);
GLAB_DEFINE_ERROR(GridMismatch, invariant);
GLAB_DEFINE_ERROR(DegreeOverflow, invariant);
GLAB_DEFINE_ERROR(NotTopForm, invariant);
GLAB_DEFINE_ERROR(NonRealTopForm, invariant);
GLAB_DEFINE_ERROR(KernelDegenerate, invariant);
GLAB_DEFINE_ERROR(BoundViolated, invariant);
GLAB_DEFINE_ERROR(BranchDominates, invariant);

// iterative processes
GLAB_DEFINE_ERROR(NoConvergence, convergence);
GLAB_DEFINE_ERROR(QuadratureFail, convergence);

// serialization
GLAB_DEFINE_ERROR(IoError, io);

#undef GLAB_DEFINE_ERROR

} // namespace glab
