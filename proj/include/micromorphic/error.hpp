#ifndef MICROMORPHIC_ERROR_HPP
#define MICROMORPHIC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace micromorphic {

/// Base class of every error thrown by the library. `name()` is the stable
/// identifier printed by the CLI (e.g. "GridMismatch").
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define MICROMORPHIC_DEFINE_ERROR(Type)                                        \
    class Type : public Error {                                                \
    public:                                                                    \
        explicit Type(const std::string& what) : Error(#Type, what) {}         \
    }

MICROMORPHIC_DEFINE_ERROR(NonSkewInput);
MICROMORPHIC_DEFINE_ERROR(NonSkewField);
MICROMORPHIC_DEFINE_ERROR(GridMismatch);
MICROMORPHIC_DEFINE_ERROR(InvalidGrid);
MICROMORPHIC_DEFINE_ERROR(InadmissibleParams);
MICROMORPHIC_DEFINE_ERROR(DegenerateParams);
MICROMORPHIC_DEFINE_ERROR(DomainViolation);
MICROMORPHIC_DEFINE_ERROR(UnstableTimestep);
MICROMORPHIC_DEFINE_ERROR(SingularProblem);
MICROMORPHIC_DEFINE_ERROR(NoConvergence);
MICROMORPHIC_DEFINE_ERROR(PoissonOutOfRange);
MICROMORPHIC_DEFINE_ERROR(InvalidSweep);
MICROMORPHIC_DEFINE_ERROR(MisassembledSymbol);
MICROMORPHIC_DEFINE_ERROR(ConfigError);
MICROMORPHIC_DEFINE_ERROR(NonFiniteValue);

#undef MICROMORPHIC_DEFINE_ERROR

}  // namespace micromorphic

#endif  // MICROMORPHIC_ERROR_HPP
