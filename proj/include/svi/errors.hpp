#pragma once

#include <stdexcept>
#include <string>

namespace svi {

// the requested gauge needs cells finer than the space resolution admits
struct GaugeTooFineError : std::runtime_error {
    explicit GaugeTooFineError(const std::string& what) : std::runtime_error(what) {}
};

// no truncation index satisfies the tail-mass rule
struct TailMassError : std::runtime_error {
    explicit TailMassError(const std::string& what) : std::runtime_error(what) {}
};

// a refinement sequence blew up instead of settling
struct NotIntegrableError : std::runtime_error {
    explicit NotIntegrableError(const std::string& what) : std::runtime_error(what) {}
};

// an operation was invoked on inputs that violate its stated hypotheses;
// verification suites record these as skips rather than failures
struct HypothesisError : std::runtime_error {
    explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

// unknown instance id, malformed manifest, missing file
struct CatalogError : std::runtime_error {
    explicit CatalogError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace svi
