#pragma once

#include <stdexcept>
#include <string>

namespace uavtour {

/// Tour/arc-set violates a structural requirement (duplicate sensor,
/// depot-free cycle, bad degree pattern, ...).
class StructuralError : public std::runtime_error {
public:
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// Instance too large for an exact method (oracle enumeration, Held-Karp).
class BoundError : public std::invalid_argument {
public:
  explicit BoundError(const std::string& what) : std::invalid_argument(what) {}
};

/// The closed-form propulsion model cannot be evaluated.
class RotorModelUnavailable : public std::runtime_error {
public:
  RotorModelUnavailable()
      : std::runtime_error(
            "propulsion model unavailable: rotor constants not set; "
            "use the tabulated flight power instead") {}
};

/// A solver failed (iteration cap, internal inconsistency). Carries a
/// human-readable diagnostic, including the iteration trace when relevant.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace uavtour
