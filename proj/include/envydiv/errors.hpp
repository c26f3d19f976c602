#pragma once

#include <stdexcept>
#include <string>

namespace envydiv {

/// Malformed request: bad board size, r < 2, non-face placement, bad cut.
class InvalidConfiguration : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed its configured simplex or work cap.
class ResourceExhausted : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by is_pseudomanifold when the facets do not share one dimension.
class NotPure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Allocation breaks the space's rule on non-degenerate tiles.
class VariantConstraintViolation : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Old-style oracle queried with a configuration point, or the reverse.
class DomainMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A reduction observed its source violating a stated precondition.
class PreconditionBreach : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two superfluous-cut eliminations produced different box scores.
class PartitionEquivalenceViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// No perfect matching on the positive support of a score matrix.
class NoPerfectMatching : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Birkhoff peeling ran out of matchings before the mass was exhausted.
class NotDoublyStochastic : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Unparseable preference file, unknown model name, bad parameters.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace envydiv
