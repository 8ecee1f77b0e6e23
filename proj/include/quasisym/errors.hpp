#pragma once

#include <stdexcept>
#include <string>

namespace quasisym {

/// Bad arguments or parameter sets that violate a documented precondition.
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Evaluation requested where the quantity is not defined (one-sided
/// derivatives missing, singular exponents, ...).
struct eval_domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Query outside a tabulated range; the message names the valid interval.
struct tabulation_range_error : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// An iterative procedure (shooting, Newton, scan) failed to converge.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File read/write failure.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace quasisym
