#pragma once

#include <stdexcept>
#include <string>

namespace acbm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dimension or index mismatch between operands.
struct ShapeMismatch : Error {
    using Error::Error;
};

// Metric (or candidate metric) with |det| below the degeneracy threshold.
struct DegenerateMetric : Error {
    using Error::Error;
};

// Tensor fails the admissibility identities required of a fundamental tensor.
struct InadmissibleF : Error {
    using Error::Error;
};

// Constructor parameters outside the domain of the requested class.
struct InvalidParams : Error {
    using Error::Error;
};

// Shape operator violating its compatibility preconditions.
struct InvalidWeingarten : Error {
    using Error::Error;
};

// Least-squares reassembly residual too large, or rank defect in the class bases.
struct DecompositionFailure : Error {
    using Error::Error;
};

// Input tensor sits in more than one basic class when a single one is required.
struct AmbiguousClass : Error {
    using Error::Error;
};

// Scene file syntax error; carries a 1-based line number.
struct ParseError : Error {
    int line = 0;
    ParseError(int line_, const std::string& msg)
        : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Semantically well-formed input that fails validation (axioms, admissibility, ...).
struct ValidationError : Error {
    using Error::Error;
};

}  // namespace acbm
