#pragma once

#include <stdexcept>
#include <string>

namespace tcm {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Training input contains only one of the two labels.
class SingleClassInput : public Error {
public:
    using Error::Error;
};

/// Feature vectors of inconsistent length were mixed in one operation.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A configuration value violates its documented range.
class InvalidConfig : public Error {
public:
    using Error::Error;
};

/// The solver ran out of its iteration budget before reaching its
/// optimality tolerance.
class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

/// Malformed text input (CSV rows, label tokens, numeric fields).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A requested dataset split cannot be formed.
class SplitError : public Error {
public:
    using Error::Error;
};

/// Significance level outside (0, 1).
class InvalidDelta : public Error {
public:
    using Error::Error;
};

/// An exhaustive enumeration was requested above its size cap.
class TooLarge : public Error {
public:
    using Error::Error;
};

/// An operation requiring pairwise distinct examples received duplicates.
class DuplicateExamples : public Error {
public:
    using Error::Error;
};

/// Joint transduction over more new points than the completion
/// enumeration supports.
class TooManyNewPoints : public Error {
public:
    using Error::Error;
};

/// The new point came out a support vector in neither completed picture,
/// which a converged solver never produces; indicates a tolerance or
/// convergence problem.
class NoSupportingPicture : public Error {
public:
    using Error::Error;
};

/// Invariant breach inside the library itself.
class InternalError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure (open, read, write).
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace tcm
