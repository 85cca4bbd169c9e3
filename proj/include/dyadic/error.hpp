#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a function (e.g. t = 0 for a Hardy average).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameters violate the ordering constraints of a bound or a class.
class ConstraintError : public Error {
public:
    using Error::Error;
};

/// A requested object is too large, or a tree is too shallow for a construction.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its stated precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace dyadic
