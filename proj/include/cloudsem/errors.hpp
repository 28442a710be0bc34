#pragma once

#include <stdexcept>
#include <string>

namespace cloudsem {

// Base for every error thrown by the library. Callers that don't care
// about the specific failure can catch this one.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error {
    using Error::Error;
};

// Malformed input text; carries the 1-based line number when known.
struct ParseError : Error {
    int line = 0;
    ParseError(const std::string& msg, int line_no = 0)
        : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg),
          line(line_no) {}
};

struct EmptyCloud : Error {
    EmptyCloud() : Error("point cloud is empty") {}
};

struct InvalidCellSize : Error {
    InvalidCellSize() : Error("cell size must be > 0") {}
};

struct TooFewPoints : Error {
    using Error::Error;
};

struct CycleError : Error {
    using Error::Error;
};

struct SyntaxError : ParseError {
    using ParseError::ParseError;
};

struct SafetyError : Error {
    using Error::Error;
};

struct ArityError : Error {
    using Error::Error;
};

struct UnboundBuiltInArg : Error {
    using Error::Error;
};

struct DuplicateBuiltIn : Error {
    using Error::Error;
};

struct TypeMismatch : Error {
    using Error::Error;
};

struct NoGeometry : Error {
    using Error::Error;
};

struct InvalidDistance : Error {
    InvalidDistance() : Error("distance constraint must be > 0") {}
};

struct SpecError : Error {
    using Error::Error;
};

struct MissingGeometry : Error {
    using Error::Error;
};

} // namespace cloudsem
