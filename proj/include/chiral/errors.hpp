// errors.hpp - exception types shared by the chiralloop library.
//
// Every failure the library reports is a subclass of chiral::Error so that
// callers (the CLI in particular) can map them onto exit codes.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chiral {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter violates a documented invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A function precondition (step size, sampling, ...) does not hold.
class PreconditionViolated : public Error {
public:
    using Error::Error;
};

// Zero detuning: the two modes are identical and there is no EP.
class DegenerateModel : public Error {
public:
    using Error::Error;
};

// The eigenbasis is defective (evaluated exactly at an exceptional point).
class SingularFrame : public Error {
public:
    using Error::Error;
};

// Both alpha candidates are (nearly) equally close to the predecessor.
class AmbiguousBranch : public Error {
public:
    using Error::Error;
};

// AmbiguousBranch raised while integrating; the caller should refine dt.
class BranchTrackingFailed : public Error {
public:
    using Error::Error;
};

class NonFinite : public Error {
public:
    using Error::Error;
};

class StepTooCoarse : public Error {
public:
    using Error::Error;
};

class UndersampledCarrier : public Error {
public:
    using Error::Error;
};

// Omega/omega_0 is outside the weak-coupling regime.
class RegimeViolation : public Error {
public:
    using Error::Error;
};

// A NAT was found before any loss-entry reference crossing.
class NoCrossingReference : public Error {
public:
    explicit NoCrossingReference(double nat_time)
        : Error("NAT at t=" + std::to_string(nat_time) +
                " has no preceding loss-entry crossing"),
          time(nat_time) {}
    double time;
};

class ZeroState : public Error {
public:
    using Error::Error;
};

// Configuration syntax error; line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line_no, std::size_t column_no)
        : Error("line " + std::to_string(line_no) + ", column " +
                std::to_string(column_no) + ": " + what),
          line(line_no),
          column(column_no) {}
    std::size_t line;
    std::size_t column;
};

}  // namespace chiral
