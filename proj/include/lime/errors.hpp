#pragma once

#include <stdexcept>
#include <string>

namespace lime {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input lies outside the domain of a geometric formula.
class DomainError : public Error {
public:
    using Error::Error;
};

class EmptySetError : public Error {
public:
    using Error::Error;
};

/// Accelerometer samples arrived with a non-increasing timestamp.
class ClockError : public Error {
public:
    using Error::Error;
};

/// Event log violates the Open/Capture/Close ordering rules.
class MalformedLog : public Error {
public:
    using Error::Error;
};

/// A scene viewer does not project inside the camera frame.
class OutOfFrame : public Error {
public:
    using Error::Error;
};

/// Invalid motion segment list for trace synthesis.
class SpecError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A Capture event has no detection frame within the alignment tolerance.
class AlignmentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed line in a trace, frame or event log.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace lime
