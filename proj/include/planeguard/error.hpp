#pragma once

#include <stdexcept>
#include <string>

namespace planeguard {

// Every error raised by the library derives from Error. The CLI maps
// UsageError to exit code 1 and the remaining data-level errors to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Input too small or carrying no signal (empty residual maps, empty histograms).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

class InvalidTrainingSet : public Error {
public:
    using Error::Error;
};

class InvalidSplit : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace planeguard
