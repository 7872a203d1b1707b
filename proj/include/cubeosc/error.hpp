#pragma once

#include <stdexcept>
#include <string>

namespace cubeosc {

// Error categories map onto the CLI exit codes (see tools/cubeosc.cpp).
enum class ErrorKind {
    InvalidShape,
    InvalidInput,
    Contract,
    Resource,
    BracketFailure,
    LimitExceeded,
    Unsupported,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace cubeosc
