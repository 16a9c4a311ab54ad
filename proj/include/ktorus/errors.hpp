#pragma once

#include <stdexcept>
#include <string>

namespace ktorus {

enum class ErrorKind {
    Parse,
    Domain,
    NonPeriodic,
    DegenerateZero,
    OutOfBand,
    NoTangency,
    HorizonExceeded,
    BranchSingular,
    SpanExhausted,
    NotPeriodic,
    NotApplicable,
    QuadratureSingular,
    Config,
    Numeric,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Parse failure with a byte span into the source text.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::string source, std::size_t pos, std::size_t len);
    std::size_t pos() const noexcept { return pos_; }
    std::size_t len() const noexcept { return len_; }
    const std::string& source() const noexcept { return source_; }
    // Two-line rendering: source, then a caret line under the span.
    std::string pretty() const;

private:
    std::string source_;
    std::size_t pos_;
    std::size_t len_;
};

}  // namespace ktorus
