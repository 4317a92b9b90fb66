#pragma once

#include <stdexcept>
#include <string>

namespace oseries {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A comparison against zero could not be decided within the precision budget.
class SignUndecided : public Error {
public:
    explicit SignUndecided(const std::string& what) : Error(what) {}
};

class DivisionByZero : public Error {
public:
    explicit DivisionByZero(const std::string& what) : Error(what) {}
};

class LogNonPositive : public Error {
public:
    explicit LogNonPositive(const std::string& what) : Error(what) {}
};

class ZeroArgument : public Error {
public:
    explicit ZeroArgument(const std::string& what) : Error(what) {}
};

class IndexOutOfRange : public Error {
public:
    explicit IndexOutOfRange(const std::string& what) : Error(what) {}
};

class NonPositiveArgument : public Error {
public:
    explicit NonPositiveArgument(const std::string& what) : Error(what) {}
};

class NotPositiveInfinite : public Error {
public:
    explicit NotPositiveInfinite(const std::string& what) : Error(what) {}
};

class NotInfinitesimal : public Error {
public:
    explicit NotInfinitesimal(const std::string& what) : Error(what) {}
};

class NonzeroConstantTerm : public Error {
public:
    explicit NonzeroConstantTerm(const std::string& what) : Error(what) {}
};

class TargetNotPositiveInfinite : public Error {
public:
    explicit TargetNotPositiveInfinite(const std::string& what) : Error(what) {}
};

class BudgetExhausted : public Error {
public:
    explicit BudgetExhausted(const std::string& what) : Error(what) {}
};

class EpsilonTooLarge : public Error {
public:
    explicit EpsilonTooLarge(const std::string& what) : Error(what) {}
};

/// Parse failure; carries the byte offset of the offending token.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : Error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class UnsupportedExponent : public Error {
public:
    explicit UnsupportedExponent(const std::string& what) : Error(what) {}
};

class MalformedDocument : public Error {
public:
    explicit MalformedDocument(const std::string& what) : Error(what) {}
};

}  // namespace oseries
