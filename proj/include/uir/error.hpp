#pragma once

#include <stdexcept>
#include <string>

namespace uir
{

/// Base of every error the library raises. `category()` is the short tag the
/// CLI prints as `error: <category>: <detail>`.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
    virtual const char* category() const noexcept = 0;
};

class ParseError : public Error
{
public:
    ParseError(std::string const& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    const char* category() const noexcept override { return "parse"; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error
{
public:
    using Error::Error;
    const char* category() const noexcept override { return "validation"; }
};

/// Precondition violations on argument values (alpha out of range, unknown ids, ...).
class DomainError : public Error
{
public:
    using Error::Error;
    const char* category() const noexcept override { return "domain"; }
};

class IoError : public Error
{
public:
    using Error::Error;
    const char* category() const noexcept override { return "io"; }
};

} // namespace uir
