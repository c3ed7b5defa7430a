#ifndef MTA_ERRORS_HPP
#define MTA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mta {

// Mixing values from different fields is always a hard error, never a coercion.
class FieldMismatchError : public std::invalid_argument {
public:
    explicit FieldMismatchError(const std::string& what)
        : std::invalid_argument(what) {}
};

// A configurable resource bound (tree budget, unfold size, bit size) was exceeded.
class BoundExceededError : public std::runtime_error {
public:
    explicit BoundExceededError(const std::string& what)
        : std::runtime_error(what) {}
};

// The learner received answers that no tree series can produce.
class TeacherInconsistencyError : public std::runtime_error {
public:
    explicit TeacherInconsistencyError(const std::string& what)
        : std::runtime_error(what) {}
};

// Malformed textual input; line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, int line, int column, const std::string& message)
        : std::runtime_error(source + ":" + std::to_string(line) + ":" +
                             std::to_string(column) + ": " + message),
          source_(std::move(source)), line_(line), column_(column) {}

    const std::string& source() const { return source_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    std::string source_;
    int line_;
    int column_;
};

} // namespace mta

#endif
