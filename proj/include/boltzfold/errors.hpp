#ifndef BOLTZFOLD_ERRORS_HPP
#define BOLTZFOLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace boltzfold {

// Bad user input: sequences, counts, dimensions, flag values.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, long line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

  private:
    long line_;
};

}  // namespace boltzfold

#endif
