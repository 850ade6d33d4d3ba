#pragma once

#include <stdexcept>
#include <string>

namespace isodec {

enum class Errc {
  DivisionByZero,
  ShapeError,
  IndexError,
  BudgetExceeded,
  EmptyMessage,
  FieldTooSmall,
  NotRealizable,
  NotReduced,
  DegreeBound,
  PrefixUnknown,
  IntegrityError,
  PatternError,
  ParseError,
  DegenerateField,
  InvalidField,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

const char* errc_name(Errc code);

}  // namespace isodec
