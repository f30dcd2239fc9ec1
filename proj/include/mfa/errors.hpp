#ifndef MFA_ERRORS_HPP_
#define MFA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mfa {

enum class Errc {
  NotSquareFree,
  NoRootInBracket,
  MultipleRootsInBracket,
  DivisionByZero,
  FieldMismatch,
  IndexOutOfRange,
  SingletonAttractor,
  UndecidedGap,
  RuleViolation,
  FncNotDetected,
  SingularMassSystem,
  NonUniqueMass,
  NotRooted,
  PathExplosion,
  BisectionFailure,
  NonConcaveInput,
  GridTooNarrow,
  ParseError,
  ValidationError,
  UnknownExample,
  ConstraintViolation,
  Internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace mfa

#endif  // MFA_ERRORS_HPP_
