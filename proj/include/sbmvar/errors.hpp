#pragma once

#include <stdexcept>
#include <string>

namespace sbmvar {

enum class ErrorKind {
  kParameter,    // invalid model/config parameters
  kRange,        // value left its admissible interval
  kConsistency,  // objects that disagree with each other (sizes, label ranges)
  kCapacity,     // instance too large for an exact enumeration
  kData,         // unparseable or malformed input file
  kDegenerate,   // evaluation undefined on this input (no positives, empty hold-out)
  kNumerical,    // non-finite objective, failed decomposition
  kIo,           // unwritable output
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace sbmvar
