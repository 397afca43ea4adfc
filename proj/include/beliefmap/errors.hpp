#pragma once

#include <stdexcept>
#include <string>

namespace beliefmap {

// Error category; the CLI maps these onto process exit codes.
enum class errc {
  usage,          // bad arguments or an unusable parameter combination
  missing_input,  // a declared stage input is absent
  malformed,      // input exists but cannot be parsed
  validation,     // data violates a documented invariant
  internal,
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace beliefmap
