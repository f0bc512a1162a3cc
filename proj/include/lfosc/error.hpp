#pragma once

#include <stdexcept>
#include <string>

namespace lfosc {

enum class errc {
  ok = 0,
  invalid_argument,
  precondition,
  parse_error,
  data_error,
  range_error,
  io_error,
  insufficient_data,
  check_failed,
  internal,
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

} // namespace lfosc
