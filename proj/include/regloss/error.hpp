#pragma once

#include <stdexcept>
#include <string>

namespace regloss {

enum class ErrorKind {
  invalid_geometry,
  dimension,
  unsupported_index,
  invalid_parameter,
  domain,
  out_of_range,
  configuration,
  insufficient_data,
  index,
  infeasible_placement,
  unsupported_schedule,
  lipschitz_embedding,
  alignment,
  resolution,
  schema,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace regloss
