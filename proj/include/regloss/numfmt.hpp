#pragma once

#include <json.hpp>
#include <string>

namespace regloss {

// %.17g; non-finite values print as inf, -inf, nan.
std::string format_real(double x);

// Pretty JSON with sorted keys and reals at 17 significant digits.
// Non-finite reals are written as the strings "inf", "-inf", "nan".
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace regloss
