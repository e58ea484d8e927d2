#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace topicnet {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Parses the whole of `text` as a double; nullopt on any trailing or missing characters.
std::optional<double> parse_double(std::string_view text);

}  // namespace topicnet
