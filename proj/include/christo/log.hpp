#pragma once

#include <functional>
#include <string>

namespace christo {

using WarningSink = std::function<void(const std::string&)>;

/// Replaces the process-wide warning sink. Passing an empty function restores stderr output.
void set_warning_sink(WarningSink sink);

void warn(const std::string& message);

}  // namespace christo
