#pragma once

#include <functional>
#include <string>

namespace bhgs {

/// Diagnostics that are worth surfacing but are not errors. Defaults to stderr;
/// tests and the CLI may redirect or silence them.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace bhgs
