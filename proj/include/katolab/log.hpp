#pragma once

#include <string_view>

namespace katolab {

// Warnings go to stderr unless silenced (tests and the acceptance runner
// silence them).
void log_warning(std::string_view message);
void set_warnings_enabled(bool enabled) noexcept;
bool warnings_enabled() noexcept;

}  // namespace katolab
