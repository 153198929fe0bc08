#pragma once

#include <string>

namespace bandsparse {

// Write-temp-then-rename, so interrupted runs never leave truncated files.
void atomic_write_text(const std::string& path, const std::string& contents);

void ensure_directory(const std::string& path);

}  // namespace bandsparse
