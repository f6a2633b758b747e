#pragma once

#include <string>

namespace textae {

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace textae
