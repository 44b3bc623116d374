#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace beameval {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file. Parent directories are created.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace beameval
