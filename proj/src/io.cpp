#include "beameval/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace beameval {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError(fmt::format("read failed: {}", path.string()));
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError(fmt::format("cannot create {}: {}", path.parent_path().string(), ec.message()));
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(fmt::format("cannot write {}", tmp.string()));
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw IoError(fmt::format("write failed: {}", tmp.string()));
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(fmt::format("cannot rename {}: {}", tmp.string(), ec.message()));
}

}  // namespace beameval
