#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace beameval {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::string_view data);
std::string sha256_hex(std::string_view data);
std::string to_hex(const Digest& digest);

/// Incremental SHA-256 with length-prefixed fields, so ("ab","c") and
/// ("a","bc") hash differently.
class FieldHasher {
public:
    FieldHasher();
    ~FieldHasher();
    FieldHasher(const FieldHasher&) = delete;
    FieldHasher& operator=(const FieldHasher&) = delete;

    FieldHasher& field(std::string_view bytes);
    FieldHasher& field(std::uint64_t value);
    Digest finish();

private:
    void* ctx_;
};

/// First eight digest bytes, little endian.
std::uint64_t digest_seed(const Digest& digest);

}  // namespace beameval
