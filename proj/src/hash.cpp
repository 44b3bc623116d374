#include "beameval/hash.hpp"

#include <stdexcept>

#include <openssl/evp.h>

namespace beameval {

namespace {

EVP_MD_CTX* as_ctx(void* p) { return static_cast<EVP_MD_CTX*>(p); }

}  // namespace

FieldHasher::FieldHasher() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(as_ctx(ctx_), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 initialisation failed");
}

FieldHasher::~FieldHasher() { EVP_MD_CTX_free(as_ctx(ctx_)); }

FieldHasher& FieldHasher::field(std::uint64_t value) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
    EVP_DigestUpdate(as_ctx(ctx_), bytes, sizeof bytes);
    return *this;
}

FieldHasher& FieldHasher::field(std::string_view bytes) {
    field(static_cast<std::uint64_t>(bytes.size()));
    EVP_DigestUpdate(as_ctx(ctx_), bytes.data(), bytes.size());
    return *this;
}

Digest FieldHasher::finish() {
    Digest out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(as_ctx(ctx_), out.data(), &len) != 1 || len != out.size())
        throw std::runtime_error("SHA-256 finalisation failed");
    return out;
}

Digest sha256(std::string_view data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    return out;
}

std::string to_hex(const Digest& digest) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (auto b : digest) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 15]);
    }
    return out;
}

std::string sha256_hex(std::string_view data) { return to_hex(sha256(data)); }

std::uint64_t digest_seed(const Digest& digest) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | digest[static_cast<std::size_t>(i)];
    return v;
}

}  // namespace beameval
