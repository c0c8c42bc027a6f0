#include "litho/digest.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include <openssl/evp.h>

#include "litho/errors.hpp"

namespace litho {

namespace {

std::string to_hex(const unsigned char* data, std::size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string out(n * 2, '0');
    for (std::size_t i = 0; i < n; ++i) {
        out[2 * i] = digits[data[i] >> 4];
        out[2 * i + 1] = digits[data[i] & 0xf];
    }
    return out;
}

struct Sha256Ctx {
    EVP_MD_CTX* ctx;
    Sha256Ctx() : ctx(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr); }
    ~Sha256Ctx() { EVP_MD_CTX_free(ctx); }
    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx, data, n); }
    std::string finish() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx, md, &len);
        return to_hex(md, len);
    }
};

} // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    Sha256Ctx c;
    c.update(bytes.data(), bytes.size());
    return c.finish();
}

std::string sha256_hex(const std::string& text) {
    Sha256Ctx c;
    c.update(text.data(), text.size());
    return c.finish();
}

std::string sha256_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file for digest: " + path);
    Sha256Ctx c;
    std::array<char, 65536> buf;
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0) c.update(buf.data(), static_cast<std::size_t>(got));
    }
    return c.finish();
}

} // namespace litho
