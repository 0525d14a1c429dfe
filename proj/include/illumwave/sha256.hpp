#ifndef ILLUMWAVE_SHA256_HPP
#define ILLUMWAVE_SHA256_HPP

#include <cstdint>
#include <string>

namespace ilw {

// Minimal SHA-256 (FIPS 180-4), used to fingerprint configs and output files.
class Sha256 {
public:
    Sha256();
    void update(const void* data, size_t len);
    std::string hex_digest();  // finalizes; object must not be reused afterwards

private:
    void process_block(const uint8_t* block);
    uint32_t state_[8];
    uint64_t total_len_ = 0;
    uint8_t buffer_[64];
    size_t buffer_len_ = 0;
};

std::string sha256_hex(const std::string& data);
std::string sha256_file_hex(const std::string& path);  // throws on open failure

}  // namespace ilw

#endif
