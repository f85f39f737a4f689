#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cosmicbell::randbits {

struct BitStream {
    std::vector<std::uint8_t> bits;  // one 0/1 per entry
    std::string label;

    std::size_t size() const { return bits.size(); }

    static BitStream from_packed(std::span<const std::uint8_t> bytes, std::size_t n_bits, std::string label = {});
    std::vector<std::uint8_t> packed() const;  // LSB-first within bytes
};

// Packed binary (LSB-first) or ASCII lines of 0/1; chosen by extension (.txt/.ascii) or content.
BitStream read_bitstream(const std::string& path);
void write_bitstream_packed(const std::string& path, const BitStream& s);

int choose_m(std::size_t length);

struct MutualInformation {
    double estimate = 0;    // bias-corrected, bits
    double plug_in = 0;     // bits
    double correction = 0;  // subtracted from plug_in
    int m = 0;
    std::size_t samples = 0;
    std::size_t occupied_joint = 0;
    std::size_t occupied_context = 0;
};

// I(next bit; previous m bits). Contexts start at bit `start` (default m).
MutualInformation mutual_information(std::span<const std::uint8_t> bits, int m, std::optional<std::size_t> start = {});

// Settings sequence of one side (red -> 0, blue -> 1) in time order.
BitStream bits_from_settings(std::span<const int> settings, std::string label = {});

}  // namespace cosmicbell::randbits
