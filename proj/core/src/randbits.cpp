#include "cosmicbell/randbits.hpp"

#include "cosmicbell/errors.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <unordered_map>

namespace cosmicbell::randbits {

namespace {

constexpr int kDenseLimit = 24;

double xlog2x(double c) { return c > 0 ? c * std::log2(c) : 0.0; }

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Entropy sums from a table of (context, bit) counts.
template <class ForEach>
MutualInformation finish(ForEach for_each, std::size_t n, std::size_t ones, int m) {
    MutualInformation r;
    r.m = m;
    r.samples = n;
    const double dn = static_cast<double>(n);
    double s_joint = 0, s_ctx = 0;
    for_each([&](std::uint64_t c0, std::uint64_t c1) {
        const auto tot = c0 + c1;
        if (tot == 0) return;
        ++r.occupied_context;
        r.occupied_joint += (c0 > 0) + (c1 > 0);
        s_joint += xlog2x(static_cast<double>(c0)) + xlog2x(static_cast<double>(c1));
        s_ctx += xlog2x(static_cast<double>(tot));
    });
    const double h_x = -(xlog2x(static_cast<double>(ones) / dn) + xlog2x(static_cast<double>(n - ones) / dn));
    // H(X|C) = log2 n - (1/n) sum c log2 c  over joint  minus the same over contexts
    const double h_x_given_c = (s_ctx - s_joint) / dn;
    r.plug_in = h_x - h_x_given_c;
    const std::size_t occupied_x = (ones > 0) + (ones < n);
    r.correction = (static_cast<double>(r.occupied_joint) - 1 - (static_cast<double>(r.occupied_context) - 1) -
                    (static_cast<double>(occupied_x) - 1)) /
                   (2.0 * dn * std::log(2.0));
    r.estimate = r.plug_in - r.correction;
    return r;
}

}  // namespace

BitStream BitStream::from_packed(std::span<const std::uint8_t> bytes, std::size_t n_bits, std::string label) {
    if (n_bits > bytes.size() * 8) throw DataError("packed bitstream shorter than requested length");
    BitStream s;
    s.label = std::move(label);
    s.bits.resize(n_bits);
    for (std::size_t k = 0; k < n_bits; ++k) s.bits[k] = (bytes[k / 8] >> (k % 8)) & 1u;
    return s;
}

std::vector<std::uint8_t> BitStream::packed() const {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t k = 0; k < bits.size(); ++k)
        if (bits[k]) out[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
    return out;
}

BitStream read_bitstream(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open bitstream '" + path + "'");
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bool ascii = ends_with(path, ".txt") || ends_with(path, ".ascii");
    if (!ascii && !raw.empty()) {
        ascii = true;
        for (std::size_t k = 0; k < std::min<std::size_t>(raw.size(), 4096); ++k) {
            const char c = static_cast<char>(raw[k]);
            if (c != '0' && c != '1' && c != '\n' && c != '\r' && c != ' ') {
                ascii = false;
                break;
            }
        }
    }
    BitStream s;
    s.label = path;
    if (ascii) {
        for (std::uint8_t c : raw) {
            if (c == '0' || c == '1') s.bits.push_back(static_cast<std::uint8_t>(c - '0'));
            else if (c != '\n' && c != '\r' && c != ' ' && c != '\t') throw DataError(path + ": non-binary character in ASCII bitstream");
        }
        return s;
    }
    return BitStream::from_packed(raw, raw.size() * 8, path);
}

void write_bitstream_packed(const std::string& path, const BitStream& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    const auto p = s.packed();
    out.write(reinterpret_cast<const char*>(p.data()), static_cast<std::streamsize>(p.size()));
}

int choose_m(std::size_t length) {
    if (length < 256) throw DomainError("choose_m needs at least 256 bits");
    const int floor_term = static_cast<int>(std::floor(std::log2(static_cast<double>(length)) - 7.0));
    return floor_term + 1;
}

MutualInformation mutual_information(std::span<const std::uint8_t> bits, int m, std::optional<std::size_t> start) {
    if (m < 0) throw DomainError("context length m must be >= 0");
    if (m > 62) throw DomainError("context length m above 62 is not supported");
    const auto mu = static_cast<std::size_t>(m);
    if (mu >= bits.size()) throw DomainError("context length m must be smaller than the stream length");
    const std::size_t s0 = start.value_or(mu);
    if (s0 < mu || s0 >= bits.size()) throw DomainError("context start must lie in [m, L)");

    const std::uint64_t mask = mu == 0 ? 0 : ((std::uint64_t{1} << mu) - 1);
    std::uint64_t ctx = 0;
    for (std::size_t k = s0 - mu; k < s0; ++k) ctx = ((ctx << 1) | (bits[k] & 1u)) & mask;

    const std::size_t n = bits.size() - s0;
    std::size_t ones = 0;
    if (m <= kDenseLimit) {
        std::vector<std::uint32_t> counts(std::size_t{2} << mu, 0);
        for (std::size_t k = s0; k < bits.size(); ++k) {
            const unsigned b = bits[k] & 1u;
            ++counts[(ctx << 1) | b];
            ones += b;
            ctx = ((ctx << 1) | b) & mask;
        }
        return finish(
            [&](auto f) {
                for (std::size_t c = 0; c < counts.size(); c += 2) f(counts[c], counts[c + 1]);
            },
            n, ones, m);
    }
    std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> table;
    for (std::size_t k = s0; k < bits.size(); ++k) {
        const unsigned b = bits[k] & 1u;
        auto& e = table[ctx];
        (b ? e.second : e.first) += 1;
        ones += b;
        ctx = ((ctx << 1) | b) & mask;
    }
    return finish(
        [&](auto f) {
            for (const auto& [key, v] : table) f(v.first, v.second);
        },
        n, ones, m);
}

BitStream bits_from_settings(std::span<const int> settings, std::string label) {
    BitStream s;
    s.label = std::move(label);
    s.bits.reserve(settings.size());
    for (int v : settings) {
        if (v != 1 && v != 2) throw DataError("setting values must be 1 or 2");
        s.bits.push_back(static_cast<std::uint8_t>(v - 1));
    }
    return s;
}

}  // namespace cosmicbell::randbits
