#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace randex {

// Bits are stored least-significant-bit-first within each byte. Files carry
// an 8-byte header: magic "RXB", one version byte, and the bit length as a
// 32-bit little-endian count.
struct BitString {
  std::vector<std::uint8_t> bits;  // one bit per entry

  std::size_t size() const { return bits.size(); }
};

inline void write_bits(const BitString& b, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  std::uint8_t header[8] = {'R', 'X', 'B', 1, 0, 0, 0, 0};
  std::uint32_t n = static_cast<std::uint32_t>(b.size());
  header[4] = n & 0xff;
  header[5] = (n >> 8) & 0xff;
  header[6] = (n >> 16) & 0xff;
  header[7] = (n >> 24) & 0xff;
  out.write(reinterpret_cast<const char*>(header), 8);
  std::vector<std::uint8_t> packed((b.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  out.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
}

inline BitString read_bits(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint8_t header[8];
  in.read(reinterpret_cast<char*>(header), 8);
  if (in.gcount() != 8 || header[0] != 'R' || header[1] != 'X' || header[2] != 'B')
    throw std::runtime_error("bit file: bad magic in " + path);
  if (header[3] != 1) throw std::runtime_error("bit file: unsupported version");
  std::uint32_t n = header[4] | (header[5] << 8) | (header[6] << 16) |
                    (static_cast<std::uint32_t>(header[7]) << 24);
  std::vector<std::uint8_t> packed((n + 7) / 8);
  in.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
  if (in.gcount() != static_cast<std::streamsize>(packed.size()))
    throw std::runtime_error("bit file: truncated " + path);
  BitString b;
  b.bits.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) b.bits[i] = (packed[i / 8] >> (i % 8)) & 1u;
  return b;
}

// Leftover-hash output length for a given min-entropy budget.
inline long output_length(double h_min, double eps_ext) {
  if (h_min < 0.0) throw std::invalid_argument("output_length: negative min-entropy");
  if (!(eps_ext > 0.0) || eps_ext >= 1.0) throw std::invalid_argument("output_length: bad eps_ext");
  double m = std::floor(h_min - 2.0 * std::log2(1.0 / eps_ext));
  return m <= 0.0 ? 0 : static_cast<long>(m);
}

struct ExtractorSpec {
  std::size_t input_len = 0;
  std::size_t output_len = 0;
  double eps_ext = 0.0;
  std::size_t seed_len = 0;  // input_len + output_len - 1 per block

  static ExtractorSpec from_entropy(std::size_t input_len, double h_min, double eps_ext) {
    ExtractorSpec s;
    s.input_len = input_len;
    s.eps_ext = eps_ext;
    long m = output_length(h_min, eps_ext);
    s.output_len = std::min<std::size_t>(input_len, static_cast<std::size_t>(m < 0 ? 0 : m));
    s.seed_len = s.output_len == 0 ? 0 : s.input_len + s.output_len - 1;
    return s;
  }
};

// Toeplitz hashing: output bit j is the parity of the input AND the j-th
// diagonal band of the Toeplitz matrix described by the seed. Seed length
// must be input length + m - 1. Linear over GF(2) in the input.
inline BitString toeplitz_extract(const BitString& input, const BitString& seed, std::size_t m) {
  const std::size_t n = input.size();
  if (m == 0) return {};
  if (seed.size() != n + m - 1)
    throw std::invalid_argument("toeplitz_extract: seed length must be input + output - 1");
  BitString out;
  out.bits.assign(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    unsigned acc = 0;
    // matrix entry (j, i) = seed[j - i + n - 1]
    const std::size_t base = j + n - 1;
    for (std::size_t i = 0; i < n; ++i) acc ^= static_cast<unsigned>(input.bits[i] & seed.bits[base - i]);
    out.bits[j] = static_cast<std::uint8_t>(acc & 1u);
  }
  return out;
}

inline constexpr std::size_t kExtractorBlockBits = std::size_t{1} << 20;

// Long inputs are processed in fixed-size blocks with independent seed
// segments; block outputs are combined by XOR, which preserves
// two-universality of the family.
inline BitString toeplitz_extract_blocked(const BitString& input, const BitString& seed,
                                          std::size_t m) {
  if (m == 0) return {};
  const std::size_t nblocks = (input.size() + kExtractorBlockBits - 1) / kExtractorBlockBits;
  if (nblocks <= 1) return toeplitz_extract(input, seed, m);
  std::size_t need = 0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    std::size_t len = std::min(kExtractorBlockBits, input.size() - b * kExtractorBlockBits);
    need += len + m - 1;
  }
  if (seed.size() != need) throw std::invalid_argument("toeplitz_extract_blocked: bad seed length");
  BitString out;
  out.bits.assign(m, 0);
  std::size_t seed_off = 0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    std::size_t len = std::min(kExtractorBlockBits, input.size() - b * kExtractorBlockBits);
    BitString block, bseed;
    block.bits.assign(input.bits.begin() + static_cast<long>(b * kExtractorBlockBits),
                      input.bits.begin() + static_cast<long>(b * kExtractorBlockBits + len));
    bseed.bits.assign(seed.bits.begin() + static_cast<long>(seed_off),
                      seed.bits.begin() + static_cast<long>(seed_off + len + m - 1));
    seed_off += len + m - 1;
    BitString h = toeplitz_extract(block, bseed, m);
    for (std::size_t j = 0; j < m; ++j) out.bits[j] ^= h.bits[j];
  }
  return out;
}

inline std::size_t blocked_seed_length(std::size_t input_len, std::size_t m) {
  if (m == 0) return 0;
  const std::size_t nblocks = (input_len + kExtractorBlockBits - 1) / kExtractorBlockBits;
  if (nblocks <= 1) return input_len + m - 1;
  std::size_t need = 0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    std::size_t len = std::min(kExtractorBlockBits, input_len - b * kExtractorBlockBits);
    need += len + m - 1;
  }
  return need;
}

}  // namespace randex
