#include <catch2/catch_amalgamated.hpp>

#include "randex/extractor.hpp"
#include "randex/rng.hpp"

using namespace randex;

namespace {

BitString random_bits(SplitMix64& rng, std::size_t n) {
  BitString b;
  b.bits.resize(n);
  for (auto& bit : b.bits) bit = rng.next_bit() ? 1 : 0;
  return b;
}

// Naive reference: build the Toeplitz matrix explicitly and multiply.
BitString toeplitz_matrix_oracle(const BitString& input, const BitString& seed, std::size_t m) {
  const std::size_t n = input.size();
  std::vector<std::vector<std::uint8_t>> T(m, std::vector<std::uint8_t>(n));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) T[j][i] = seed.bits[j - i + n - 1];
  BitString out;
  out.bits.assign(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    unsigned acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += T[j][i] & input.bits[i];
    out.bits[j] = acc & 1u;
  }
  return out;
}

}  // namespace

TEST_CASE("output length accounting") {
  CHECK(output_length(100.0, std::pow(2.0, -10)) == 80);
  CHECK(output_length(10.0, std::pow(2.0, -10)) == 0);
  CHECK(output_length(0.0, 0.5) == 0);
  CHECK_THROWS_AS(output_length(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(output_length(10.0, 1.5), std::invalid_argument);

  auto spec = ExtractorSpec::from_entropy(1000, 200.0, 1e-6);
  CHECK(spec.output_len == static_cast<std::size_t>(output_length(200.0, 1e-6)));
  CHECK(spec.seed_len == spec.input_len + spec.output_len - 1);
}

TEST_CASE("all-zero input hashes to zero") {
  SplitMix64 rng(1);
  BitString input;
  input.bits.assign(64, 0);
  auto seed = random_bits(rng, 64 + 16 - 1);
  auto out = toeplitz_extract(input, seed, 16);
  for (auto b : out.bits) REQUIRE(b == 0);
}

TEST_CASE("matches the naive matrix product exhaustively for short inputs") {
  SplitMix64 rng(2);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t m : {std::size_t{1}, std::size_t{3}}) {
      auto seed = random_bits(rng, n + m - 1);
      for (std::uint32_t word = 0; word < (1u << n); ++word) {
        BitString input;
        input.bits.resize(n);
        for (std::size_t i = 0; i < n; ++i) input.bits[i] = (word >> i) & 1u;
        auto fast = toeplitz_extract(input, seed, m);
        auto ref = toeplitz_matrix_oracle(input, seed, m);
        REQUIRE(fast.bits == ref.bits);
      }
    }
  }
}

TEST_CASE("matches the naive matrix product on random larger instances") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 13 + static_cast<std::size_t>(rng.uniform() * 200);
    std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 48);
    auto input = random_bits(rng, n);
    auto seed = random_bits(rng, n + m - 1);
    REQUIRE(toeplitz_extract(input, seed, m).bits == toeplitz_matrix_oracle(input, seed, m).bits);
  }
  BitString bad_seed;
  bad_seed.bits.assign(10, 0);
  BitString input;
  input.bits.assign(8, 1);
  CHECK_THROWS_AS(toeplitz_extract(input, bad_seed, 4), std::invalid_argument);
}

TEST_CASE("linear over GF(2) for a fixed seed") {
  SplitMix64 rng(4);
  const std::size_t n = 256, m = 32;
  for (int trial = 0; trial < 1000; ++trial) {
    auto seed = random_bits(rng, n + m - 1);
    auto a = random_bits(rng, n);
    auto b = random_bits(rng, n);
    BitString axb;
    axb.bits.resize(n);
    for (std::size_t i = 0; i < n; ++i) axb.bits[i] = a.bits[i] ^ b.bits[i];
    auto ha = toeplitz_extract(a, seed, m);
    auto hb = toeplitz_extract(b, seed, m);
    auto hx = toeplitz_extract(axb, seed, m);
    for (std::size_t j = 0; j < m; ++j) REQUIRE(hx.bits[j] == (ha.bits[j] ^ hb.bits[j]));
  }
}

TEST_CASE("blocked extraction agrees with the single-block path when short") {
  SplitMix64 rng(5);
  auto input = random_bits(rng, 5000);
  auto seed = random_bits(rng, 5000 + 64 - 1);
  CHECK(toeplitz_extract_blocked(input, seed, 64).bits == toeplitz_extract(input, seed, 64).bits);
}

TEST_CASE("bit file round trip") {
  SplitMix64 rng(6);
  auto bits = random_bits(rng, 777);
  std::string path = "/tmp/randex_test_bits.bin";
  write_bits(bits, path);
  auto back = read_bits(path);
  REQUIRE(back.bits == bits.bits);
}
