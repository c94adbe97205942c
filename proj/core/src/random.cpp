#include "qdp/random.hpp"

namespace qdp {
namespace {

RandomStream::engine_type seeded_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return RandomStream::engine_type(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(seeded_engine(seed)) {}

RandomStream RandomStream::split(std::uint64_t key) const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    0x9e3779b9u};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return RandomStream((static_cast<std::uint64_t>(words[1]) << 32) | words[0]);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::standard_normal() { return normal_(engine_); }

}  // namespace qdp
