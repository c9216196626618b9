#include "ftlz/checksum.hpp"

#include <string>

#include "ftlz/errors.hpp"

namespace ftlz {

namespace {

// Uniform word access over 32-bit and split 64-bit element storage.
struct F32Words {
  std::span<const float> v;
  std::size_t size() const { return v.size(); }
  std::uint32_t operator[](std::size_t i) const { return word_of(v[i]); }
};

struct F64Words {
  std::span<const double> v;
  std::size_t size() const { return 2 * v.size(); }
  std::uint32_t operator[](std::size_t i) const {
    const auto bits = std::bit_cast<std::uint64_t>(v[i / 2]);
    return static_cast<std::uint32_t>((i % 2 == 0) ? bits : bits >> 32);
  }
};

struct U32Words {
  std::span<const std::uint32_t> v;
  std::size_t size() const { return v.size(); }
  std::uint32_t operator[](std::size_t i) const { return v[i]; }
};

template <class Words>
ChecksumPair accumulate(const Words& w) {
  if (w.size() > kMaxChecksumWords)
    throw BlockTooLarge("checksum block of " + std::to_string(w.size()) + " words exceeds the 2^20 word cap");
  ChecksumPair p;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::uint64_t x = w[i];
    p.sum += x;
    p.isum += static_cast<std::uint64_t>(i) * x;
  }
  return p;
}

void store_word(std::span<std::uint32_t> w, std::size_t i, std::uint32_t x) { w[i] = x; }
void store_word(std::span<float> w, std::size_t i, std::uint32_t x) { w[i] = float_of(x); }
void store_word(std::span<double> w, std::size_t i, std::uint32_t x) {
  auto bits = std::bit_cast<std::uint64_t>(w[i / 2]);
  if (i % 2 == 0)
    bits = (bits & 0xFFFFFFFF00000000ull) | x;
  else
    bits = (bits & 0x00000000FFFFFFFFull) | (static_cast<std::uint64_t>(x) << 32);
  w[i / 2] = std::bit_cast<double>(bits);
}

auto words_view(std::span<std::uint32_t> s) { return U32Words{s}; }
auto words_view(std::span<float> s) { return F32Words{s}; }
auto words_view(std::span<double> s) { return F64Words{s}; }

template <class T>
CorrectionOutcome correct_impl(std::span<T> values, const ChecksumPair& stored) {
  const auto words = words_view(values);
  const ChecksumPair now = accumulate(words);
  if (now == stored) return {};

  CorrectionOutcome uncorrectable{CorrectionStatus::uncorrectable, {}, {}, {}};
  const std::uint64_t dsum = now.sum - stored.sum;
  const std::uint64_t disum = now.isum - stored.isum;
  const auto j = locate_corruption(dsum, disum, words.size());
  if (!j) return uncorrectable;

  const std::uint32_t old_word = words[*j];
  const std::uint64_t restored = static_cast<std::uint64_t>(old_word) - dsum;
  if (restored > 0xFFFFFFFFull) return uncorrectable;

  store_word(values, *j, static_cast<std::uint32_t>(restored));
  if (accumulate(words_view(values)) != stored) {
    store_word(values, *j, old_word);
    return uncorrectable;
  }
  return {CorrectionStatus::corrected, *j, old_word, static_cast<std::uint32_t>(restored)};
}

}  // namespace

ChecksumPair checksum_words(std::span<const std::uint32_t> words) { return accumulate(U32Words{words}); }
ChecksumPair checksum_block(std::span<const float> values) { return accumulate(F32Words{values}); }
ChecksumPair checksum_block_f64(std::span<const double> values) { return accumulate(F64Words{values}); }

std::uint64_t word_sum(std::span<const float> values) {
  std::uint64_t s = 0;
  for (float v : values) s += word_of(v);
  return s;
}

Integrity verify_block(std::span<const std::uint32_t> words, const ChecksumPair& stored) {
  return checksum_words(words) == stored ? Integrity::clean : Integrity::corrupted;
}
Integrity verify_block(std::span<const float> values, const ChecksumPair& stored) {
  return checksum_block(values) == stored ? Integrity::clean : Integrity::corrupted;
}
Integrity verify_block(std::span<const double> values, const ChecksumPair& stored) {
  return checksum_block_f64(values) == stored ? Integrity::clean : Integrity::corrupted;
}

std::optional<std::size_t> locate_corruption(std::uint64_t delta_sum, std::uint64_t delta_isum, std::size_t n) {
  // Division is meaningless under wraparound, so scan every candidate and
  // insist on a unique hit.
  std::optional<std::size_t> hit;
  std::uint64_t acc = 0;  // j * delta_sum
  for (std::size_t j = 0; j < n; ++j, acc += delta_sum) {
    if (acc != delta_isum) continue;
    if (hit) return std::nullopt;
    hit = j;
  }
  return hit;
}

CorrectionOutcome locate_and_correct(std::span<std::uint32_t> words, const ChecksumPair& stored) {
  return correct_impl(words, stored);
}
CorrectionOutcome locate_and_correct(std::span<float> values, const ChecksumPair& stored) {
  return correct_impl(values, stored);
}
CorrectionOutcome locate_and_correct(std::span<double> values, const ChecksumPair& stored) {
  return correct_impl(values, stored);
}

}  // namespace ftlz
