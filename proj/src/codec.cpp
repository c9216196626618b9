#include "ftlz/codec.hpp"

#include <zlib.h>

#include <string>

#include "ftlz/errors.hpp"

namespace ftlz {

namespace {

void require(std::uint8_t id) {
  if (!codec_registered(id)) throw UnsupportedCodec("codec id " + std::to_string(id) + " is not registered");
}

// (run, byte) pairs with runs of 1..255.
std::vector<std::uint8_t> rle_apply(std::span<const std::uint8_t> in) {
  std::vector<std::uint8_t> out;
  for (std::size_t n = 0; n < in.size();) {
    std::size_t run = 1;
    while (n + run < in.size() && run < 255 && in[n + run] == in[n]) ++run;
    out.push_back(static_cast<std::uint8_t>(run));
    out.push_back(in[n]);
    n += run;
  }
  return out;
}

std::vector<std::uint8_t> rle_invert(std::span<const std::uint8_t> in) {
  if (in.size() % 2 != 0) throw CorruptStream("run-length stream has odd length");
  std::vector<std::uint8_t> out;
  for (std::size_t n = 0; n < in.size(); n += 2) {
    if (in[n] == 0) throw CorruptStream("run-length stream has a zero run");
    out.insert(out.end(), in[n], in[n + 1]);
  }
  return out;
}

// Raw length (u64 LE) followed by a zlib stream.
std::vector<std::uint8_t> deflate_apply(std::span<const std::uint8_t> in) {
  uLongf bound = compressBound(static_cast<uLong>(in.size()));
  std::vector<std::uint8_t> out(8 + bound);
  const std::uint64_t raw = in.size();
  for (int b = 0; b < 8; ++b) out[b] = static_cast<std::uint8_t>(raw >> (8 * b));
  if (compress2(out.data() + 8, &bound, in.data(), static_cast<uLong>(in.size()), Z_BEST_SPEED) != Z_OK)
    throw InternalInvariantViolation("zlib compression failed");
  out.resize(8 + bound);
  return out;
}

std::vector<std::uint8_t> deflate_invert(std::span<const std::uint8_t> in) {
  if (in.size() < 8) throw CorruptStream("deflate frame shorter than its length prefix");
  std::uint64_t raw = 0;
  for (int b = 0; b < 8; ++b) raw |= static_cast<std::uint64_t>(in[b]) << (8 * b);
  // A deflate stream cannot expand more than ~1032:1.
  if (raw > (static_cast<std::uint64_t>(in.size()) + 64) * 1100) throw CorruptStream("deflate frame length is implausible");
  std::vector<std::uint8_t> out(raw);
  uLongf got = static_cast<uLongf>(raw);
  if (uncompress(out.data(), &got, in.data() + 8, static_cast<uLong>(in.size() - 8)) != Z_OK || got != raw)
    throw CorruptStream("deflate frame failed to inflate");
  return out;
}

}  // namespace

bool codec_registered(std::uint8_t id) { return id <= static_cast<std::uint8_t>(CodecId::deflate); }

std::string_view codec_name(std::uint8_t id) {
  switch (id) {
    case 0: return "identity";
    case 1: return "run-length";
    case 2: return "deflate";
    default: return "unknown";
  }
}

std::vector<std::uint8_t> backend_apply(std::span<const std::uint8_t> bytes, std::uint8_t codec_id) {
  require(codec_id);
  switch (static_cast<CodecId>(codec_id)) {
    case CodecId::identity: return {bytes.begin(), bytes.end()};
    case CodecId::run_length: return rle_apply(bytes);
    case CodecId::deflate: return deflate_apply(bytes);
  }
  return {};
}

std::vector<std::uint8_t> backend_invert(std::span<const std::uint8_t> bytes, std::uint8_t codec_id) {
  require(codec_id);
  switch (static_cast<CodecId>(codec_id)) {
    case CodecId::identity: return {bytes.begin(), bytes.end()};
    case CodecId::run_length: return rle_invert(bytes);
    case CodecId::deflate: return deflate_invert(bytes);
  }
  return {};
}

}  // namespace ftlz
