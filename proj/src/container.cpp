#include "ftlz/container.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "ftlz/errors.hpp"

namespace ftlz {

namespace {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put_le(std::uint64_t v, int n) {
    for (int b = 0; b < n; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8(const char* what) { return static_cast<std::uint8_t>(get_le(1, what)); }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(get_le(4, what)); }
  std::uint64_t u64(const char* what) { return get_le(8, what); }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::span<const std::uint8_t> bytes(std::uint64_t n, const char* what) {
    need(n, what);
    auto s = in_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return s;
  }
  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw CorruptStream(msg + " (at byte offset " + std::to_string(pos_) + ")");
  }

 private:
  void need(std::uint64_t n, const char* what) {
    if (n > remaining()) fail(std::string("truncated archive while reading ") + what);
  }
  std::uint64_t get_le(int n, const char* what) {
    need(static_cast<std::uint64_t>(n), what);
    std::uint64_t v = 0;
    for (int b = 0; b < n; ++b) v |= static_cast<std::uint64_t>(in_[pos_ + b]) << (8 * b);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const CompressedStream& s) {
  ByteWriter w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u8(kFormatVersion);
  w.u8(s.header.codec);
  w.u64(s.header.dims.nx);
  w.u64(s.header.dims.ny);
  w.u64(s.header.dims.nz);
  w.u32(s.header.block_edge);
  w.u8(static_cast<std::uint8_t>(s.header.bound.mode));
  w.f64(s.header.bound.value);
  w.f64(s.header.eb_abs);
  w.u32(s.header.bin_capacity);
  w.u64(s.header.block_count);

  for (const BlockRecord& b : s.blocks) {
    w.u8(static_cast<std::uint8_t>(b.predictor));
    w.u32(b.unpredictable_count);
    w.u32(b.bit_length);
    if (b.predictor == PredictorKind::regression)
      for (float c : b.coeffs.b) w.u32(std::bit_cast<std::uint32_t>(c));
  }

  w.u32(static_cast<std::uint32_t>(s.codebook.size()));
  for (const SymbolLength& e : s.codebook) {
    w.u32(e.symbol);
    w.u8(e.length);
  }

  w.u64(s.payload.size());
  w.bytes(s.payload);

  w.u64(s.unpredictable.size());
  for (std::uint32_t word : s.unpredictable) w.u32(word);

  w.u64(s.sum_dc_raw_length);
  w.u64(s.sum_dc.size());
  w.bytes(s.sum_dc);
  return w.take();
}

CompressedStream parse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  CompressedStream s;

  for (char c : kMagic)
    if (r.u8("magic") != static_cast<std::uint8_t>(c)) r.fail("bad magic");
  if (const auto v = r.u8("version"); v != kFormatVersion) r.fail("unsupported format version " + std::to_string(v));

  StreamHeader& h = s.header;
  h.codec = r.u8("codec");
  h.dims.nx = r.u64("dims");
  h.dims.ny = r.u64("dims");
  h.dims.nz = r.u64("dims");
  h.block_edge = r.u32("block edge");
  const auto mode = r.u8("bound mode");
  if (mode > 1) r.fail("unknown error-bound mode");
  h.bound.mode = static_cast<BoundMode>(mode);
  h.bound.value = r.f64("bound value");
  h.eb_abs = r.f64("resolved bound");
  h.bin_capacity = r.u32("bin capacity");
  h.block_count = r.u64("block count");

  if (h.dims.nx == 0 || h.dims.ny == 0 || h.dims.nz == 0) r.fail("zero dimension");
  // Reject sizes that would overflow before trying to tile them.
  if (h.dims.nx > (1ull << 40) || h.dims.ny > (1ull << 40) || h.dims.nz > (1ull << 40) ||
      (h.dims.nx * h.dims.ny) > (1ull << 48) || h.dims.nx * h.dims.ny * h.dims.nz / h.dims.nz != h.dims.nx * h.dims.ny)
    r.fail("dimensions out of range");
  if (h.block_edge < kMinBlockEdge || h.block_edge > kMaxBlockEdge) r.fail("block edge out of range");
  if (!(h.eb_abs > 0.0)) r.fail("resolved error bound is not positive");
  if (h.bin_capacity < 4 || (h.bin_capacity & (h.bin_capacity - 1)) != 0) r.fail("bin capacity is not a power of two");
  const auto edge = h.block_edge;
  const std::uint64_t expected_blocks = ((h.dims.nx + edge - 1) / edge) * ((h.dims.ny + edge - 1) / edge) *
                                        ((h.dims.nz + edge - 1) / edge);
  if (h.block_count != expected_blocks) r.fail("block count does not match the tiling");
  // Every table entry is at least 9 bytes.
  if (h.block_count > r.remaining() / 9) r.fail("block table is truncated");

  s.blocks.resize(static_cast<std::size_t>(h.block_count));
  std::uint64_t unpredictable_total = 0;
  for (BlockRecord& b : s.blocks) {
    const auto kind = r.u8("predictor");
    if (kind > 1) r.fail("unknown predictor kind");
    b.predictor = static_cast<PredictorKind>(kind);
    b.unpredictable_count = r.u32("unpredictable count");
    b.bit_length = r.u32("bit length");
    if (b.predictor == PredictorKind::regression)
      for (float& c : b.coeffs.b) c = std::bit_cast<float>(r.u32("coefficient"));
    unpredictable_total += b.unpredictable_count;
  }

  const std::uint32_t symbols = r.u32("codebook size");
  if (symbols > r.remaining() / 5) r.fail("codebook is truncated");
  s.codebook.resize(symbols);
  for (SymbolLength& e : s.codebook) {
    e.symbol = r.u32("codebook symbol");
    e.length = r.u8("codebook length");
    if (e.symbol >= h.bin_capacity) r.fail("codebook symbol outside the bin range");
  }

  const std::uint64_t payload_size = r.u64("payload length");
  const auto payload = r.bytes(payload_size, "payload");
  s.payload.assign(payload.begin(), payload.end());

  const std::uint64_t words = r.u64("unpredictable count");
  if (words != unpredictable_total) r.fail("unpredictable section disagrees with the block table");
  if (words > r.remaining() / 4) r.fail("unpredictable section is truncated");
  s.unpredictable.resize(static_cast<std::size_t>(words));
  for (std::uint32_t& word : s.unpredictable) word = r.u32("unpredictable word");

  s.sum_dc_raw_length = r.u64("checksum raw length");
  if (s.sum_dc_raw_length != 0 && s.sum_dc_raw_length != 8 * h.block_count)
    r.fail("checksum section length does not match the block count");
  const std::uint64_t dc_size = r.u64("checksum stored length");
  const auto dc = r.bytes(dc_size, "checksum section");
  s.sum_dc.assign(dc.begin(), dc.end());

  if (r.remaining() != 0) r.fail("trailing bytes after the archive");
  return s;
}

SectionSpan payload_section(std::span<const std::uint8_t> archive) {
  const CompressedStream s = parse(archive);
  std::size_t offset = 4 + 1 + 1 + 24 + 4 + 1 + 8 + 8 + 4 + 8;
  for (const BlockRecord& b : s.blocks) offset += 9 + (b.predictor == PredictorKind::regression ? 16 : 0);
  offset += 4 + 5 * s.codebook.size() + 8;
  return {offset, s.payload.size()};
}

BlockOffsets block_offsets(const CompressedStream& s) {
  BlockOffsets o;
  o.bit_offset.resize(s.blocks.size() + 1, 0);
  o.unpredictable_offset.resize(s.blocks.size() + 1, 0);
  for (std::size_t b = 0; b < s.blocks.size(); ++b) {
    o.bit_offset[b + 1] = o.bit_offset[b] + s.blocks[b].bit_length;
    o.unpredictable_offset[b + 1] = o.unpredictable_offset[b] + s.blocks[b].unpredictable_count;
  }
  return o;
}

std::vector<std::uint8_t> sum_dc_bytes(std::span<const std::uint64_t> sums) {
  ByteWriter w;
  for (std::uint64_t v : sums) w.u64(v);
  return w.take();
}

std::vector<std::uint64_t> sum_dc_values(std::span<const std::uint8_t> raw, std::size_t block_count) {
  if (raw.size() != 8 * block_count) throw CorruptStream("checksum section has the wrong size after decoding");
  ByteReader r(raw);
  std::vector<std::uint64_t> out(block_count);
  for (auto& v : out) v = r.u64("checksum");
  return out;
}

}  // namespace ftlz
