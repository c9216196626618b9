#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>
#include <random>

#include "ftlz/codec.hpp"
#include "ftlz/container.hpp"
#include "ftlz/errors.hpp"
#include "ftlz/huffman.hpp"
#include "ftlz/pipeline.hpp"

using namespace ftlz;

namespace {

// Textbook Huffman over explicit tree nodes; returns leaf depths. Ties merge
// the node holding the smallest symbol first.
std::map<std::uint32_t, unsigned> huffman_oracle(const std::vector<std::uint64_t>& freq) {
  struct Node {
    std::uint64_t w;
    std::uint32_t min_sym;
    int left, right;
  };
  std::vector<Node> nodes;
  using Item = std::pair<std::pair<std::uint64_t, std::uint32_t>, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::uint32_t s = 0; s < freq.size(); ++s)
    if (freq[s]) {
      nodes.push_back({freq[s], s, -1, -1});
      heap.push({{freq[s], s}, static_cast<int>(nodes.size() - 1)});
    }
  std::map<std::uint32_t, unsigned> depth;
  if (nodes.size() == 1) {
    depth[nodes[0].min_sym] = 1;
    return depth;
  }
  while (heap.size() > 1) {
    const auto a = heap.top();
    heap.pop();
    const auto b = heap.top();
    heap.pop();
    nodes.push_back({a.first.first + b.first.first, std::min(a.first.second, b.first.second), a.second, b.second});
    heap.push({{nodes.back().w, nodes.back().min_sym}, static_cast<int>(nodes.size() - 1)});
  }
  std::vector<std::pair<int, unsigned>> stack{{heap.top().second, 0u}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    if (nodes[n].left < 0) {
      depth[nodes[n].min_sym] = d;
    } else {
      stack.push_back({nodes[n].left, d + 1});
      stack.push_back({nodes[n].right, d + 1});
    }
  }
  return depth;
}

std::vector<std::uint32_t> random_bins(std::size_t n, std::uint64_t seed, std::uint32_t alphabet) {
  std::mt19937_64 rng(seed);
  std::geometric_distribution<std::uint32_t> g(0.3);
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = std::min(alphabet - 1, g(rng));
  return v;
}

HuffmanCodebook book_for(const std::vector<std::uint32_t>& bins, std::uint32_t alphabet) {
  std::vector<std::uint64_t> freq(alphabet, 0);
  for (auto b : bins) ++freq[b];
  return HuffmanCodebook::from_frequencies(freq);
}

CompressedStream small_archive(std::uint8_t codec, bool ft = true) {
  FtConfig cfg = ft ? FtConfig{} : FtConfig::unprotected();
  cfg.codec = codec;
  cfg.block_edge = 4;
  cfg.threads = 1;
  return compress(synth_field(SynthKind::mixed, {9, 8, 7}, 3), ErrorBound::absolute(1e-3), cfg).stream;
}

}  // namespace

TEST_CASE("codebook degenerate cases") {
  const std::vector<std::uint64_t> one{0, 0, 5};
  const auto b1 = HuffmanCodebook::from_frequencies(one);
  REQUIRE(b1.symbol_count() == 1);
  CHECK(b1.length_of(2) == 1);
  CHECK(b1.code_of(2) == 0);

  const std::vector<std::uint64_t> two{0, 7, 0, 7};
  const auto b2 = HuffmanCodebook::from_frequencies(two);
  CHECK(b2.length_of(1) == 1);
  CHECK(b2.length_of(3) == 1);
  CHECK(b2.code_of(1) == 0);
  CHECK(b2.code_of(3) == 1);
  CHECK_FALSE(b2.contains(0));
}

TEST_CASE("codebook matches the textbook oracle") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t alphabet = 2 + rng() % 300;
    std::vector<std::uint64_t> freq(alphabet);
    for (auto& f : freq) f = (rng() % 4 == 0) ? 0 : 1 + rng() % (t % 2 ? 10 : 100000);
    if (std::count(freq.begin(), freq.end(), 0u) == static_cast<long>(alphabet)) freq[0] = 1;
    const auto book = HuffmanCodebook::from_frequencies(freq);
    const auto oracle = huffman_oracle(freq);
    REQUIRE(book.symbol_count() == oracle.size());
    std::uint64_t coded = 0, total = 0;
    unsigned fixed = 0;
    while ((1ull << fixed) < oracle.size()) ++fixed;
    for (const auto& [s, d] : oracle) {
      CHECK(book.length_of(s) == d);
      coded += freq[s] * book.length_of(s);
      total += freq[s];
    }
    CHECK(coded <= total * std::max(1u, fixed));
    double kraft = 0;
    for (const auto& e : book.lengths()) kraft += std::ldexp(1.0, -e.length);
    CHECK(kraft <= 1.0);
  }
}

TEST_CASE("canonical codes are prefix-free and ordered by (length, symbol)") {
  const auto bins = random_bins(5000, 2, 64);
  const auto book = book_for(bins, 64);
  auto entries = book.lengths();
  std::sort(entries.begin(), entries.end(),
            [](auto a, auto b) { return std::pair(a.length, a.symbol) < std::pair(b.length, b.symbol); });
  std::uint64_t expect = 0;
  unsigned len = entries.front().length;
  for (std::size_t n = 0; n < entries.size(); ++n) {
    if (n) {
      expect = (expect + 1) << (entries[n].length - len);
      len = entries[n].length;
    }
    CHECK(book.code_of(entries[n].symbol) == expect);
  }
  const auto rebuilt = HuffmanCodebook::from_lengths(book.lengths());
  for (const auto& e : book.lengths()) CHECK(rebuilt.code_of(e.symbol) == book.code_of(e.symbol));
}

TEST_CASE("from_lengths rejects invalid tables") {
  CHECK_THROWS_AS(HuffmanCodebook::from_lengths({{1, 1}, {1, 2}}), CorruptStream);
  CHECK_THROWS_AS(HuffmanCodebook::from_lengths({{1, 1}, {2, 1}, {3, 1}}), CorruptStream);
  CHECK_THROWS_AS(HuffmanCodebook::from_lengths({{1, 0}}), CorruptStream);
  CHECK_THROWS_AS(HuffmanCodebook::from_lengths({{1, 65}}), CorruptStream);
  CHECK_NOTHROW(HuffmanCodebook::from_lengths({{4, 1}}));
}

TEST_CASE("encode_block and decode_block") {
  const auto bins = random_bins(1000, 5, 40);
  const auto book = book_for(bins, 40);

  BitWriter empty;
  CHECK(encode_block({}, book, empty) == 0);
  CHECK(decode_block({}, 0, 0, book, 0).empty());

  BitWriter w;
  const auto bits = encode_block(bins, book, w);
  std::uint64_t sum = 0;
  for (auto b : bins) sum += book.length_of(b);
  CHECK(bits == sum);
  CHECK(w.bit_length() == sum);
  CHECK(decode_block(w.bytes(), 0, bits, book, bins.size()) == bins);

  const std::vector<std::uint32_t> unknown{39, 1000};
  BitWriter w2;
  CHECK_THROWS_AS(encode_block(unknown, book, w2), InternalInvariantViolation);

  // Too few bits or too many bits for the requested count.
  CHECK_THROWS_AS(decode_block(w.bytes(), 0, bits - 1, book, bins.size()), CorruptStream);
  CHECK_THROWS_AS(decode_block(w.bytes(), 0, bits, book, bins.size() - 1), CorruptStream);
  CHECK_THROWS_AS(decode_block(w.bytes(), 0, bits + 64, book, bins.size()), CorruptStream);
}

TEST_CASE("round trip on random bin arrays, unaligned offsets") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_bins(1 + rng() % 700, rng(), 65536);
    const auto b = random_bins(1 + rng() % 700, rng(), 65536);
    std::vector<std::uint32_t> all(a);
    all.insert(all.end(), b.begin(), b.end());
    const auto book = book_for(all, 65536);
    BitWriter wa, wb, joined;
    const auto la = encode_block(a, book, wa);
    const auto lb = encode_block(b, book, wb);
    joined.append(wa);
    joined.append(wb);
    REQUIRE(joined.bit_length() == la + lb);
    CHECK(decode_block(joined.bytes(), 0, la, book, a.size()) == a);
    CHECK(decode_block(joined.bytes(), la, lb, book, b.size()) == b);
  }
}

TEST_CASE("every single-bit corruption decodes or throws, never crashes") {
  const auto bins = random_bins(64, 21, 16);
  const auto book = book_for(bins, 16);
  BitWriter w;
  const auto bits = encode_block(bins, book, w);
  std::size_t changed = 0, rejected = 0;
  for (std::uint64_t bit = 0; bit < bits; ++bit) {
    auto bytes = w.bytes();
    bytes[bit >> 3] ^= static_cast<std::uint8_t>(0x80u >> (bit & 7));
    try {
      if (decode_block(bytes, 0, bits, book, bins.size()) != bins) ++changed;
    } catch (const CorruptStream&) {
      ++rejected;
    }
  }
  CHECK(changed + rejected == bits);
}

TEST_CASE("blockwise isolation under payload bit flips") {
  std::vector<std::vector<std::uint32_t>> blocks;
  std::vector<std::uint32_t> all;
  for (int b = 0; b < 6; ++b) {
    blocks.push_back(random_bins(30 + 7 * b, 100 + b, 12));
    all.insert(all.end(), blocks.back().begin(), blocks.back().end());
  }
  const auto book = book_for(all, 12);
  BitWriter payload;
  std::vector<std::uint64_t> offset{0}, length;
  for (const auto& blk : blocks) {
    BitWriter w;
    length.push_back(encode_block(blk, book, w));
    payload.append(w);
    offset.push_back(offset.back() + length.back());
  }
  for (std::uint64_t bit = 0; bit < payload.bit_length(); ++bit) {
    auto bytes = payload.bytes();
    bytes[bit >> 3] ^= static_cast<std::uint8_t>(0x80u >> (bit & 7));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (bit >= offset[b] && bit < offset[b + 1]) continue;
      REQUIRE(decode_block(bytes, offset[b], length[b], book, blocks[b].size()) == blocks[b]);
    }
  }
}

TEST_CASE("backend codecs") {
  std::mt19937_64 rng(4);
  for (std::size_t n : {0u, 1u, 2u, 255u, 256u, 257u, 5000u}) {
    std::vector<std::uint8_t> data(n);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng() % 4 ? 0 : rng());
    for (std::uint8_t id : {0, 1, 2}) {
      const auto enc = backend_apply(data, id);
      if (id == 0) CHECK(enc.size() == data.size());
      CHECK(backend_invert(enc, id) == data);
    }
  }
  const std::vector<std::uint8_t> run(1000, 7);
  CHECK(backend_apply(run, 1).size() == 8);
  CHECK(codec_registered(0));
  CHECK_FALSE(codec_registered(9));
  CHECK_THROWS_AS(backend_apply(run, 9), UnsupportedCodec);
  CHECK_THROWS_AS(backend_invert(run, 9), UnsupportedCodec);
  CHECK_THROWS_AS(backend_invert(std::vector<std::uint8_t>{0, 5}, 1), CorruptStream);
  CHECK_THROWS_AS(backend_invert(std::vector<std::uint8_t>{3}, 1), CorruptStream);
  CHECK_THROWS_AS(backend_invert(std::vector<std::uint8_t>{1, 2, 3}, 2), CorruptStream);
}

TEST_CASE("serialize and parse") {
  for (std::uint8_t codec : {0, 1, 2}) {
    const auto s = small_archive(codec);
    const auto bytes = serialize(s);
    const auto back = parse(bytes);
    CHECK(back == s);
    CHECK(serialize(back) == bytes);
    CHECK(back.header.dims == Dims{9, 8, 7});
    CHECK(std::equal(bytes.begin(), bytes.begin() + 4, "FTLZ"));
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == codec);
  }
}

TEST_CASE("truncation at every byte boundary is rejected") {
  const auto bytes = serialize(small_archive(0));
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    CAPTURE(n);
    CHECK_THROWS_AS(parse(std::span(bytes).first(n)), CorruptStream);
  }
  auto extra = bytes;
  extra.push_back(0);
  CHECK_THROWS_AS(parse(extra), CorruptStream);
}

TEST_CASE("bad magic and version carry an offset") {
  auto bytes = serialize(small_archive(0));
  bytes[0] = 'X';
  try {
    parse(bytes);
    FAIL("accepted bad magic");
  } catch (const CorruptStream& e) {
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }
  bytes[0] = 'F';
  bytes[4] = 2;
  CHECK_THROWS_AS(parse(bytes), CorruptStream);
}

TEST_CASE("payload_section locates the stored payload") {
  const auto s = small_archive(0);
  const auto bytes = serialize(s);
  const auto sec = payload_section(bytes);
  REQUIRE(sec.size == s.payload.size());
  CHECK(std::equal(s.payload.begin(), s.payload.end(), bytes.begin() + static_cast<long>(sec.offset)));
}

TEST_CASE("sum_dc costs exactly 8 bytes per block before the codec") {
  const auto on = small_archive(0, true);
  const auto off = small_archive(0, false);
  CHECK(on.sum_dc_raw_length == 8 * on.header.block_count);
  CHECK(on.sum_dc.size() == on.sum_dc_raw_length);
  CHECK_FALSE(off.has_sum_dc());
  CHECK(serialize(on).size() - serialize(off).size() == 8 * on.header.block_count);

  const std::vector<std::uint64_t> sums{1, 0xFFFFFFFFFFFFFFFFull, 42};
  CHECK(sum_dc_values(sum_dc_bytes(sums), 3) == sums);
  CHECK_THROWS_AS(sum_dc_values(sum_dc_bytes(sums), 2), CorruptStream);
}
