#include "ftlz/huffman.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <tuple>

#include "ftlz/errors.hpp"

namespace ftlz {

void BitWriter::put(std::uint64_t code, unsigned length) {
  for (unsigned b = length; b-- > 0;) {
    if ((bits_ & 7) == 0) bytes_.push_back(0);
    if ((code >> b) & 1u) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ & 7));
    ++bits_;
  }
}

void BitWriter::append(const BitWriter& other) {
  if ((bits_ & 7) == 0) {
    bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
    bits_ += other.bits_;
    return;
  }
  const unsigned shift = bits_ & 7;
  std::uint64_t remaining = other.bits_;
  for (std::uint8_t byte : other.bytes_) {
    const unsigned take = static_cast<unsigned>(std::min<std::uint64_t>(8, remaining));
    bytes_.back() |= static_cast<std::uint8_t>(byte >> shift);
    if (take > 8 - shift) bytes_.push_back(static_cast<std::uint8_t>(byte << (8 - shift)));
    bits_ += take;
    remaining -= take;
  }
}

BitReader::BitReader(std::span<const std::uint8_t> data, std::uint64_t begin, std::uint64_t end)
    : data_(data), begin_(begin), pos_(begin), end_(end) {
  if (begin > end || end > static_cast<std::uint64_t>(data.size()) * 8)
    throw CorruptStream("bit window [" + std::to_string(begin) + ", " + std::to_string(end) + ") exceeds payload");
}

HuffmanCodebook HuffmanCodebook::from_frequencies(std::span<const std::uint64_t> freq) {
  struct Node {
    std::uint64_t weight;
    std::uint32_t min_symbol;
    int left = -1, right = -1;
  };
  std::vector<Node> nodes;
  for (std::size_t s = 0; s < freq.size(); ++s)
    if (freq[s] > 0) nodes.push_back({freq[s], static_cast<std::uint32_t>(s)});
  if (nodes.empty()) throw InvalidArgument("cannot build a codebook from an empty frequency table");

  HuffmanCodebook book;
  if (nodes.size() == 1) {
    book.lengths_.push_back({nodes[0].min_symbol, 1});
    book.assign_codes();
    return book;
  }

  // Ties on weight break toward the subtree holding the smaller symbol.
  auto later = [&nodes](int a, int b) {
    return std::tie(nodes[a].weight, nodes[a].min_symbol) > std::tie(nodes[b].weight, nodes[b].min_symbol);
  };
  std::priority_queue<int, std::vector<int>, decltype(later)> heap(later);
  const int leaves = static_cast<int>(nodes.size());
  for (int n = 0; n < leaves; ++n) heap.push(n);
  while (heap.size() > 1) {
    const int a = heap.top();
    heap.pop();
    const int b = heap.top();
    heap.pop();
    nodes.push_back({nodes[a].weight + nodes[b].weight, std::min(nodes[a].min_symbol, nodes[b].min_symbol), a, b});
    heap.push(static_cast<int>(nodes.size()) - 1);
  }

  std::vector<unsigned> depth(nodes.size(), 0);
  for (int n = static_cast<int>(nodes.size()) - 1; n >= leaves; --n) {
    depth[nodes[n].left] = depth[n] + 1;
    depth[nodes[n].right] = depth[n] + 1;
  }
  for (int n = 0; n < leaves; ++n) {
    if (depth[n] > kMaxCodeLength) throw InternalInvariantViolation("Huffman code length exceeds 64 bits");
    book.lengths_.push_back({nodes[n].min_symbol, static_cast<std::uint8_t>(depth[n])});
  }
  book.assign_codes();
  return book;
}

HuffmanCodebook HuffmanCodebook::from_lengths(std::vector<SymbolLength> lengths) {
  if (lengths.empty()) throw CorruptStream("codebook has no symbols");
  std::sort(lengths.begin(), lengths.end(), [](auto& a, auto& b) { return a.symbol < b.symbol; });
  // Kraft sum over 2^-len must not exceed one; track it in units of 2^-64.
  unsigned __int128 kraft = 0;
  const unsigned __int128 one = static_cast<unsigned __int128>(1) << kMaxCodeLength;
  for (std::size_t n = 0; n < lengths.size(); ++n) {
    if (n > 0 && lengths[n].symbol == lengths[n - 1].symbol) throw CorruptStream("codebook repeats a symbol");
    if (lengths[n].length == 0 || lengths[n].length > kMaxCodeLength) throw CorruptStream("codebook length out of range");
    kraft += one >> lengths[n].length;
  }
  if (kraft > one) throw CorruptStream("codebook violates the Kraft inequality");
  HuffmanCodebook book;
  book.lengths_ = std::move(lengths);
  book.assign_codes();
  return book;
}

void HuffmanCodebook::assign_codes() {
  std::vector<SymbolLength> order = lengths_;
  std::sort(order.begin(), order.end(),
            [](auto& a, auto& b) { return std::tie(a.length, a.symbol) < std::tie(b.length, b.symbol); });
  max_len_ = order.back().length;

  const std::uint32_t max_symbol = lengths_.back().symbol;
  codes_.assign(static_cast<std::size_t>(max_symbol) + 1, 0);
  code_len_.assign(static_cast<std::size_t>(max_symbol) + 1, 0);
  first_code_.assign(max_len_ + 2, 0);
  first_index_.assign(max_len_ + 2, 0);
  count_.assign(max_len_ + 2, 0);
  sorted_symbols_.clear();

  std::uint64_t code = 0;
  unsigned len = order.front().length;
  for (std::size_t n = 0; n < order.size(); ++n) {
    if (order[n].length != len) {
      code <<= (order[n].length - len);
      len = order[n].length;
    }
    if (count_[len] == 0) {
      first_code_[len] = code;
      first_index_[len] = static_cast<std::uint32_t>(n);
    }
    ++count_[len];
    codes_[order[n].symbol] = code;
    code_len_[order[n].symbol] = order[n].length;
    sorted_symbols_.push_back(order[n].symbol);
    ++code;
  }
}

bool HuffmanCodebook::contains(std::uint32_t symbol) const {
  return symbol < code_len_.size() && code_len_[symbol] != 0;
}

unsigned HuffmanCodebook::length_of(std::uint32_t symbol) const { return contains(symbol) ? code_len_[symbol] : 0; }

std::uint64_t HuffmanCodebook::code_of(std::uint32_t symbol) const { return contains(symbol) ? codes_[symbol] : 0; }

bool HuffmanCodebook::decode_one(BitReader& in, std::uint32_t& symbol) const {
  std::uint64_t code = 0;
  for (unsigned len = 1; len <= max_len_; ++len) {
    const int bit = in.get();
    if (bit < 0) return false;
    code = (code << 1) | static_cast<std::uint64_t>(bit);
    if (count_[len] != 0 && code >= first_code_[len] && code - first_code_[len] < count_[len]) {
      symbol = sorted_symbols_[first_index_[len] + (code - first_code_[len])];
      return true;
    }
  }
  return false;
}

std::uint64_t encode_block(std::span<const std::uint32_t> bins, const HuffmanCodebook& book, BitWriter& out) {
  const std::uint64_t start = out.bit_length();
  for (std::uint32_t s : bins) {
    if (!book.contains(s)) throw InternalInvariantViolation("bin " + std::to_string(s) + " has no Huffman code");
    out.put(book.code_of(s), book.length_of(s));
  }
  return out.bit_length() - start;
}

std::vector<std::uint32_t> decode_block(std::span<const std::uint8_t> payload, std::uint64_t bit_offset,
                                        std::uint64_t bit_length, const HuffmanCodebook& book, std::size_t count) {
  BitReader in(payload, bit_offset, bit_offset + bit_length);
  std::vector<std::uint32_t> out(count);
  for (std::size_t n = 0; n < count; ++n)
    if (!book.decode_one(in, out[n]))
      throw CorruptStream("Huffman decode failed at symbol " + std::to_string(n) + " of block starting at bit " +
                          std::to_string(bit_offset));
  if (in.consumed() != bit_length) throw CorruptStream("block bit length does not match its decoded symbols");
  return out;
}

}  // namespace ftlz
