#include "mpclab/bits.hpp"

#include <stdexcept>

namespace mpclab {

BitString BitString::from_u64(uint64_t value, size_t nbits) {
    BitString s;
    s.append_bits(value, nbits);
    return s;
}

BitString BitString::parse(const std::string& str) {
    BitString s;
    for (char c : str) {
        if (c != '0' && c != '1') throw std::invalid_argument("BitString::parse: not a bit");
        s.append_bits(c == '1' ? 1 : 0, 1);
    }
    return s;
}

void BitString::append_bits(uint64_t value, size_t count) {
    if (count == 0) return;
    if (count < 64) value &= (uint64_t(1) << count) - 1;
    size_t word_idx = nbits_ >> 6;
    size_t bit_idx = nbits_ & 63;
    nbits_ += count;
    words_.resize((nbits_ + 63) / 64, 0);
    words_[word_idx] |= value << bit_idx;
    if (bit_idx + count > 64) {
        words_[word_idx + 1] |= value >> (64 - bit_idx);
    }
}

void BitString::append(const BitString& other) {
    size_t left = other.nbits_;
    size_t pos = 0;
    while (left > 0) {
        size_t take = left < 64 ? left : 64;
        append_bits(other.read_bits(pos, take), take);
        pos += take;
        left -= take;
    }
}

uint64_t BitString::read_bits(size_t pos, size_t count) const {
    if (count == 0) return 0;
    size_t word_idx = pos >> 6;
    size_t bit_idx = pos & 63;
    uint64_t v = word(word_idx) >> bit_idx;
    if (bit_idx + count > 64) {
        v |= word(word_idx + 1) << (64 - bit_idx);
    }
    if (count < 64) v &= (uint64_t(1) << count) - 1;
    return v;
}

BitString BitString::slice(size_t pos, size_t count) const {
    BitString out;
    size_t left = count;
    size_t p = pos;
    while (left > 0) {
        size_t take = left < 64 ? left : 64;
        out.append_bits(read_bits(p, take), take);
        p += take;
        left -= take;
    }
    return out;
}

uint64_t BitString::as_integer_mod_u64(uint64_t m) const {
    // MSB-first Horner in 64-bit chunks: r = (r << k | chunk) mod m, with
    // 128-bit intermediates. One division per chunk instead of one per bit;
    // committee equality tests reduce strings tens of kilobits long.
    if (m == 1) return 0;
    unsigned __int128 r = 0;
    size_t pos = 0;
    while (pos < nbits_) {
        size_t take = nbits_ - pos < 64 ? nbits_ - pos : 64;
        // read_bits puts bit `pos` in the low position; as an integer it is the
        // most significant of the chunk, so reverse.
        uint64_t chunk = bit_reverse_u64(read_bits(pos, take)) >> (64 - take);
        r = ((r << take) | chunk) % m;
        pos += take;
    }
    return uint64_t(r);
}

uint64_t bit_reverse_u64(uint64_t v) {
    v = ((v >> 1) & 0x5555555555555555ull) | ((v & 0x5555555555555555ull) << 1);
    v = ((v >> 2) & 0x3333333333333333ull) | ((v & 0x3333333333333333ull) << 2);
    v = ((v >> 4) & 0x0f0f0f0f0f0f0f0full) | ((v & 0x0f0f0f0f0f0f0f0full) << 4);
    return __builtin_bswap64(v);
}

void BitString::invert() {
    for (auto& w : words_) w = ~w;
    mask_tail();
}

void BitString::mask_tail() {
    size_t rem = nbits_ & 63;
    if (rem && !words_.empty()) {
        words_.back() &= (uint64_t(1) << rem) - 1;
    }
}

bool BitString::operator==(const BitString& o) const {
    return nbits_ == o.nbits_ && words_ == o.words_;
}

std::string BitString::to_string() const {
    std::string s;
    s.reserve(nbits_);
    for (size_t i = 0; i < nbits_; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
}

uint64_t BitString::hash64() const {
    uint64_t h = 0x9e3779b97f4a7c15ull ^ (uint64_t(nbits_) << 1);
    for (uint64_t w : words_) {
        h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdull;
        h ^= h >> 33;
    }
    return h;
}

}  // namespace mpclab
