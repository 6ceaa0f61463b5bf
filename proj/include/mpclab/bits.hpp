#pragma once
// Bit-exact payloads. Every message in the simulator carries a BitString whose
// length in bits is exactly what the metrics charge, so wire accounting never
// drifts from the payload that was actually sent.

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace mpclab {

class BitString {
public:
    BitString() = default;

    explicit BitString(size_t nbits) { resize(nbits); }

    static BitString from_u64(uint64_t value, size_t nbits);

    // Parses a string of '0'/'1' characters, MSB first.
    static BitString parse(const std::string& s);

    size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool bit(size_t i) const {
        return (word(i >> 6) >> (i & 63)) & 1u;
    }

    void set_bit(size_t i, bool v) {
        uint64_t& w = words_[i >> 6];
        uint64_t m = uint64_t(1) << (i & 63);
        w = v ? (w | m) : (w & ~m);
    }

    void resize(size_t nbits) {
        nbits_ = nbits;
        words_.assign((nbits + 63) / 64, 0);
    }

    void clear() { nbits_ = 0; words_.clear(); }

    // Appends `count` low bits of `value`, LSB of value becomes the earliest
    // appended bit. count <= 64.
    void append_bits(uint64_t value, size_t count);

    void append(const BitString& other);

    // Reads `count` bits starting at `pos` into a u64 (count <= 64).
    uint64_t read_bits(size_t pos, size_t count) const;

    BitString slice(size_t pos, size_t count) const;

    // Interprets the whole string as an MSB-first integer, reduced mod m.
    // The empty string is 0. m must be nonzero and fit in 64 bits.
    uint64_t as_integer_mod_u64(uint64_t m) const;

    void flip_bit(size_t i) { set_bit(i, !bit(i)); }
    void invert();  // flips every bit

    bool operator==(const BitString& o) const;
    bool operator!=(const BitString& o) const { return !(*this == o); }

    std::string to_string() const;  // '0'/'1' chars, index 0 first

    uint64_t hash64() const;

    const std::vector<uint64_t>& words() const { return words_; }

private:
    uint64_t word(size_t i) const { return i < words_.size() ? words_[i] : 0; }
    void mask_tail();

    size_t nbits_ = 0;
    std::vector<uint64_t> words_;
};

// Sequential bit-level codec helpers. Writer appends fields; Reader consumes
// them in the same order. Reader underflow is reported via ok().
class BitWriter {
public:
    void u(uint64_t value, size_t bits) { out_.append_bits(value, bits); }
    void str(const BitString& s) { out_.append(s); }
    // Length-prefixed payload: 16-bit length then the raw bits.
    void lp(const BitString& s) {
        u(s.size(), 16);
        str(s);
    }
    BitString take() { return std::move(out_); }
    const BitString& peek() const { return out_; }

private:
    BitString out_;
};

class BitReader {
public:
    explicit BitReader(const BitString& s) : src_(s) {}

    uint64_t u(size_t bits) {
        if (pos_ + bits > src_.size()) {
            ok_ = false;
            return 0;
        }
        uint64_t v = src_.read_bits(pos_, bits);
        pos_ += bits;
        return v;
    }

    BitString str(size_t bits) {
        if (pos_ + bits > src_.size()) {
            ok_ = false;
            return BitString();
        }
        BitString v = src_.slice(pos_, bits);
        pos_ += bits;
        return v;
    }

    BitString lp() {
        uint64_t len = u(16);
        return str(len);
    }

    bool ok() const { return ok_; }
    bool done() const { return ok_ && pos_ == src_.size(); }
    size_t remaining() const { return src_.size() - pos_; }

private:
    const BitString& src_;
    size_t pos_ = 0;
    bool ok_ = true;
};

uint64_t bit_reverse_u64(uint64_t v);

// Bit width needed to represent `v` (bitlen of v; 0 -> 0).
inline int bit_width_u64(uint64_t v) {
    int w = 0;
    while (v) {
        ++w;
        v >>= 1;
    }
    return w;
}

// ceil(log2(n)) for n >= 1.
inline int ceil_log2(uint64_t n) {
    if (n <= 1) return 0;
    return bit_width_u64(n - 1);
}

}  // namespace mpclab
