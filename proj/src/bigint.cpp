#include "mpclab/bigint.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace mpclab {

using u128 = unsigned __int128;

BigUint BigUint::from_bits(const BitString& s) {
    BigUint r;
    size_t nb = s.size();
    if (nb == 0) return r;
    // Bit 0 of the string is the MSB of the integer. Limb j covers integer
    // bits [64j, 64j+63], i.e. the reversed string chunk ending 64j bits from
    // the string's tail.
    size_t words = (nb + 63) / 64;
    r.limbs_.resize(words);
    for (size_t j = 0; j < words; ++j) {
        size_t take = nb - 64 * j < 64 ? nb - 64 * j : 64;
        size_t lo = nb - 64 * j - take;
        uint64_t v = bit_reverse_u64(s.read_bits(lo, take));
        r.limbs_[j] = take == 64 ? v : v >> (64 - take);
    }
    r.trim();
    return r;
}

BigUint BigUint::pow_u64(uint64_t base, uint32_t exp) {
    BigUint r(1), b(base);
    while (exp) {
        if (exp & 1) r = r * b;
        b = b * b;
        exp >>= 1;
    }
    return r;
}

size_t BigUint::bitlen() const {
    if (limbs_.empty()) return 0;
    return (limbs_.size() - 1) * 64 + bit_width_u64(limbs_.back());
}

int BigUint::cmp(const BigUint& o) const {
    if (limbs_.size() != o.limbs_.size()) {
        return limbs_.size() < o.limbs_.size() ? -1 : 1;
    }
    for (size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
    }
    return 0;
}

BigUint BigUint::operator+(const BigUint& o) const {
    BigUint r;
    size_t n = std::max(limbs_.size(), o.limbs_.size());
    r.limbs_.resize(n + 1, 0);
    u128 carry = 0;
    for (size_t i = 0; i < n; ++i) {
        u128 s = carry;
        if (i < limbs_.size()) s += limbs_[i];
        if (i < o.limbs_.size()) s += o.limbs_[i];
        r.limbs_[i] = uint64_t(s);
        carry = s >> 64;
    }
    r.limbs_[n] = uint64_t(carry);
    r.trim();
    return r;
}

BigUint BigUint::operator-(const BigUint& o) const {
    assert(cmp(o) >= 0);
    BigUint r;
    r.limbs_.resize(limbs_.size(), 0);
    uint64_t borrow = 0;
    for (size_t i = 0; i < limbs_.size(); ++i) {
        uint64_t rhs = i < o.limbs_.size() ? o.limbs_[i] : 0;
        u128 wide = (u128)limbs_[i] - rhs - borrow;
        r.limbs_[i] = uint64_t(wide);
        borrow = (wide >> 64) ? 1 : 0;  // wrapped below zero
    }
    r.trim();
    return r;
}

BigUint BigUint::operator*(const BigUint& o) const {
    BigUint r;
    if (limbs_.empty() || o.limbs_.empty()) return r;
    r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
    for (size_t i = 0; i < limbs_.size(); ++i) {
        u128 carry = 0;
        for (size_t j = 0; j < o.limbs_.size(); ++j) {
            u128 cur = (u128)limbs_[i] * o.limbs_[j] + r.limbs_[i + j] + carry;
            r.limbs_[i + j] = uint64_t(cur);
            carry = cur >> 64;
        }
        size_t k = i + o.limbs_.size();
        while (carry) {
            u128 cur = (u128)r.limbs_[k] + carry;
            r.limbs_[k] = uint64_t(cur);
            carry = cur >> 64;
            ++k;
        }
    }
    r.trim();
    return r;
}

BigUint BigUint::operator>>(unsigned k) const {
    BigUint r = *this;
    unsigned wordshift = k / 64, bitshift = k % 64;
    if (wordshift >= r.limbs_.size()) return BigUint();
    r.limbs_.erase(r.limbs_.begin(), r.limbs_.begin() + wordshift);
    if (bitshift) {
        for (size_t i = 0; i < r.limbs_.size(); ++i) {
            r.limbs_[i] >>= bitshift;
            if (i + 1 < r.limbs_.size()) {
                r.limbs_[i] |= r.limbs_[i + 1] << (64 - bitshift);
            }
        }
    }
    r.trim();
    return r;
}

bool BigUint::bit(size_t i) const {
    size_t w = i >> 6;
    if (w >= limbs_.size()) return false;
    return (limbs_[w] >> (i & 63)) & 1;
}

uint64_t BigUint::mod_u64(uint64_t m) const {
    if (m == 0) throw std::domain_error("mod 0");
    u128 r = 0;
    for (size_t i = limbs_.size(); i-- > 0;) {
        r = ((r << 64) | limbs_[i]) % m;
    }
    return uint64_t(r);
}

void BigUint::divmod(const BigUint& num, const BigUint& den, BigUint& q, BigUint& r) {
    if (den.is_zero()) throw std::domain_error("division by zero");
    if (num.cmp(den) < 0) {
        q = BigUint();
        r = num;
        return;
    }
    if (den.limbs_.size() == 1) {
        uint64_t d = den.limbs_[0];
        q.limbs_.assign(num.limbs_.size(), 0);
        u128 rem = 0;
        for (size_t i = num.limbs_.size(); i-- > 0;) {
            u128 cur = (rem << 64) | num.limbs_[i];
            q.limbs_[i] = uint64_t(cur / d);
            rem = cur % d;
        }
        q.trim();
        r = BigUint(uint64_t(rem));
        return;
    }
    // Shift-and-subtract long division, MSB first. Operands here are a handful
    // of limbs, so the O(bits * limbs) cost is irrelevant.
    q = BigUint();
    r = BigUint();
    size_t nb = num.bitlen();
    q.limbs_.assign(num.limbs_.size(), 0);
    for (size_t i = nb; i-- > 0;) {
        // r = r*2 + bit_i
        uint64_t carry = num.bit(i) ? 1 : 0;
        for (size_t w = 0; w < r.limbs_.size(); ++w) {
            uint64_t nxt = r.limbs_[w] >> 63;
            r.limbs_[w] = (r.limbs_[w] << 1) | carry;
            carry = nxt;
        }
        if (carry) r.limbs_.push_back(carry);
        if (r.cmp(den) >= 0) {
            r = r - den;
            q.limbs_[i >> 6] |= uint64_t(1) << (i & 63);
        }
    }
    q.trim();
    r.trim();
}

BigUint BigUint::operator%(const BigUint& o) const {
    BigUint q, r;
    divmod(*this, o, q, r);
    return r;
}

BigUint BigUint::operator/(const BigUint& o) const {
    BigUint q, r;
    divmod(*this, o, q, r);
    return q;
}

BigUint BigUint::mulmod(const BigUint& a, const BigUint& b, const BigUint& m) {
    if (m.fits_u64()) {
        u128 prod = (u128)a.as_u64() * b.as_u64();
        return BigUint(uint64_t(prod % m.as_u64()));
    }
    return (a * b) % m;
}

BigUint BigUint::powmod(const BigUint& base, const BigUint& exp, const BigUint& m) {
    BigUint result(1);
    BigUint b = base % m;
    size_t nb = exp.bitlen();
    for (size_t i = 0; i < nb; ++i) {
        if (exp.bit(i)) result = mulmod(result, b, m);
        b = mulmod(b, b, m);
    }
    return result;
}

BitString BigUint::to_bits(size_t nbits) const {
    assert(bitlen() <= nbits);
    // Bit 0 of the string is the MSB: emit 64-bit windows of the integer from
    // the top down, each reversed into string order.
    BitString s;
    size_t p = 0;
    while (p < nbits) {
        size_t t = nbits - p < 64 ? nbits - p : 64;
        size_t ofs = nbits - p - t;
        size_t wi = ofs >> 6, bi = ofs & 63;
        uint64_t lo = wi < limbs_.size() ? limbs_[wi] : 0;
        uint64_t hi = wi + 1 < limbs_.size() ? limbs_[wi + 1] : 0;
        uint64_t u = bi ? (lo >> bi) | (hi << (64 - bi)) : lo;
        if (t < 64) u &= (uint64_t(1) << t) - 1;
        s.append_bits(bit_reverse_u64(u) >> (64 - t), t);
        p += t;
    }
    return s;
}

std::string BigUint::to_string() const {
    if (is_zero()) return "0";
    BigUint v = *this;
    std::string out;
    BigUint ten(10);
    while (!v.is_zero()) {
        BigUint q, r;
        divmod(v, ten, q, r);
        out.push_back(char('0' + r.as_u64()));
        v = q;
    }
    return std::string(out.rbegin(), out.rend());
}

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

// ---- primality ----

namespace {

bool miller_rabin_u64(uint64_t n, uint64_t a, const detail::Mont64& mc) {
    // n odd, > 2. Returns false if a witnesses compositeness. Works entirely in
    // Montgomery form; the map is a bijection so the 1 / n-1 comparisons carry.
    a %= n;
    if (a == 0) return true;
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    uint64_t one_m = mc.redc(mc.r2);
    uint64_t nm1_m = n - one_m;
    uint64_t x = one_m;
    uint64_t b = mc.redc((u128)a * mc.r2);
    while (d) {
        if (d & 1) x = mc.mul(x, b);
        b = mc.mul(b, b);
        d >>= 1;
    }
    if (x == one_m || x == nm1_m) return true;
    for (int i = 1; i < s; ++i) {
        x = mc.mul(x, x);
        if (x == nm1_m) return true;
    }
    return false;
}

bool miller_rabin_big(const BigUint& n, const BigUint& a) {
    BigUint one(1);
    BigUint nm1 = n - one;
    BigUint am = a % n;
    if (am.is_zero()) return true;
    BigUint d = nm1;
    int s = 0;
    while (d.is_even()) {
        d = d >> 1;
        ++s;
    }
    BigUint x = BigUint::powmod(am, d, n);
    if (x == one || x == nm1) return true;
    for (int i = 1; i < s; ++i) {
        x = BigUint::mulmod(x, x, n);
        if (x == nm1) return true;
    }
    return false;
}

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic for every n below 3,317,044,064,679,887,385,961,981 (~2^81.5).
constexpr uint64_t kMrBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    if (n < (1u << 20)) {
        if (n % 2 == 0) return n == 2;
        for (uint64_t d = 3; d * d <= n; d += 2) {
            if (n % d == 0) return false;
        }
        return true;
    }
    if (n % 2 == 0) return false;
    // Screen by the primes below 50 first: two primorial remainders, then
    // constant-divisor checks the compiler strength-reduces. Kills ~3/4 of the
    // odd composites the sampler throws at us before any modexp runs.
    uint64_t q1 = n % 3234846615ull;  // 3*5*7*11*13*17*19*23*29
    if (q1 % 3 == 0 || q1 % 5 == 0 || q1 % 7 == 0 || q1 % 11 == 0 || q1 % 13 == 0 ||
        q1 % 17 == 0 || q1 % 19 == 0 || q1 % 23 == 0 || q1 % 29 == 0)
        return false;
    uint64_t q2 = n % 95041567ull;  // 31*37*41*43*47
    if (q2 % 31 == 0 || q2 % 37 == 0 || q2 % 41 == 0 || q2 % 43 == 0 || q2 % 47 == 0)
        return false;
    MontCtx mc(n);
    if (n < 4759123141ull) {
        // Smallest composite fooling {2, 7, 61} is 4759123141.
        for (uint64_t a : {2ull, 7ull, 61ull}) {
            if (!miller_rabin_u64(n, a, mc)) return false;
        }
        return true;
    }
    // Seven bases with no composite counterexample below 2^64; every base is
    // below 2^31 <= n here, so a % n never degenerates to zero.
    for (uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
        if (!miller_rabin_u64(n, a, mc)) return false;
    }
    return true;
}

bool is_prime(const BigUint& n) {
    if (n.fits_u64()) return is_prime_u64(n.as_u64());
    // Cheap screen by small primes first.
    static constexpr uint64_t kScreen[] = {3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                           43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    if (n.is_even()) return false;
    for (uint64_t p : kScreen) {
        if (n.mod_u64(p) == 0) return false;
    }
    for (uint64_t a : kMrBases) {
        if (!miller_rabin_big(n, BigUint(a))) return false;
    }
    if (n.bitlen() > 81) {
        // Beyond the proven range of the fixed base set: 64 extra rounds with
        // candidate-derived bases. Error under 4^-64, and still deterministic.
        uint64_t st = 0xabcdef1234567890ull ^ n.mod_u64(0xffffffffffffffc5ull);
        for (int i = 0; i < 64; ++i) {
            BigUint a(2 + splitmix64(st) % 0xfffffffffffffffull);
            if (!miller_rabin_big(n, a)) return false;
        }
    }
    return true;
}

BigUint mod_of_bits(const BitString& s, const BigUint& m) {
    if (m.fits_u64()) {
        return BigUint(s.as_integer_mod_u64(m.as_u64()));
    }
    BigUint r;
    size_t pos = 0, nb = s.size();
    // 64-bit chunks, MSB first: r = (r << take | chunk) mod m.
    while (pos < nb) {
        size_t take = nb - pos < 64 ? nb - pos : 64;
        uint64_t chunk = bit_reverse_u64(s.read_bits(pos, take)) >> (64 - take);
        BigUint shifted;
        // r * 2^take + chunk
        BigUint mult = BigUint::pow_u64(2, uint32_t(take));
        shifted = r * mult + BigUint(chunk);
        r = shifted % m;
        pos += take;
    }
    return r;
}

}  // namespace mpclab
