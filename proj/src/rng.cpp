#include "mpclab/rng.hpp"

#include <algorithm>

namespace mpclab {

uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

std::vector<uint32_t> RandomStream::sample_subset(uint32_t n, uint32_t k, uint32_t self) {
    uint32_t domain = n - (self < n ? 1 : 0);
    if (k > domain) k = domain;
    std::vector<uint32_t> out;
    out.reserve(k);
    if (k == 0) return out;
    if (k * 3 >= domain) {
        // Dense: partial Fisher-Yates over the whole domain.
        std::vector<uint32_t> pool;
        pool.reserve(domain);
        for (uint32_t i = 0; i < n; ++i) {
            if (i != self) pool.push_back(i);
        }
        for (uint32_t i = 0; i < k; ++i) {
            uint32_t j = i + uint32_t(uniform(pool.size() - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
    } else {
        // Sparse: rejection into a sorted set.
        std::vector<char> seen(n, 0);
        while (out.size() < k) {
            uint32_t v = uint32_t(uniform(n));
            if (v == self || seen[v]) continue;
            seen[v] = 1;
            out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace mpclab
