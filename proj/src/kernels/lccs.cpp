#include "verbatim/kernels/lccs.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

namespace verbatim::kernels {

namespace {

// Modulus 1: Mersenne prime 2^61 - 1, reduced without division.
constexpr std::uint64_t kM61 = (std::uint64_t(1) << 61) - 1;
// Modulus 2: Mersenne prime 2^31 - 1.
constexpr std::uint64_t kM31 = (std::uint64_t(1) << 31) - 1;

constexpr std::uint64_t kBase61 = 1995433697;  // < 2^31, fixed for reproducibility
constexpr std::uint64_t kBase31 = 131;

inline std::uint64_t mul_m61(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    std::uint64_t r = static_cast<std::uint64_t>(p & kM61) + static_cast<std::uint64_t>(p >> 61);
    if (r >= kM61) r -= kM61;
    return r;
}

inline std::uint64_t mul_m31(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t p = a * b;  // a,b < 2^31 so no overflow
    std::uint64_t r = (p & kM31) + (p >> 31);
    if (r >= kM31) r -= kM31;
    return r;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t mod) {
    return a >= b ? a - b : a + mod - b;
}

// Prefix hashes for O(1) window hashes under both moduli.
struct PrefixHashes {
    std::vector<std::uint64_t> h61, h31;

    void build(std::u32string_view s) {
        h61.resize(s.size() + 1);
        h31.resize(s.size() + 1);
        h61[0] = 0;
        h31[0] = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::uint64_t c = std::uint64_t(s[i]) + 1;
            h61[i + 1] = mul_m61(h61[i], kBase61) + c;
            if (h61[i + 1] >= kM61) h61[i + 1] -= kM61;
            h31[i + 1] = mul_m31(h31[i], kBase31) + (c & kM31);
            if (h31[i + 1] >= kM31) h31[i + 1] -= kM31;
        }
    }
};

struct PowTables {
    std::vector<std::uint64_t> p61, p31;

    void build(std::size_t n) {
        p61.resize(n + 1);
        p31.resize(n + 1);
        p61[0] = 1;
        p31[0] = 1;
        for (std::size_t i = 1; i <= n; ++i) {
            p61[i] = mul_m61(p61[i - 1], kBase61);
            p31[i] = mul_m31(p31[i - 1], kBase31);
        }
    }
};

inline std::uint64_t window_hash61(const PrefixHashes& ph, const PowTables& pw,
                                   std::size_t pos, std::size_t len) {
    return sub_mod(ph.h61[pos + len], mul_m61(ph.h61[pos], pw.p61[len]), kM61);
}

inline std::uint64_t window_hash31(const PrefixHashes& ph, const PowTables& pw,
                                   std::size_t pos, std::size_t len) {
    return sub_mod(ph.h31[pos + len], mul_m31(ph.h31[pos], pw.p31[len]), kM31);
}

// Open-addressing table of (h61, h31, position), reused across probe rounds
// via epoch tags so a round never pays for clearing.
struct WindowTable {
    struct Slot {
        std::uint64_t h61 = 0;
        std::uint64_t h31 = 0;
        std::uint32_t pos = 0;
        std::uint32_t epoch = 0;
    };
    std::vector<Slot> slots;
    std::uint64_t mask = 0;
    std::uint32_t epoch = 0;

    void reserve(std::size_t n) {
        std::size_t cap = std::bit_ceil(std::max<std::size_t>(16, n * 2));
        slots.assign(cap, Slot{});
        mask = cap - 1;
        epoch = 0;
    }

    static std::uint64_t mix(std::uint64_t h61, std::uint64_t h31) {
        std::uint64_t x = h61 ^ (h31 * 0x9E3779B97F4A7C15ull);
        x ^= x >> 33;
        x *= 0xFF51AFD7ED558CCDull;
        x ^= x >> 33;
        return x;
    }

    void next_round() { ++epoch; }

    void insert(std::uint64_t h61, std::uint64_t h31, std::uint32_t pos) {
        std::uint64_t i = mix(h61, h31) & mask;
        while (true) {
            Slot& s = slots[i];
            if (s.epoch != epoch) {
                s = Slot{h61, h31, pos, epoch};
                return;
            }
            if (s.h61 == h61 && s.h31 == h31) return;  // keep first position
            i = (i + 1) & mask;
        }
    }

    // Returns the stored position for an exact (h61, h31) match, or -1.
    std::int64_t find(std::uint64_t h61, std::uint64_t h31) const {
        std::uint64_t i = mix(h61, h31) & mask;
        while (true) {
            const Slot& s = slots[i];
            if (s.epoch != epoch) return -1;
            if (s.h61 == h61 && s.h31 == h31) return s.pos;
            i = (i + 1) & mask;
        }
    }
};

}  // namespace

std::size_t lccs_length(std::u32string_view a, std::u32string_view b) {
    if (a.empty() || b.empty()) return 0;
    // Hash the shorter string's windows into the table.
    if (a.size() < b.size()) std::swap(a, b);

    PrefixHashes pa, pb;
    pa.build(a);
    pb.build(b);
    PowTables pw;
    pw.build(std::max(a.size(), b.size()));
    WindowTable table;
    table.reserve(b.size());

    const auto common_at_length = [&](std::size_t len) -> bool {
        table.next_round();
        for (std::size_t i = 0; i + len <= b.size(); ++i) {
            table.insert(window_hash61(pb, pw, i, len), window_hash31(pb, pw, i, len),
                         static_cast<std::uint32_t>(i));
        }
        for (std::size_t i = 0; i + len <= a.size(); ++i) {
            const std::int64_t j =
                table.find(window_hash61(pa, pw, i, len), window_hash31(pa, pw, i, len));
            if (j >= 0 &&
                a.compare(i, len, b.substr(static_cast<std::size_t>(j), len)) == 0) {
                return true;
            }
        }
        return false;
    };

    std::size_t lo = 0, hi = b.size();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (common_at_length(mid)) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    return lo;
}

}  // namespace verbatim::kernels
