#pragma once

#include <array>
#include <bit>
#include <cstdint>

#include "errors.hpp"

namespace cicount {

// Exact binomial coefficients for a universe of at most 64 elements.
// Every C(m,s) with m <= 64 fits in u64 (the largest is C(64,32) ~ 1.8e18).
inline uint64_t binomial(int m, int s) {
    if (m < 0 || m > 64)
        throw CapacityError("binomial: universe size must be in [0, 64], got " +
                            std::to_string(m));
    if (s < 0 || s > m) return 0;
    static const auto table = [] {
        std::array<std::array<uint64_t, 65>, 65> t{};
        for (int i = 0; i <= 64; ++i) {
            t[i][0] = 1;
            for (int j = 1; j <= i; ++j)
                t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0);
        }
        return t;
    }();
    return table[m][s];
}

namespace detail {

inline uint64_t low_bits(int count) {
    return count >= 64 ? ~0ull : ((1ull << count) - 1);
}

} // namespace detail

// Enumerates s-element subsets of {0,...,m-1} in the revolving-door order
//
//   G(m,s) = G(m-1,s) followed by { c + {m-1} : c in reverse(G(m-1,s-1)) },
//
// in which consecutive subsets always differ by removing one element and
// adding another. Combinations are bitmasks (bit i = element i present), so
// m <= 64. rank/unrank invert the same recursion, which is what makes
// disjoint rank-range sharding deterministic.
class RevolvingDoor {
public:
    RevolvingDoor(int m, int s) : RevolvingDoor(m, s, first_mask(m, s)) {}

    static RevolvingDoor at_rank(int m, int s, uint64_t rank) {
        return RevolvingDoor(m, s, mask_at_rank(m, s, rank));
    }

    int m() const { return m_; }
    int s() const { return s_; }
    uint64_t mask() const { return mask_; }

    // Element removed / added by the most recent successful next().
    int out() const { return out_; }
    int in() const { return in_; }

    // Advances to the successor; false when already at the final combination.
    // On success exactly one element was swapped (see out()/in()).
    bool next() {
        if (s_ <= 0 || s_ >= m_) return false;
        // Levels j = 1..m view the suffix {0,...,j-1}; the walk direction at
        // level j flips once per selected element above j. Levels whose suffix
        // is empty or full are single-element blocks, hence exhausted; they
        // form a constant run at the bottom of the mask.
        int base = std::max(std::countr_zero(mask_), std::countr_one(mask_));
        int sj = std::popcount(mask_ & detail::low_bits(base));
        for (int lev = base + 1; lev <= m_; ++lev) {
            int present = static_cast<int>((mask_ >> (lev - 1)) & 1);
            sj += present; // selected count within {0,...,lev-1}
            bool backward = ((s_ - sj) & 1) != 0;
            if (!present && !backward) {
                // End of G(lev-1, sj): swap into the + {lev-1} block.
                out_ = (sj >= 2) ? sj - 2 : lev - 2;
                in_ = lev - 1;
            } else if (present && backward) {
                // Walked the + {lev-1} block to its end; drop back.
                out_ = lev - 1;
                in_ = (sj >= 2) ? sj - 2 : lev - 2;
            } else {
                continue;
            }
            mask_ ^= (1ull << out_) | (1ull << in_);
            return true;
        }
        return false;
    }

    // Position of `mask` within G(m,s). Selecting the top element lands in
    // the reversed block, so rank = C(m-1,s) + C(m-1,s-1) - 1 - inner rank;
    // unrolled, the inner rank's sign alternates per selected element.
    static uint64_t rank_of(uint64_t mask, int m, int s) {
        check_args(m, s);
        __int128 r = 0;
        int sign = 1;
        while (s > 0 && s < m) {
            if ((mask >> (m - 1)) & 1) {
                uint64_t step = binomial(m - 1, s) + binomial(m - 1, s - 1) - 1;
                r += sign * static_cast<__int128>(step);
                sign = -sign;
                --s;
            }
            --m;
        }
        return static_cast<uint64_t>(r);
    }

    // The rank-th combination of G(m,s).
    static uint64_t mask_at_rank(int m, int s, uint64_t rank) {
        check_args(m, s);
        if (rank >= binomial(m, s))
            throw RangeError("combination rank " + std::to_string(rank) +
                             " out of range for C(" + std::to_string(m) + "," +
                             std::to_string(s) + ")");
        uint64_t mask = 0;
        while (s > 0 && s < m) {
            uint64_t block = binomial(m - 1, s);
            if (rank < block) {
                --m;
            } else {
                mask |= 1ull << (m - 1);
                rank = binomial(m - 1, s - 1) - 1 - (rank - block);
                --m;
                --s;
            }
        }
        if (s == m) mask |= detail::low_bits(m);
        return mask;
    }

    static uint64_t first_mask(int m, int s) {
        check_args(m, s);
        return detail::low_bits(s);
    }

    static uint64_t last_mask(int m, int s) {
        check_args(m, s);
        if (s == 0) return 0;
        if (s == m) return detail::low_bits(m);
        return detail::low_bits(s - 1) | (1ull << (m - 1));
    }

private:
    RevolvingDoor(int m, int s, uint64_t mask) : m_(m), s_(s), mask_(mask) {
        check_args(m, s);
    }

    static void check_args(int m, int s) {
        if (m < 0 || m > 64)
            throw CapacityError("combinations: universe size must be in [0, 64]");
        if (s < 0 || s > m)
            throw RangeError("combinations: subset size out of [0, m]");
    }

    int m_;
    int s_;
    uint64_t mask_;
    int out_ = -1;
    int in_ = -1;
};

} // namespace cicount
