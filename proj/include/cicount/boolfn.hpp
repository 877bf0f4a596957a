#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "errors.hpp"

namespace cicount {

inline constexpr int kMaxVariables = 24; // 2^24-entry tables/spectra in memory

// Truth table of g : {0,1}^n -> {0,1}, bit-packed. Bit i of the table is
// g(y) where y is read off the binary digits of i, least-significant bit
// first (bit j of i = argument y_{j+1}).
class BooleanFunction {
public:
    explicit BooleanFunction(int n) : n_(n) {
        if (n < 1) throw RangeError("variable count must be >= 1");
        if (n > kMaxVariables)
            throw CapacityError("variable count " + std::to_string(n) +
                                " exceeds the in-memory cap of " +
                                std::to_string(kMaxVariables));
        words_.assign((size() + 63) / 64, 0);
    }

    int n() const { return n_; }
    uint64_t size() const { return 1ull << n_; }

    bool get(uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    void set(uint64_t i, bool v) {
        uint64_t bit = 1ull << (i & 63);
        if (v)
            words_[i >> 6] |= bit;
        else
            words_[i >> 6] &= ~bit;
    }

    uint64_t weight() const {
        uint64_t w = 0;
        for (uint64_t word : words_) w += std::popcount(word);
        return w;
    }

    bool operator==(const BooleanFunction& o) const {
        return n_ == o.n_ && words_ == o.words_;
    }

    // --- text formats ---

    // Bit string of length 2^n, index 0 first.
    static BooleanFunction from_bits_string(int n, const std::string& s) {
        BooleanFunction f(n);
        if (s.size() != f.size())
            throw ShapeError("bit string length " + std::to_string(s.size()) +
                             " != 2^n = " + std::to_string(f.size()));
        for (uint64_t i = 0; i < f.size(); ++i) {
            if (s[i] == '1')
                f.set(i, true);
            else if (s[i] != '0')
                throw ShapeError("bit string may contain only 0 and 1");
        }
        return f;
    }

    std::string to_bits_string() const {
        std::string s(size(), '0');
        for (uint64_t i = 0; i < size(); ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    static uint64_t hex_digits(int n) {
        uint64_t bits = 1ull << n;
        return bits < 4 ? 1 : bits / 4;
    }

    // Hex string; the most-significant nibble covers the highest indices.
    static BooleanFunction from_hex_string(int n, const std::string& s) {
        BooleanFunction f(n);
        if (s.size() != hex_digits(n))
            throw ShapeError("hex string length " + std::to_string(s.size()) +
                             " != " + std::to_string(hex_digits(n)) +
                             " digits for n = " + std::to_string(n));
        for (uint64_t d = 0; d < s.size(); ++d) {
            int v = hex_value(s[d]);
            if (v < 0) throw ShapeError("invalid hex digit in truth table");
            uint64_t lo = 4 * (s.size() - 1 - d); // lowest index this digit covers
            for (int b = 0; b < 4; ++b) {
                uint64_t idx = lo + b;
                if (idx < f.size() && ((v >> b) & 1)) f.set(idx, true);
            }
        }
        return f;
    }

    std::string to_hex_string() const {
        uint64_t digits = hex_digits(n_);
        std::string s(digits, '0');
        for (uint64_t d = 0; d < digits; ++d) {
            uint64_t lo = 4 * (digits - 1 - d);
            int v = 0;
            for (int b = 0; b < 4; ++b) {
                uint64_t idx = lo + b;
                if (idx < size() && get(idx)) v |= 1 << b;
            }
            s[d] = "0123456789abcdef"[v];
        }
        return s;
    }

    // Accepts either text form; the two lengths never coincide.
    static BooleanFunction from_truth_table_text(int n, const std::string& s) {
        uint64_t bits = 1ull << n;
        if (s.size() == bits &&
            s.find_first_not_of("01") == std::string::npos)
            return from_bits_string(n, s);
        if (s.size() == hex_digits(n)) return from_hex_string(n, s);
        throw ShapeError("truth table must be a " + std::to_string(bits) +
                         "-bit string or a " + std::to_string(hex_digits(n)) +
                         "-digit hex string for n = " + std::to_string(n));
    }

private:
    static int hex_value(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }

    int n_;
    std::vector<uint64_t> words_;
};

// Signed transform coefficients g^(w) = sum_y g(y) (-1)^{w.y}, indexed by
// mask w under the same bit convention as BooleanFunction. 64-bit on purpose:
// no overflow analysis needed at any call site for n <= 24.
struct WalshSpectrum {
    int n;
    std::vector<int64_t> coeffs;
};

// In-place butterfly, O(n 2^n): split on the top variable and combine the
// half-transforms as (a, b) -> (a + b, a - b).
inline WalshSpectrum walsh_transform(const BooleanFunction& f) {
    WalshSpectrum s;
    s.n = f.n();
    uint64_t size = f.size();
    s.coeffs.resize(size);
    for (uint64_t i = 0; i < size; ++i) s.coeffs[i] = f.get(i) ? 1 : 0;
    for (uint64_t h = 1; h < size; h <<= 1) {
        for (uint64_t block = 0; block < size; block += 2 * h) {
            for (uint64_t j = block; j < block + h; ++j) {
                int64_t a = s.coeffs[j];
                int64_t b = s.coeffs[j + h];
                s.coeffs[j] = a + b;
                s.coeffs[j + h] = a - b;
            }
        }
    }
    return s;
}

// Classification of a function by the largest k whose low-popcount
// coefficients all vanish. weight = 2^{ci_order} * q_at_order always holds;
// resilient_order is ci_order for balanced functions and -1 otherwise.
struct CiProfile {
    uint64_t weight = 0;
    int ci_order = 0;
    uint64_t q_at_order = 0;
    int resilient_order = -1;
};

inline CiProfile ci_order(const WalshSpectrum& s) {
    uint64_t size = 1ull << s.n;
    int min_popcount = s.n + 1;
    for (uint64_t w = 1; w < size; ++w) {
        if (s.coeffs[w] != 0) {
            int pc = std::popcount(w);
            if (pc < min_popcount) {
                min_popcount = pc;
                if (pc == 1) break;
            }
        }
    }
    CiProfile p;
    p.weight = static_cast<uint64_t>(s.coeffs[0]);
    // Constant functions vanish on every nonzero mask; order n by convention.
    p.ci_order = (min_popcount > s.n) ? s.n : min_popcount - 1;
    if (p.weight % (1ull << p.ci_order) != 0)
        throw StructureError("weight not divisible by 2^ci_order");
    p.q_at_order = p.weight >> p.ci_order;
    p.resilient_order = (p.weight == size / 2) ? p.ci_order : -1;
    return p;
}

inline CiProfile ci_order(const BooleanFunction& f) {
    return ci_order(walsh_transform(f));
}

// --- orthogonal-array view: rows are the support of g ---

// Rows on which g = 1, each an n-bit vector represented by its index,
// sorted ascending.
inline std::vector<uint32_t> to_orthogonal_array(const BooleanFunction& f) {
    std::vector<uint32_t> rows;
    rows.reserve(f.weight());
    for (uint64_t i = 0; i < f.size(); ++i)
        if (f.get(i)) rows.push_back(static_cast<uint32_t>(i));
    return rows;
}

// Indicator function of the row set; rows must be distinct n-bit vectors.
inline BooleanFunction from_orthogonal_array(int n,
                                             const std::vector<uint32_t>& rows) {
    BooleanFunction f(n);
    for (uint32_t r : rows) {
        if (r >= f.size())
            throw ShapeError("row value " + std::to_string(r) +
                             " does not fit in " + std::to_string(n) + " bits");
        if (f.get(r))
            throw DuplicateRow("row " + std::to_string(r) + " appears twice");
        f.set(r, true);
    }
    return f;
}

// --- OA text format: one row per line, n characters from {0,1}, leftmost
// character = y_n (the row reads as the binary numeral of its index),
// '#' starts a comment, blank lines ignored. ---

inline std::string format_oa_row(uint32_t row, int n) {
    std::string s(n, '0');
    for (int j = 0; j < n; ++j)
        if ((row >> j) & 1) s[n - 1 - j] = '1';
    return s;
}

inline std::string format_oa(const BooleanFunction& f) {
    std::string out;
    for (uint32_t row : to_orthogonal_array(f)) {
        out += format_oa_row(row, f.n());
        out += '\n';
    }
    return out;
}

struct OaText {
    int n = 0;
    std::vector<uint32_t> rows; // in file order
};

inline OaText parse_oa_text(const std::string& text) {
    OaText oa;
    size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line = text.substr(
            pos, eol == std::string::npos ? std::string::npos : eol - pos);
        ++line_no;
        pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
        if (size_t hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        if (oa.n == 0) {
            oa.n = static_cast<int>(line.size());
            if (oa.n > kMaxVariables)
                throw CapacityError("row width exceeds " +
                                    std::to_string(kMaxVariables));
        } else if (line.size() != static_cast<size_t>(oa.n)) {
            throw ShapeError("line " + std::to_string(line_no) + ": row width " +
                             std::to_string(line.size()) + " != " +
                             std::to_string(oa.n));
        }
        uint32_t row = 0;
        for (int j = 0; j < oa.n; ++j) {
            char c = line[oa.n - 1 - j];
            if (c == '1')
                row |= 1u << j;
            else if (c != '0')
                throw ShapeError("line " + std::to_string(line_no) +
                                 ": rows may contain only 0 and 1");
        }
        oa.rows.push_back(row);
    }
    if (oa.n == 0) throw ShapeError("no rows found");
    return oa;
}

} // namespace cicount
