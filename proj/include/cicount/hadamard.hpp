#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "census.hpp"
#include "errors.hpp"

namespace cicount {

// Square matrix over {+1,-1}, row-major. Kept loose on purpose: validation
// happens in is_hadamard so malformed input errors stay observable.
struct SignMatrix {
    int order = 0;
    std::vector<int8_t> entries;

    int8_t at(int r, int c) const { return entries[r * order + c]; }

    // Rows of '+'/'-' characters, one row per line.
    static SignMatrix parse(const std::string& text) {
        SignMatrix m;
        std::vector<std::string> lines;
        size_t pos = 0;
        while (pos <= text.size()) {
            size_t eol = text.find('\n', pos);
            std::string line = text.substr(
                pos, eol == std::string::npos ? std::string::npos : eol - pos);
            pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) lines.push_back(line);
        }
        if (lines.empty()) throw ShapeError("no matrix rows found");
        m.order = static_cast<int>(lines.size());
        for (const std::string& line : lines) {
            if (line.size() != static_cast<size_t>(m.order))
                throw ShapeError("matrix is not square");
            for (char c : line) {
                if (c == '+')
                    m.entries.push_back(1);
                else if (c == '-')
                    m.entries.push_back(-1);
                else
                    throw ShapeError("matrix entries must be '+' or '-'");
            }
        }
        return m;
    }

    std::string format() const {
        std::string out;
        for (int r = 0; r < order; ++r) {
            for (int c = 0; c < order; ++c)
                out += at(r, c) > 0 ? '+' : '-';
            out += '\n';
        }
        return out;
    }
};

// True iff every pair of distinct columns is orthogonal.
inline bool is_hadamard(const SignMatrix& m) {
    if (m.order < 1) throw ShapeError("matrix order must be >= 1");
    if (m.entries.size() != static_cast<size_t>(m.order) * m.order)
        throw ShapeError("entry count does not match a square matrix");
    for (int8_t e : m.entries)
        if (e != 1 && e != -1) throw ShapeError("entries must be +-1");
    for (int c1 = 0; c1 < m.order; ++c1)
        for (int c2 = c1 + 1; c2 < m.order; ++c2) {
            int dot = 0;
            for (int r = 0; r < m.order; ++r) dot += m.at(r, c1) * m.at(r, c2);
            if (dot != 0) return false;
        }
    return true;
}

namespace detail {

// Columns as bitmasks (bit r = +1 in row r); two +-1 columns of length
// `order` are orthogonal iff they disagree in exactly order/2 rows.
inline uint64_t count_hadamard_backtracking(int order) {
    int column_count = 1 << order;
    int half = order / 2;
    uint64_t found = 0;
    std::vector<std::vector<uint32_t>> stack(order + 1);
    stack[0].resize(column_count);
    for (int c = 0; c < column_count; ++c) stack[0][c] = c;
    // candidates[d] = columns orthogonal to all chosen columns 0..d-1.
    auto descend = [&](auto&& self, int depth) -> void {
        const std::vector<uint32_t>& candidates = stack[depth];
        if (depth == order) return;
        for (uint32_t col : candidates) {
            if (depth == order - 1) {
                ++found;
                continue;
            }
            std::vector<uint32_t>& next = stack[depth + 1];
            next.clear();
            for (uint32_t other : candidates)
                if (std::popcount(col ^ other) == half) next.push_back(other);
            self(self, depth + 1);
        }
    };
    if (order % 2 == 1 && order > 1) return 0; // odd dot products never vanish
    descend(descend, 0);
    return found;
}

inline uint64_t count_hadamard_brute(int order) {
    int cells = order * order;
    uint64_t count = 0;
    for (uint64_t bits = 0; bits < (1ull << cells); ++bits) {
        SignMatrix m;
        m.order = order;
        m.entries.resize(cells);
        for (int i = 0; i < cells; ++i)
            m.entries[i] = ((bits >> i) & 1) ? 1 : -1;
        if (is_hadamard(m)) ++count;
    }
    return count;
}

} // namespace detail

// Exact number of +-1 matrices of the given order with pairwise orthogonal
// columns. Orders up to 4 are brute-forced (<= 2^16 matrices); 5..8 use a
// column-by-column backtracking search behind the long-running flag.
inline uint64_t count_hadamard(int order, bool allow_long = false) {
    if (order < 1) throw RangeError("order must be >= 1");
    if (order > 8)
        throw CapacityError("counting is capped at order 8");
    if (order <= 4) return detail::count_hadamard_brute(order);
    if (!allow_long)
        throw BudgetExceeded("orders 5..8 need the long-running flag");
    return detail::count_hadamard_backtracking(order);
}

// Exact count of a single weight slice, injectable so the identity check can
// be exercised against a stub.
using CensusProvider = std::function<uint64_t(int n, int k, uint64_t q)>;

struct HadamardIdentityReport {
    int order = 0;
    uint64_t lhs = 0;          // matrix count
    uint64_t rhs = 0;          // 2^order * order! * census_value
    uint64_t census_value = 0; // N(order-1, 2, order/4)
    bool equal = false;
};

// Checks count_hadamard(order) = 2^order * order! * N(order-1, 2, order/4),
// both sides from independent paths.
inline HadamardIdentityReport verify_identity(int order,
                                              CensusProvider provider = {}) {
    if (order <= 2 || order % 4 != 0)
        throw RangeError("identity requires order divisible by 4 and > 2");
    if (!provider)
        provider = [](int n, int k, uint64_t q) {
            return count_single(n, k, q).count;
        };
    HadamardIdentityReport report;
    report.order = order;
    report.lhs = count_hadamard(order, /*allow_long=*/order > 4);
    report.census_value = provider(order - 1, 2, order / 4);
    unsigned __int128 rhs = 1;
    for (int i = 2; i <= order; ++i) rhs *= i;
    rhs <<= order;
    rhs *= report.census_value;
    if (rhs > ~0ull) throw CapacityError("identity right side overflows u64");
    report.rhs = static_cast<uint64_t>(rhs);
    report.equal = report.lhs == report.rhs;
    return report;
}

} // namespace cicount
