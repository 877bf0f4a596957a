#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "errors.hpp"

namespace cicount {

// All subsets S of {1..n} with |S| <= k, as bitmasks, in the canonical order
// (cardinality, then lexicographic = ascending mask value within a
// cardinality). members[0] is the empty set; M = member count.
struct SubsetFamily {
    int n = 0;
    int k = 0;
    std::vector<uint32_t> members;

    SubsetFamily(int n_, int k_) : n(n_), k(k_) {
        if (n < 1 || k < 1 || k > n)
            throw RangeError("subset family requires 1 <= k <= n");
        if (n > 24) throw CapacityError("subset family capped at n = 24");
        for (int pc = 0; pc <= k; ++pc)
            for (uint32_t s = 0; s < (1u << n); ++s)
                if (std::popcount(s) == pc) members.push_back(s);
    }

    int M() const { return static_cast<int>(members.size()); }
};

// Multivariate polynomial in the x_S variables (one exponent slot per family
// member, empty set first) whose coefficients are integer polynomials in D.
struct SparsePolynomial {
    using ExpVec = std::vector<int16_t>;
    using DPoly = std::map<int, long long>; // D-degree -> coefficient

    std::map<ExpVec, DPoly> terms;

    static SparsePolynomial one(int vars) {
        SparsePolynomial p;
        p.terms[ExpVec(vars, 0)][0] = 1;
        return p;
    }

    // Multiply by (1 + D * x^exps) where exps has one +-1 entry per variable.
    void mul_binomial_factor(const std::vector<int8_t>& exps) {
        std::map<ExpVec, DPoly> shifted;
        for (const auto& [vec, dpoly] : terms) {
            ExpVec moved = vec;
            for (size_t j = 0; j < exps.size(); ++j) moved[j] += exps[j];
            DPoly& dst = shifted[std::move(moved)];
            for (const auto& [deg, coeff] : dpoly) dst[deg + 1] += coeff;
        }
        for (auto& [vec, dpoly] : shifted) {
            DPoly& dst = terms[vec];
            for (const auto& [deg, coeff] : dpoly) {
                long long& c = dst[deg];
                c += coeff;
                if (c == 0) dst.erase(deg);
            }
            if (dst.empty()) terms.erase(vec);
        }
    }
};

// The product generating function over all sign patterns alpha in {+-1}^n:
// the factor for alpha is (1 + D * prod_S x_S^{alpha_S}) with
// alpha_S = prod_{i in S} alpha_i. Selecting m factors contributes D^m and
// x_(empty)-exponent m, which is what the extraction below relies on.
inline SparsePolynomial build_product_polynomial(const SubsetFamily& family) {
    SparsePolynomial f = SparsePolynomial::one(family.M());
    for (uint32_t a = 0; a < (1u << family.n); ++a) {
        std::vector<int8_t> exps(family.M());
        for (int j = 0; j < family.M(); ++j)
            exps[j] =
                (std::popcount(a & family.members[j]) & 1) ? int8_t{-1} : int8_t{1};
        f.mul_binomial_factor(exps);
    }
    return f;
}

// N(n,k,q) extracted as the x_(empty)^{2^k q} coefficient of the product
// polynomial. The coefficient must be the pure monomial D^{2^k q} times a
// positive integer; anything else falsifies the identity and fails loudly.
inline uint64_t constant_term_count(int n, int k, uint64_t q) {
    if (k < 1 || n < 1 || k > n)
        throw RangeError("constant_term_count requires 1 <= k <= n");
    if (n > 3)
        throw RangeError("constant_term_count is capped at n = 3 (2^n factors)");
    uint64_t max_q = 1ull << (n - k);
    if (q > max_q)
        throw RangeError("q = " + std::to_string(q) + " exceeds 2^{n-k} = " +
                         std::to_string(max_q));

    SubsetFamily family(n, k);
    SparsePolynomial f = build_product_polynomial(family);

    int target_degree = static_cast<int>(q << k);
    SparsePolynomial::ExpVec target(family.M(), 0);
    target[0] = static_cast<int16_t>(target_degree);
    auto it = f.terms.find(target);
    if (it == f.terms.end()) return 0;
    const SparsePolynomial::DPoly& dpoly = it->second;
    if (dpoly.size() != 1 || dpoly.begin()->first != target_degree ||
        dpoly.begin()->second <= 0)
        throw StructureError(
            "extracted coefficient is not a pure positive D^{2^k q} monomial");
    return static_cast<uint64_t>(dpoly.begin()->second);
}

// A torus point with every angle an integer multiple of 2*pi/2^k; residues
// are listed in family order.
struct LatticePoint {
    std::vector<uint32_t> residues; // each in [0, 2^k)
};

// Whether the point satisfies every congruence
// 2^{|S|} * sum_{T >= S} t_T = 0 (mod 2^k).
inline bool is_critical(const LatticePoint& p, const SubsetFamily& family) {
    uint32_t mod = 1u << family.k;
    for (int i = 0; i < family.M(); ++i) {
        uint32_t s = family.members[i];
        uint64_t sum = 0;
        for (int j = 0; j < family.M(); ++j)
            if ((family.members[j] & s) == s) sum += p.residues[j];
        if (((sum << std::popcount(s)) & (mod - 1)) != 0) return false;
    }
    return true;
}

struct LatticeCount {
    mpz_class count;
    mpz_class expected; // 2^Q
    bool grid_checked = false;
    bool leaf_checked = false;
};

// Brute-force filter of the full residue grid (2^k)^M.
inline mpz_class lattice_grid_count(int n, int k) {
    SubsetFamily family(n, k);
    int M = family.M();
    uint32_t mod = 1u << k;
    double grid_bits = M * static_cast<double>(k);
    if (grid_bits > 26)
        throw BudgetExceeded("residue grid (2^k)^M has 2^" +
                             std::to_string(static_cast<int>(grid_bits)) +
                             " points; cap is 2^26");
    // Supersets of each member, for the congruence sums.
    std::vector<std::vector<int>> supersets(M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            if ((family.members[j] & family.members[i]) == family.members[i])
                supersets[i].push_back(j);

    LatticePoint p;
    p.residues.assign(M, 0);
    mpz_class count = 0;
    while (true) {
        bool ok = true;
        for (int i = 0; i < M && ok; ++i) {
            uint64_t sum = 0;
            for (int j : supersets[i]) sum += p.residues[j];
            ok = ((sum << std::popcount(family.members[i])) & (mod - 1)) == 0;
        }
        if (ok) ++count;
        int pos = 0;
        while (pos < M && ++p.residues[pos] == mod) p.residues[pos++] = 0;
        if (pos == M) break;
    }
    return count;
}

// Depth-first leaf count of the triangular solve: residues are assigned in
// order of decreasing |S|, checking S's congruence as soon as t_S is fixed
// (every superset of S is already assigned). Exact but exponential in Q.
inline mpz_class lattice_leaf_count(int n, int k) {
    SubsetFamily family(n, k);
    int M = family.M();
    uint32_t mod = 1u << k;
    uint64_t q_sum = 0;
    for (uint32_t s : family.members) q_sum += std::popcount(s);
    if (q_sum > 20)
        throw BudgetExceeded("leaf walk has 2^" + std::to_string(q_sum) +
                             " leaves; cap is 2^20");

    // order[d] = member index assigned at depth d (decreasing cardinality).
    std::vector<int> order(M);
    for (int i = 0; i < M; ++i) order[i] = M - 1 - i;
    std::vector<std::vector<int>> strict_supersets(M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            if (i != j &&
                (family.members[j] & family.members[i]) == family.members[i])
                strict_supersets[i].push_back(j);

    std::vector<uint32_t> residues(M, 0);
    mpz_class leaves = 0;
    auto dfs = [&](auto&& self, int depth) -> void {
        if (depth == M) {
            ++leaves;
            return;
        }
        int i = order[depth];
        uint64_t carried = 0;
        for (int j : strict_supersets[i]) carried += residues[j];
        int shift = std::popcount(family.members[i]);
        for (uint32_t t = 0; t < mod; ++t) {
            if ((((carried + t) << shift) & (mod - 1)) == 0) {
                residues[i] = t;
                self(self, depth + 1);
            }
        }
    };
    dfs(dfs, 0);
    return leaves;
}

// Counts the critical lattice by the triangular solve, verified level by
// level: for every subset S (decreasing |S|) and EVERY carried residue R the
// congruence 2^{|S|} (t_S + R) = 0 (mod 2^k) is checked exhaustively to have
// exactly 2^{|S|} solutions t_S; the counts then multiply. A non-uniform
// level would falsify the triangular structure and throws StructureError.
// Cross-checked against the residue grid and the literal leaf walk wherever
// those fit their budgets.
inline LatticeCount lattice_count(int n, int k) {
    if (k < 1 || n < 1 || k > n)
        throw RangeError("lattice_count requires 1 <= k <= n");
    if (n > 8) throw RangeError("lattice_count is capped at n = 8");

    SubsetFamily family(n, k);
    uint32_t mod = 1u << k;
    LatticeCount result;
    result.count = 1;
    mpz_class q_sum = 0;
    for (int i = family.M() - 1; i >= 0; --i) {
        int sz = std::popcount(family.members[i]);
        q_sum += sz;
        uint64_t solutions_at_r0 = 0;
        for (uint32_t r = 0; r < mod; ++r) {
            uint64_t solutions = 0;
            for (uint32_t t = 0; t < mod; ++t)
                if (((static_cast<uint64_t>(t) + r) << sz) % mod == 0) ++solutions;
            if (r == 0)
                solutions_at_r0 = solutions;
            else if (solutions != solutions_at_r0)
                throw StructureError(
                    "per-level solution count depends on the carried residue");
        }
        result.count *= solutions_at_r0;
    }
    result.expected = 1;
    mpz_mul_2exp(result.expected.get_mpz_t(), result.expected.get_mpz_t(),
                 mpz_get_ui(q_sum.get_mpz_t()));

    double grid_bits = family.M() * static_cast<double>(k);
    if (grid_bits <= 26) {
        if (lattice_grid_count(n, k) != result.count)
            throw StructureError("residue-grid count disagrees with the solve");
        result.grid_checked = true;
    }
    if (q_sum <= 20) {
        if (lattice_leaf_count(n, k) != result.count)
            throw StructureError("leaf-walk count disagrees with the solve");
        result.leaf_checked = true;
    }
    return result;
}

} // namespace cicount
