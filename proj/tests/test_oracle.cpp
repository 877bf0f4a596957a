#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include <cicount/census.hpp>
#include <cicount/combinations.hpp>
#include <cicount/oracle.hpp>

using cicount::BudgetExceeded;
using cicount::CapacityError;
using cicount::binomial;
using cicount::build_product_polynomial;
using cicount::constant_term_count;
using cicount::count_single;
using cicount::is_critical;
using cicount::lattice_count;
using cicount::lattice_grid_count;
using cicount::lattice_leaf_count;
using cicount::LatticeCount;
using cicount::LatticePoint;
using cicount::RangeError;
using cicount::SparsePolynomial;
using cicount::SubsetFamily;

namespace {

mpz_class pow2(unsigned long bits) {
    mpz_class v = 1;
    mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
    return v;
}

// Sum of |S| over all subsets S of {1..n} with 1 <= |S| <= k.
unsigned long exponent_sum(int n, int k) {
    unsigned long total = 0;
    for (int j = 1; j <= k; ++j)
        total += static_cast<unsigned long>(j) * binomial(n, j);
    return total;
}

} // namespace

TEST_CASE("subset family lists masks by cardinality then value") {
    SubsetFamily fam(3, 2);
    const std::vector<uint32_t> expected_members{0, 1, 2, 4, 3, 5, 6};
    REQUIRE(fam.members == expected_members);
    REQUIRE(fam.M() == 7);

    SubsetFamily wide(5, 3);
    REQUIRE(wide.M() == 1 + 5 + 10 + 10);
    for (size_t i = 0; i < wide.members.size(); ++i) {
        uint32_t s = wide.members[i];
        REQUIRE(s < (1u << 5));
        REQUIRE(std::popcount(s) <= 3);
        if (i > 0) {
            uint32_t prev = wide.members[i - 1];
            bool ordered = std::popcount(prev) < std::popcount(s) ||
                           (std::popcount(prev) == std::popcount(s) && prev < s);
            REQUIRE(ordered);
        }
    }

    SubsetFamily full(4, 4);
    REQUIRE(full.M() == 16);
    REQUIRE(full.members[0] == 0);
}

TEST_CASE("subset family rejects out-of-range shapes") {
    REQUIRE_THROWS_AS(SubsetFamily(3, 0), RangeError);
    REQUIRE_THROWS_AS(SubsetFamily(0, 1), RangeError);
    REQUIRE_THROWS_AS(SubsetFamily(3, 4), RangeError);
    REQUIRE_THROWS_AS(SubsetFamily(25, 1), CapacityError);
}

TEST_CASE("binomial-factor products multiply out by hand") {
    // (1 + D x0 x1^-1)(1 + D x0^-1 x1) =
    //   1 + D x0 x1^-1 + D x0^-1 x1 + D^2
    SparsePolynomial p = SparsePolynomial::one(2);
    p.mul_binomial_factor({int8_t{1}, int8_t{-1}});
    p.mul_binomial_factor({int8_t{-1}, int8_t{1}});

    REQUIRE(p.terms.size() == 3);
    const SparsePolynomial::DPoly expected_constant{{0, 1}, {2, 1}};
    const SparsePolynomial::DPoly expected_cross{{1, 1}};
    REQUIRE(p.terms.at({0, 0}) == expected_constant);
    REQUIRE(p.terms.at({1, -1}) == expected_cross);
    REQUIRE(p.terms.at({-1, 1}) == expected_cross);
}

TEST_CASE("product polynomial carries the selection count in slot zero") {
    std::vector<std::pair<int, int>> shapes{{1, 1}, {2, 1}, {2, 2},
                                            {3, 1}, {3, 2}, {3, 3}};
    for (auto [n, k] : shapes) {
        CAPTURE(n, k);
        SubsetFamily fam(n, k);
        SparsePolynomial f = build_product_polynomial(fam);

        long long total = 0;
        for (const auto& [vec, dpoly] : f.terms) {
            // Every selection of m factors contributes +1 to the empty-set
            // exponent, so each exponent vector pins down a single D-degree.
            REQUIRE(dpoly.size() == 1);
            int degree = dpoly.begin()->first;
            long long coeff = dpoly.begin()->second;
            REQUIRE(vec[0] == degree);
            REQUIRE(coeff > 0);
            for (int16_t e : vec) {
                REQUIRE(std::abs(e) <= degree);
                REQUIRE(((e - degree) & 1) == 0);
            }
            total += coeff;
        }
        // Substituting D = 1 and every x = 1 recovers the factor count 2^(2^n).
        REQUIRE(total == (1ll << (1 << n)));
    }
}

TEST_CASE("constant-term extraction reproduces small censuses exactly") {
    REQUIRE(constant_term_count(2, 1, 0) == 1);
    REQUIRE(constant_term_count(2, 1, 1) == 2);
    REQUIRE(constant_term_count(3, 2, 1) == 2);

    for (int n = 1; n <= 3; ++n)
        for (int k = 1; k <= n; ++k) {
            uint64_t max_q = 1ull << (n - k);
            for (uint64_t q = 0; q <= max_q; ++q) {
                CAPTURE(n, k, q);
                REQUIRE(constant_term_count(n, k, q) ==
                        count_single(n, k, q).count);
            }
        }
}

TEST_CASE("constant-term extraction rejects out-of-range input") {
    REQUIRE_THROWS_AS(constant_term_count(4, 1, 1), RangeError);
    REQUIRE_THROWS_AS(constant_term_count(3, 0, 1), RangeError);
    REQUIRE_THROWS_AS(constant_term_count(0, 1, 0), RangeError);
    REQUIRE_THROWS_AS(constant_term_count(3, 1, 5), RangeError);
}

TEST_CASE("critical-lattice counts equal a power of two everywhere") {
    LatticeCount r11 = lattice_count(1, 1);
    REQUIRE(r11.count == 2);
    REQUIRE(r11.expected == 2);
    REQUIRE(r11.grid_checked);
    REQUIRE(r11.leaf_checked);

    REQUIRE(lattice_count(2, 1).count == 4);
    REQUIRE(lattice_count(3, 2).count == 512);

    for (int n = 1; n <= 4; ++n)
        for (int k = 1; k <= n; ++k) {
            CAPTURE(n, k);
            LatticeCount r = lattice_count(n, k);
            REQUIRE(r.count == r.expected);
            REQUIRE(r.count == pow2(exponent_sum(n, k)));
            if (n <= 3) {
                REQUIRE(r.grid_checked);
                REQUIRE(r.leaf_checked);
            }
        }

    // The two brute-force cross-checks stop fitting their budgets at (4,3).
    REQUIRE(lattice_count(4, 2).grid_checked);
    REQUIRE(lattice_count(4, 2).leaf_checked);
    REQUIRE_FALSE(lattice_count(4, 3).grid_checked);
    REQUIRE_FALSE(lattice_count(4, 3).leaf_checked);
}

TEST_CASE("triangular solve scales far beyond the brute-force budgets") {
    REQUIRE(exponent_sum(8, 2) == 64);
    LatticeCount wide = lattice_count(8, 2);
    REQUIRE(wide.count == pow2(64));
    REQUIRE(wide.count == wide.expected);
    REQUIRE_FALSE(wide.grid_checked);
    REQUIRE_FALSE(wide.leaf_checked);

    REQUIRE(exponent_sum(8, 8) == 1024);
    LatticeCount huge = lattice_count(8, 8);
    REQUIRE(huge.count == pow2(1024));
    REQUIRE(huge.count == huge.expected);
}

TEST_CASE("brute-force lattice walks agree and respect their budgets") {
    REQUIRE(lattice_grid_count(2, 2) == lattice_leaf_count(2, 2));
    REQUIRE(lattice_grid_count(3, 2) == 512);
    REQUIRE(lattice_leaf_count(3, 2) == 512);
    REQUIRE_THROWS_AS(lattice_grid_count(4, 3), BudgetExceeded);
    REQUIRE_THROWS_AS(lattice_leaf_count(4, 3), BudgetExceeded);
}

TEST_CASE("membership predicate agrees with the grid filter") {
    std::vector<std::pair<int, int>> shapes{{2, 1}, {2, 2}, {3, 2}};
    for (auto [n, k] : shapes) {
        CAPTURE(n, k);
        SubsetFamily fam(n, k);
        uint32_t mod = 1u << k;
        LatticePoint p;
        p.residues.assign(fam.M(), 0);
        mpz_class hits = 0;
        while (true) {
            if (is_critical(p, fam)) ++hits;
            int pos = 0;
            while (pos < fam.M() && ++p.residues[pos] == mod)
                p.residues[pos++] = 0;
            if (pos == fam.M()) break;
        }
        REQUIRE(hits == lattice_grid_count(n, k));
    }
}

TEST_CASE("lattice solve rejects out-of-range shapes") {
    REQUIRE_THROWS_AS(lattice_count(9, 1), RangeError);
    REQUIRE_THROWS_AS(lattice_count(3, 0), RangeError);
    REQUIRE_THROWS_AS(lattice_count(3, 4), RangeError);
}
