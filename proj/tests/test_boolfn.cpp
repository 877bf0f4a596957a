#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include <cicount/boolfn.hpp>

using cicount::BooleanFunction;
using cicount::CiProfile;
using cicount::WalshSpectrum;

namespace {

// Independent oracle: the defining double loop, O(4^n).
std::vector<int64_t> naive_walsh(const BooleanFunction& f) {
    std::vector<int64_t> c(f.size());
    for (uint64_t w = 0; w < f.size(); ++w) {
        int64_t acc = 0;
        for (uint64_t y = 0; y < f.size(); ++y)
            if (f.get(y))
                acc += (std::popcount(w & y) & 1) ? -1 : 1;
        c[w] = acc;
    }
    return c;
}

BooleanFunction random_function(int n, std::mt19937_64& rng) {
    BooleanFunction f(n);
    for (uint64_t i = 0; i < f.size(); ++i) f.set(i, (rng() & 1) != 0);
    return f;
}

BooleanFunction from_all_bits(int n, uint64_t bits) {
    BooleanFunction f(n);
    for (uint64_t i = 0; i < f.size(); ++i) f.set(i, (bits >> i) & 1);
    return f;
}

BooleanFunction parity_function(int n) {
    BooleanFunction f(n);
    for (uint64_t i = 0; i < f.size(); ++i)
        f.set(i, std::popcount(i) & 1);
    return f;
}

} // namespace

TEST_CASE("transform of fixed small functions") {
    // Zero function: all coefficients vanish.
    BooleanFunction zero(2);
    CHECK(cicount::walsh_transform(zero).coeffs ==
          std::vector<int64_t>{0, 0, 0, 0});

    // Single support point at index 3: coefficient (-1)^{w.(1,1)}.
    BooleanFunction conj(2);
    conj.set(3, true);
    CHECK(cicount::walsh_transform(conj).coeffs ==
          std::vector<int64_t>{1, -1, -1, 1});

    // Parity of three variables: mass only at the all-ones mask.
    WalshSpectrum s = cicount::walsh_transform(parity_function(3));
    std::vector<int64_t> naive = naive_walsh(parity_function(3));
    CHECK(s.coeffs == naive);
    CHECK(s.coeffs[0] == 4);
    for (uint64_t w = 1; w < 7; ++w) CHECK(s.coeffs[w] == 0);
    CHECK(s.coeffs[7] == -4);
}

TEST_CASE("butterfly equals the naive transform on every function, n <= 4") {
    for (int n = 1; n <= 4; ++n) {
        uint64_t functions = 1ull << (1ull << n);
        for (uint64_t bits = 0; bits < functions; ++bits) {
            BooleanFunction f = from_all_bits(n, bits);
            REQUIRE(cicount::walsh_transform(f).coeffs == naive_walsh(f));
        }
    }
}

TEST_CASE("butterfly equals the naive transform on random functions, n <= 10") {
    std::mt19937_64 rng(0xb001f00d);
    for (int n = 5; n <= 10; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            BooleanFunction f = random_function(n, rng);
            REQUIRE(cicount::walsh_transform(f).coeffs == naive_walsh(f));
        }
    }
}

TEST_CASE("spectrum invariants on random functions") {
    std::mt19937_64 rng(0xc0ffee);
    for (int n = 1; n <= 10; ++n) {
        int64_t size = int64_t{1} << n;
        for (int trial = 0; trial < 300; ++trial) {
            BooleanFunction f = random_function(n, rng);
            WalshSpectrum s = cicount::walsh_transform(f);
            // DC term is the weight.
            REQUIRE(s.coeffs[0] == static_cast<int64_t>(f.weight()));
            // Parseval for 0/1-valued functions, exact in integers.
            int64_t sum_sq = 0;
            for (int64_t c : s.coeffs) {
                sum_sq += c * c;
                REQUIRE(c >= -(size / 2));
                REQUIRE(c <= size);
            }
            REQUIRE(sum_sq == size * static_cast<int64_t>(f.weight()));
        }
    }
}

TEST_CASE("classification of fixed functions") {
    // Constant one: every nonzero coefficient vanishes; order n by convention.
    BooleanFunction ones(3);
    for (uint64_t i = 0; i < 8; ++i) ones.set(i, true);
    CiProfile p1 = cicount::ci_order(ones);
    CHECK(p1.ci_order == 3);
    CHECK(p1.weight == 8);
    CHECK(p1.q_at_order == 1);
    CHECK(p1.resilient_order == -1); // weight 8 != 2^{n-1}

    BooleanFunction zero(3);
    CiProfile p0 = cicount::ci_order(zero);
    CHECK(p0.ci_order == 3);
    CHECK(p0.weight == 0);
    CHECK(p0.resilient_order == -1);

    // Dictator y1: first-order coefficient is -2^{n-1} != 0.
    BooleanFunction dictator(3);
    for (uint64_t i = 0; i < 8; ++i) dictator.set(i, i & 1);
    CHECK(cicount::walsh_transform(dictator).coeffs[1] == -4);
    CHECK(cicount::ci_order(dictator).ci_order == 0);

    // Parity of 4 variables is (n-1)-resilient.
    CiProfile pp = cicount::ci_order(parity_function(4));
    CHECK(pp.ci_order == 3);
    CHECK(pp.resilient_order == 3);
    CHECK(pp.weight == 8);
    CHECK(pp.q_at_order == 1);
}

TEST_CASE("classification properties on random functions") {
    std::mt19937_64 rng(0xabcdef);
    for (int n = 1; n <= 8; ++n) {
        for (int trial = 0; trial < 200; ++trial) {
            BooleanFunction f = random_function(n, rng);
            CiProfile p = cicount::ci_order(f);
            REQUIRE(p.ci_order >= 0);
            REQUIRE(p.ci_order <= n);
            // Weight divisibility and the index at order.
            REQUIRE(p.weight % (1ull << p.ci_order) == 0);
            REQUIRE(p.q_at_order == p.weight >> p.ci_order);
            REQUIRE(p.resilient_order ==
                    (p.weight == f.size() / 2 ? p.ci_order : -1));

            // Complementation: 1-g negates every AC coefficient.
            BooleanFunction comp(n);
            for (uint64_t i = 0; i < f.size(); ++i) comp.set(i, !f.get(i));
            WalshSpectrum sf = cicount::walsh_transform(f);
            WalshSpectrum sc = cicount::walsh_transform(comp);
            REQUIRE(sc.coeffs[0] ==
                    static_cast<int64_t>(f.size()) - sf.coeffs[0]);
            for (uint64_t w = 1; w < f.size(); ++w)
                REQUIRE(sc.coeffs[w] == -sf.coeffs[w]);
            REQUIRE(cicount::ci_order(comp).ci_order == p.ci_order);
        }
    }
}

TEST_CASE("immunity order is invariant under input permutation and flips") {
    std::mt19937_64 rng(0x5ca1ab1e);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng() % 5); // 2..6
        BooleanFunction f = random_function(n, rng);
        int order = cicount::ci_order(f).ci_order;

        // Random permutation of the variables.
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        uint64_t flips = rng() & (f.size() - 1);

        BooleanFunction g(n);
        for (uint64_t y = 0; y < f.size(); ++y) {
            uint64_t py = 0;
            for (int j = 0; j < n; ++j)
                if ((y >> j) & 1) py |= 1ull << perm[j];
            g.set(py ^ flips, f.get(y));
        }
        REQUIRE(cicount::ci_order(g).ci_order == order);
        REQUIRE(g.weight() == f.weight());
    }
}

TEST_CASE("orthogonal-array view of fixed functions") {
    // XOR support: indices 1 and 2.
    BooleanFunction x(2);
    x.set(1, true);
    x.set(2, true);
    CHECK(cicount::to_orthogonal_array(x) == std::vector<uint32_t>{1, 2});

    // Parity on 3 variables: 4 rows; every pair of columns sees each of the
    // four 2-bit patterns exactly once (strength 2, index 1).
    BooleanFunction p3 = parity_function(3);
    std::vector<uint32_t> rows = cicount::to_orthogonal_array(p3);
    REQUIRE(rows.size() == 4);
    for (int c1 = 0; c1 < 3; ++c1)
        for (int c2 = c1 + 1; c2 < 3; ++c2) {
            int pattern_count[4] = {0, 0, 0, 0};
            for (uint32_t r : rows)
                ++pattern_count[((r >> c1) & 1) | (((r >> c2) & 1) << 1)];
            for (int pat = 0; pat < 4; ++pat) CHECK(pattern_count[pat] == 1);
        }

    // Empty function: no rows.
    CHECK(cicount::to_orthogonal_array(BooleanFunction(2)).empty());
}

TEST_CASE("array-to-function inverse and error paths") {
    BooleanFunction x =
        cicount::from_orthogonal_array(2, std::vector<uint32_t>{1, 2});
    CHECK(x.to_bits_string() == "0110");

    CHECK_THROWS_AS(
        cicount::from_orthogonal_array(2, std::vector<uint32_t>{1, 1}),
        cicount::DuplicateRow);
    CHECK_THROWS_AS(
        cicount::from_orthogonal_array(2, std::vector<uint32_t>{4}),
        cicount::ShapeError);
}

TEST_CASE("round trip function -> array -> function on random inputs") {
    std::mt19937_64 rng(0x0a0a);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + static_cast<int>(rng() % 6); // 1..6
        BooleanFunction f = random_function(n, rng);
        BooleanFunction back =
            cicount::from_orthogonal_array(n, cicount::to_orthogonal_array(f));
        REQUIRE(back == f);
    }
}

TEST_CASE("text formats round trip and auto-detect") {
    BooleanFunction f = parity_function(3);
    CHECK(f.to_bits_string() == "01101001");
    CHECK(BooleanFunction::from_bits_string(3, "01101001") == f);
    std::string hex = f.to_hex_string();
    CHECK(BooleanFunction::from_hex_string(3, hex) == f);
    // Auto-detection by length: 2^n characters = bits, 2^n/4 = hex.
    CHECK(BooleanFunction::from_truth_table_text(3, "01101001") == f);
    CHECK(BooleanFunction::from_truth_table_text(3, hex) == f);

    std::mt19937_64 rng(0xfeed);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(rng() % 8);
        BooleanFunction g = random_function(n, rng);
        REQUIRE(BooleanFunction::from_truth_table_text(n, g.to_bits_string()) ==
                g);
        REQUIRE(BooleanFunction::from_truth_table_text(n, g.to_hex_string()) ==
                g);
    }
}

TEST_CASE("oa text parsing matches the row conventions") {
    // Leftmost character is the highest variable: index 1 prints as "01".
    CHECK(cicount::format_oa_row(1, 2) == "01");
    CHECK(cicount::format_oa_row(2, 2) == "10");

    cicount::OaText oa = cicount::parse_oa_text("# comment\n01\n\n10\n");
    CHECK(oa.n == 2);
    CHECK(oa.rows == std::vector<uint32_t>{1, 2});

    CHECK_THROWS_AS(cicount::parse_oa_text("01\n001\n"), cicount::ShapeError);
    CHECK_THROWS_AS(cicount::parse_oa_text("0x\n"), cicount::ShapeError);
    CHECK_THROWS_AS(cicount::parse_oa_text("# only comments\n"),
                    cicount::ShapeError);

    // Round trip through text for a known function.
    BooleanFunction p3 = parity_function(3);
    cicount::OaText round = cicount::parse_oa_text(cicount::format_oa(p3));
    CHECK(cicount::from_orthogonal_array(round.n, round.rows) == p3);
}

TEST_CASE("capacity and shape guards") {
    CHECK_THROWS_AS(BooleanFunction(25), cicount::CapacityError);
    CHECK_THROWS_AS(BooleanFunction(0), cicount::RangeError);
    CHECK_THROWS_AS(BooleanFunction::from_bits_string(2, "011"),
                    cicount::ShapeError);
    CHECK_THROWS_AS(BooleanFunction::from_hex_string(3, "zz"),
                    cicount::ShapeError);
    CHECK_THROWS_AS(BooleanFunction::from_truth_table_text(3, "011"),
                    cicount::ShapeError);
}
