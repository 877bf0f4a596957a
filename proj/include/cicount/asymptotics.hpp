#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "errors.hpp"

namespace cicount {

inline constexpr int kMaxFormulaN = 62; // 2^n must stay an exact u64

// --- log2-space numeric kernels ---

// log2 of a positive big integer: exact binary exponent plus log2 of the
// 53-bit mantissa; absolute error ~1e-16 in log2 space.
inline long double log2_mpz(const mpz_class& z) {
    if (z <= 0) throw DomainError("log2 of a non-positive integer");
    long exp2s = 0;
    double mant = mpz_get_d_2exp(&exp2s, z.get_mpz_t());
    return static_cast<long double>(exp2s) + std::log2(static_cast<long double>(mant));
}

// log2 C(a,b). Dual path: when the small side fits, a direct term-by-term
// sum avoids the catastrophic cancellation of the lgamma difference (which
// costs ~1e-10 relative error precisely when b << a); when the small side is
// large the lgamma route is safe because the result itself is large.
inline long double log2_binomial(uint64_t a, uint64_t b) {
    if (b > a) throw RangeError("log2_binomial requires b <= a");
    uint64_t small = std::min(b, a - b);
    if (small == 0) return 0.0L;
    if (small <= (1ull << 20)) {
        long double sum = 0.0L;
        for (uint64_t i = 0; i < small; ++i)
            sum += std::log2(static_cast<long double>(a - i)) -
                   std::log2(static_cast<long double>(i + 1));
        return sum;
    }
    long double la = static_cast<long double>(a);
    long double lb = static_cast<long double>(b);
    return (std::lgamma(la + 1.0L) - std::lgamma(lb + 1.0L) -
            std::lgamma(la - lb + 1.0L)) /
           std::log(2.0L);
}

inline long double log2_factorial(uint64_t m) {
    if (m <= (1ull << 20)) {
        long double sum = 0.0L;
        for (uint64_t i = 2; i <= m; ++i)
            sum += std::log2(static_cast<long double>(i));
        return sum;
    }
    return std::lgamma(static_cast<long double>(m) + 1.0L) / std::log(2.0L);
}

// --- derived parameters ---

// Everything exactly representable is exact: lambda and A as rationals, M
// and Q as big integers. eta is the real error-term magnitude
// 2^{-n/2+3k} n^{3k+3/2} M^{3/2} lambda^{-1/2} (1-lambda)^{-1/2}.
struct AsymptoticParams {
    int n = 0;
    int k = 0;
    uint64_t q = 0;
    mpq_class lambda;
    mpq_class A;
    mpz_class M;
    mpz_class Q;
    long double eta = 0.0L;
    bool in_kbounds = false; // weight far enough from both ends
    bool in_krange = false;  // k <= (ln2/6 - 0.01) n / ln n
};

namespace detail {

inline void check_nk(int n, int k) {
    if (n < 1 || k < 1 || k > n)
        throw RangeError("require 1 <= k <= n");
    if (n > kMaxFormulaN)
        throw CapacityError("formula evaluation capped at n = " +
                            std::to_string(kMaxFormulaN));
}

inline mpz_class sum_binomials(int n, int k) {
    mpz_class m = 0, term;
    for (int j = 0; j <= k; ++j) {
        mpz_bin_uiui(term.get_mpz_t(), n, j);
        m += term;
    }
    return m;
}

inline mpz_class sum_weighted_binomials(int n, int k) {
    mpz_class q = 0, term;
    for (int j = 1; j <= k; ++j) {
        mpz_bin_uiui(term.get_mpz_t(), n, j);
        q += j * term;
    }
    return q;
}

inline bool krange_flag(int n, int k) {
    if (n < 2) return false; // bound undefined at n = 1 (ln 1 = 0)
    double bound = (std::log(2.0) / 6.0 - 0.01) * n / std::log(static_cast<double>(n));
    return k <= bound;
}

inline long double log2_pi() {
    return std::log2(3.14159265358979323846264338327950288L);
}

} // namespace detail

inline AsymptoticParams params(int n, int k, uint64_t q) {
    detail::check_nk(n, k);
    uint64_t max_q = 1ull << (n - k);
    if (q > max_q)
        throw RangeError("q = " + std::to_string(q) + " exceeds 2^{n-k} = " +
                         std::to_string(max_q));
    AsymptoticParams p;
    p.n = n;
    p.k = k;
    p.q = q;
    p.lambda = mpq_class(mpz_class(q) << k, mpz_class(1) << n);
    p.lambda.canonicalize();
    p.A = p.lambda * (1 - p.lambda);
    p.A.canonicalize();
    p.M = detail::sum_binomials(n, k);
    p.Q = detail::sum_weighted_binomials(n, k);

    if (q == 0 || q == max_q) {
        p.eta = INFINITY;
        p.in_kbounds = false;
    } else {
        long double log2_eta =
            (-static_cast<long double>(n) / 2.0L + 3.0L * k) +
            (3.0L * k + 1.5L) * std::log2(static_cast<long double>(n)) +
            1.5L * log2_mpz(p.M) -
            0.5L * (std::log2(static_cast<long double>(q)) + k - n) -
            0.5L * (std::log2(static_cast<long double>(max_q - q)) + k - n);
        p.eta = std::exp2(log2_eta);
        // Validity window: q and 2^{n-k} - q must both exceed
        // 2^{5k} n^{6k+3} M^3 (implementation constant c = 1). Exact integers.
        mpz_class threshold = mpz_class(1) << (5 * k);
        mpz_class npow;
        mpz_ui_pow_ui(npow.get_mpz_t(), n, 6 * k + 3);
        threshold *= npow;
        threshold *= p.M * p.M * p.M;
        p.in_kbounds =
            mpz_class(q) > threshold && mpz_class(max_q - q) > threshold;
    }
    p.in_krange = detail::krange_flag(n, k);
    return p;
}

// --- formula evaluations ---

enum class Method { denisov, main, resilient, nk_sum, k1_exact_form, small_q };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::denisov: return "denisov";
        case Method::main: return "main";
        case Method::resilient: return "resilient";
        case Method::nk_sum: return "nk_sum";
        case Method::k1_exact_form: return "k1_exact_form";
        case Method::small_q: return "small_q";
    }
    return "?";
}

struct Log2Estimate {
    long double log2_value = 0.0L;
    Method method = Method::main;
    bool valid = false;
    std::vector<std::string> notes;
};

namespace detail {

inline std::string fmt_real(long double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", static_cast<double>(v));
    return buf;
}

inline void note_flags(Log2Estimate& e, const AsymptoticParams& p) {
    e.notes.push_back("eta = " + fmt_real(p.eta));
    if (!p.in_kbounds)
        e.notes.push_back("weight too close to an end of its range for the "
                          "error term to be controlled");
    if (!p.in_krange)
        e.notes.push_back("k exceeds the supported growth rate for this n");
}

} // namespace detail

// Central estimate of log2 N(n,k,q):
// Q - 2^n (lambda log2 lambda + (1-lambda) log2(1-lambda))
//   - (M/2) log2(pi A 2^{n+1}).
// Singular at lambda in {0,1}, where the exact count is 1.
inline Log2Estimate estimate_main(const AsymptoticParams& p) {
    uint64_t max_q = 1ull << (p.n - p.k);
    if (p.q == 0 || p.q == max_q)
        throw DomainError("estimate is singular at lambda in {0,1}; the exact "
                          "count there is 1");
    uint64_t w = p.q << p.k;           // 2^k q
    uint64_t cw = (1ull << p.n) - w;   // 2^n - 2^k q
    // Divide before taking logs: q / 2^(n-k) is exact in long double, so the
    // log keeps full relative precision even one count away from an endpoint,
    // where log2(count) + k - n would round the whole term to zero.
    long double max_ld = static_cast<long double>(max_q);
    long double l2_lambda =
        std::log2(static_cast<long double>(p.q) / max_ld);
    long double l2_co =
        std::log2(static_cast<long double>(max_q - p.q) / max_ld);
    long double entropy = -(static_cast<long double>(w) * l2_lambda +
                            static_cast<long double>(cw) * l2_co);
    long double m_half = static_cast<long double>(p.M.get_d()) / 2.0L;
    // log2(pi A 2^{n+1}) with log2 A = log2 lambda + log2(1 - lambda).
    long double window =
        detail::log2_pi() + (l2_lambda + l2_co) + (p.n + 1);

    Log2Estimate e;
    e.method = Method::main;
    e.log2_value =
        static_cast<long double>(p.Q.get_d()) + entropy - m_half * window;
    e.valid = p.in_kbounds;
    detail::note_flags(e, p);
    return e;
}

// log2 of the balanced-count estimate 2^{2^n + Q} (2^{n-1} pi)^{-M/2}.
inline Log2Estimate estimate_resilient(int n, int k) {
    detail::check_nk(n, k);
    mpz_class M = detail::sum_binomials(n, k);
    mpz_class Q = detail::sum_weighted_binomials(n, k);
    Log2Estimate e;
    e.method = Method::resilient;
    e.log2_value = std::exp2(static_cast<long double>(n)) +
                   static_cast<long double>(Q.get_d()) -
                   (static_cast<long double>(M.get_d()) / 2.0L) *
                       ((n - 1) + detail::log2_pi());
    e.valid = detail::krange_flag(n, k);
    if (!e.valid)
        e.notes.push_back("k exceeds the supported growth rate for this n");
    return e;
}

// The expression both total-count citations share, evaluated once.
inline constexpr const char* kNkSumExpression =
    "2^(2^n + Q - k) * (2^(n-1) * pi)^(-(M-1)/2)";
inline constexpr const char* kDenisovExpression =
    "2^(2^n + Q - k) * (2^(n-1) * pi)^(-(M-1)/2)";

namespace detail {

inline Log2Estimate nk_total(int n, int k, Method tag) {
    check_nk(n, k);
    mpz_class M = sum_binomials(n, k);
    mpz_class Q = sum_weighted_binomials(n, k);
    Log2Estimate e;
    e.method = tag;
    e.log2_value = std::exp2(static_cast<long double>(n)) +
                   static_cast<long double>(Q.get_d()) - k -
                   ((static_cast<long double>(M.get_d()) - 1.0L) / 2.0L) *
                       ((n - 1) + log2_pi());
    e.valid = krange_flag(n, k);
    if (!e.valid)
        e.notes.push_back("k exceeds the supported growth rate for this n");
    return e;
}

} // namespace detail

// log2 of the total-count estimate 2^{2^n + Q - k} (2^{n-1} pi)^{-(M-1)/2}.
inline Log2Estimate estimate_nk(int n, int k) {
    return detail::nk_total(n, k, Method::nk_sum);
}

// Same closed form under its earlier attribution; kept as a distinct method
// tag so both citations stay visible in output.
inline Log2Estimate estimate_denisov(int n, int k) {
    return detail::nk_total(n, k, Method::denisov);
}

enum class K1Mode { exact, logspace };

// log2 of the k=1 main factor C(2^n, 2q) * (C(2^{n-1}, q)^2 / C(2^n, 2q))^n.
// Exact mode evaluates the factor as an exact rational (big binomials);
// logspace mode goes through log-gamma. Both agree to 1e-9 where both run.
inline Log2Estimate estimate_k1_exact_form(int n, uint64_t q, K1Mode mode) {
    detail::check_nk(n, 1);
    uint64_t half = 1ull << (n - 1);
    if (q > half)
        throw RangeError("q = " + std::to_string(q) + " exceeds 2^{n-1} = " +
                         std::to_string(half));
    Log2Estimate e;
    e.method = Method::k1_exact_form;
    e.valid = true;
    if (mode == K1Mode::exact) {
        if (n > 16)
            throw CapacityError("exact mode is capped at n = 16; use logspace");
        mpz_class big, small;
        mpz_bin_uiui(big.get_mpz_t(), 1ull << n, 2 * q);
        mpz_bin_uiui(small.get_mpz_t(), half, q);
        // C(2^n,2q) * (C(2^{n-1},q)^2 / C(2^n,2q))^n = small^{2n} / big^{n-1}
        mpz_class numerator, denominator;
        mpz_pow_ui(numerator.get_mpz_t(), small.get_mpz_t(), 2 * n);
        mpz_pow_ui(denominator.get_mpz_t(), big.get_mpz_t(), n - 1);
        e.log2_value = log2_mpz(numerator) - log2_mpz(denominator);
        e.notes.push_back("exact rational main factor");
    } else {
        long double l2_big = log2_binomial(1ull << n, 2 * q);
        long double l2_small = log2_binomial(half, q);
        e.log2_value = l2_big + n * (2.0L * l2_small - l2_big);
        e.notes.push_back("log-gamma main factor");
    }
    return e;
}

// log2 of the small-index estimate C(2q,q)^n / (2q)! for N(n,1,q).
inline Log2Estimate estimate_small_q(int n, uint64_t q) {
    detail::check_nk(n, 1);
    if (q > (1ull << 62)) throw CapacityError("2q must fit in 64 bits");
    Log2Estimate e;
    e.method = Method::small_q;
    e.log2_value = n * log2_binomial(2 * q, q) - log2_factorial(2 * q);
    long double spread = static_cast<long double>(q) * static_cast<long double>(q) /
                         std::exp2(static_cast<long double>(n));
    e.valid = spread <= 0.1L;
    if (!e.valid)
        e.notes.push_back("q^2/2^n = " + detail::fmt_real(spread) +
                          " > 0.1: outside the intended small-index regime");
    return e;
}

} // namespace cicount
