#pragma once

#include <atomic>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "combinations.hpp"
#include "errors.hpp"

namespace cicount {

// Resource limits and execution knobs for a census run. Worker count never
// affects results, only wall time.
struct CensusBudget {
    uint64_t max_combinations = 1ull << 33; // admits a full n=5 census
    double max_seconds = 0.0;               // 0 = no deadline
    unsigned workers = 1;
    bool allow_large = false; // lifts the n cap from 5 to 6
    std::function<void(uint64_t done, uint64_t total)> progress; // optional
};

struct CensusEntry {
    int n = 0;
    int k = 0;
    uint64_t q = 0;
    uint64_t weight = 0;
    uint64_t count = 0;
};

struct CensusTable {
    int n = 0;
    int k = 0;
    std::vector<CensusEntry> entries; // q = 0 .. 2^{n-k}
    uint64_t total = 0;

    uint64_t count(uint64_t q) const { return entries.at(q).count; }

    std::string to_csv() const {
        std::string out = "n,k,q,weight,count\n";
        for (const CensusEntry& e : entries) {
            out += std::to_string(e.n) + ',' + std::to_string(e.k) + ',' +
                   std::to_string(e.q) + ',' + std::to_string(e.weight) + ',' +
                   std::to_string(e.count) + '\n';
        }
        return out;
    }
};

namespace detail {

// Shared, read-only description of one weight slice: the tracked masks are
// all w != 0 with popcount(w) <= k; a support set is counted when every
// tracked coefficient sum_{y in S} (-1)^{w.y} is zero.
struct SliceContext {
    int n;
    int tracked; // M - 1
    std::vector<int8_t> sign; // [y * tracked + j] = (-1)^{popcount(y & mask_j)}

    SliceContext(int n_, int k) : n(n_) {
        uint64_t size = 1ull << n;
        std::vector<uint32_t> masks;
        for (int pc = 1; pc <= k; ++pc)
            for (uint32_t w = 1; w < size; ++w)
                if (std::popcount(w) == pc) masks.push_back(w);
        tracked = static_cast<int>(masks.size());
        sign.resize(size * masks.size());
        for (uint64_t y = 0; y < size; ++y)
            for (size_t j = 0; j < masks.size(); ++j)
                sign[y * masks.size() + j] =
                    (std::popcount(static_cast<uint32_t>(y) & masks[j]) & 1) ? -1
                                                                             : 1;
    }
};

// Walks one contiguous rank range of weight-w support sets in revolving-door
// order, maintaining all tracked coefficients incrementally: each step swaps
// one support point, an O(tracked) update.
inline uint64_t count_rank_range(const SliceContext& ctx, int weight,
                                 uint64_t lo, uint64_t hi) {
    int size = 1 << ctx.n;
    RevolvingDoor iter = RevolvingDoor::at_rank(size, weight, lo);
    const int8_t* sign = ctx.sign.data();
    int tracked = ctx.tracked;

    int32_t cnt[64] = {0};
    int nonzero = 0;
    uint64_t mask = iter.mask();
    while (mask) {
        int y = std::countr_zero(mask);
        mask &= mask - 1;
        const int8_t* row = sign + static_cast<size_t>(y) * tracked;
        for (int j = 0; j < tracked; ++j) cnt[j] += row[j];
    }
    for (int j = 0; j < tracked; ++j) nonzero += (cnt[j] != 0);

    uint64_t hits = (nonzero == 0);
    for (uint64_t r = lo + 1; r < hi; ++r) {
        iter.next();
        const int8_t* out_row = sign + static_cast<size_t>(iter.out()) * tracked;
        const int8_t* in_row = sign + static_cast<size_t>(iter.in()) * tracked;
        for (int j = 0; j < tracked; ++j) {
            int d = in_row[j] - out_row[j];
            if (d) {
                int32_t old = cnt[j];
                int32_t now = old + d;
                nonzero += (now != 0) - (old != 0);
                cnt[j] = now;
            }
        }
        hits += (nonzero == 0);
    }
    return hits;
}

struct Deadline {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    double max_seconds = 0.0;

    bool expired() const {
        if (max_seconds <= 0.0) return false;
        std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - start;
        return elapsed.count() > max_seconds;
    }
};

// One weight slice, sharded into contiguous rank ranges pulled by workers.
// Partial counts are summed in chunk order, so the result is identical for
// any worker count. The deadline is polled only at chunk pickup: results are
// never timing-dependent, only completion is.
inline uint64_t count_slice(const SliceContext& ctx, int weight,
                            const CensusBudget& budget, const Deadline& deadline,
                            std::atomic<uint64_t>& done_combinations,
                            uint64_t total_combinations) {
    int size = 1 << ctx.n;
    if (weight == 0 || weight == size) return 1; // empty/full support
    uint64_t ranks = binomial(size, weight);

    unsigned workers = budget.workers > 0 ? budget.workers : 1;
    uint64_t target_chunk = 1ull << 18;
    uint64_t chunks = (ranks + target_chunk - 1) / target_chunk;
    if (chunks > 64ull * workers) chunks = 64ull * workers;
    if (chunks < 1) chunks = 1;

    std::vector<uint64_t> partial(chunks, 0);
    std::atomic<uint64_t> next_chunk{0};
    std::atomic<bool> expired{false};
    std::mutex progress_mutex;

    auto run = [&] {
        while (true) {
            uint64_t c = next_chunk.fetch_add(1);
            if (c >= chunks) return;
            if (deadline.expired()) {
                expired.store(true);
                return;
            }
            uint64_t lo = static_cast<uint64_t>(
                (static_cast<unsigned __int128>(ranks) * c) / chunks);
            uint64_t hi = static_cast<uint64_t>(
                (static_cast<unsigned __int128>(ranks) * (c + 1)) / chunks);
            if (lo >= hi) continue;
            partial[c] = count_rank_range(ctx, weight, lo, hi);
            uint64_t done =
                done_combinations.fetch_add(hi - lo) + (hi - lo);
            if (budget.progress) {
                std::lock_guard<std::mutex> lock(progress_mutex);
                budget.progress(done, total_combinations);
            }
        }
    };

    if (workers <= 1 || chunks == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        unsigned spawn = workers < chunks ? workers : static_cast<unsigned>(chunks);
        pool.reserve(spawn);
        for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(run);
        for (std::thread& t : pool) t.join();
    }
    if (expired.load())
        throw BudgetExceeded("census deadline of " +
                             std::to_string(budget.max_seconds) +
                             " seconds exceeded");

    uint64_t total = 0;
    for (uint64_t c = 0; c < chunks; ++c) total += partial[c];
    return total;
}

inline void check_census_range(int n, int k, const CensusBudget& budget) {
    if (k < 1 || n < 1 || k > n)
        throw InvalidRange("census requires 1 <= k <= n");
    int cap = budget.allow_large ? 6 : 5;
    if (n > cap)
        throw InvalidRange(
            "census supports n <= 5 (n = 6 with allow_large); got n = " +
            std::to_string(n));
}

inline uint64_t slice_combinations(int n, uint64_t weight) {
    return binomial(1 << n, static_cast<int>(weight));
}

} // namespace detail

// Exact N(n,k,q) for one weight slice.
inline CensusEntry count_single(int n, int k, uint64_t q,
                                const CensusBudget& budget = {}) {
    detail::check_census_range(n, k, budget);
    uint64_t max_q = 1ull << (n - k);
    if (q > max_q)
        throw InvalidRange("q = " + std::to_string(q) + " exceeds 2^{n-k} = " +
                           std::to_string(max_q));
    uint64_t weight = q << k;
    uint64_t work = detail::slice_combinations(n, weight);
    if (work > budget.max_combinations)
        throw BudgetExceeded("slice requires " + std::to_string(work) +
                             " combinations, budget is " +
                             std::to_string(budget.max_combinations));
    detail::SliceContext ctx(n, k);
    detail::Deadline deadline{.max_seconds = budget.max_seconds};
    std::atomic<uint64_t> done{0};
    CensusEntry e;
    e.n = n;
    e.k = k;
    e.q = q;
    e.weight = weight;
    e.count = detail::count_slice(ctx, static_cast<int>(weight), budget,
                                  deadline, done, work);
    return e;
}

// Exact N(n,k,q) for every q in [0, 2^{n-k}], plus the total N(n,k).
inline CensusTable census(int n, int k, const CensusBudget& budget = {}) {
    detail::check_census_range(n, k, budget);
    uint64_t max_q = 1ull << (n - k);

    unsigned __int128 work = 0;
    for (uint64_t q = 0; q <= max_q; ++q)
        work += detail::slice_combinations(n, q << k);
    if (work > budget.max_combinations)
        throw BudgetExceeded(
            "census requires " +
            std::to_string(static_cast<uint64_t>(
                work > ~0ull ? ~0ull : static_cast<uint64_t>(work))) +
            " combinations, budget is " + std::to_string(budget.max_combinations));
    uint64_t total_work = static_cast<uint64_t>(work);

    detail::SliceContext ctx(n, k);
    detail::Deadline deadline{.max_seconds = budget.max_seconds};
    std::atomic<uint64_t> done{0};

    CensusTable table;
    table.n = n;
    table.k = k;
    for (uint64_t q = 0; q <= max_q; ++q) {
        CensusEntry e;
        e.n = n;
        e.k = k;
        e.q = q;
        e.weight = q << k;
        e.count = detail::count_slice(ctx, static_cast<int>(e.weight), budget,
                                      deadline, done, total_work);
        table.entries.push_back(e);
        table.total += e.count;
    }
    return table;
}

} // namespace cicount
