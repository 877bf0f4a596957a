// Command-line front end: analyze truth tables, run exact censuses, evaluate
// asymptotic estimates, compare the two, validate orthogonal arrays, run the
// verification oracles, and count Hadamard matrices.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 budget/capacity limit. All errors go to stderr as single-line JSON.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <cicount/cicount.hpp>

using nlohmann::ordered_json;

namespace {

std::string fmt_g12(long double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", static_cast<double>(v));
    return buf;
}

void emit(const ordered_json& j) { std::cout << j.dump() << "\n"; }

int exit_code_for(const cicount::Error& e) {
    std::string kind = e.kind();
    if (kind == "budget" || kind == "capacity") return 3;
    if (kind == "structure" || kind == "duplicate_row") return 1;
    return 2; // range / domain / shape: a bad request
}

void print_error(const std::string& kind, const std::string& message) {
    ordered_json j{{"error", kind}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

unsigned resolve_workers(const std::optional<unsigned>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("CICOUNT_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw cicount::RangeError(
                "CICOUNT_WORKERS must be a positive integer, got '" +
                std::string(env) + "'");
        return static_cast<unsigned>(v);
    }
    return 1;
}

// Progress reporting for long runs: stderr only, rate-limited, silent for
// work small enough to finish instantly.
std::function<void(uint64_t, uint64_t)> progress_printer() {
    using clock = std::chrono::steady_clock;
    auto last = std::make_shared<clock::time_point>(clock::now());
    return [last](uint64_t done, uint64_t total) {
        if (total < (1ull << 24)) return;
        auto now = clock::now();
        if (done != total && now - *last < std::chrono::milliseconds(500))
            return;
        *last = now;
        std::fprintf(stderr, "progress: %llu/%llu support sets (%.1f%%)\n",
                     static_cast<unsigned long long>(done),
                     static_cast<unsigned long long>(total),
                     100.0 * static_cast<double>(done) /
                         static_cast<double>(total));
    };
}

struct CensusFlags {
    int n = 0;
    int k = 0;
    std::optional<unsigned> workers;
    bool allow_large = false;
    long budget_seconds = 0;
    std::string format = "csv";

    cicount::CensusBudget budget() const {
        cicount::CensusBudget b;
        b.workers = resolve_workers(workers);
        b.allow_large = allow_large;
        b.max_seconds = static_cast<double>(budget_seconds);
        b.progress = progress_printer();
        return b;
    }
};

void add_census_flags(CLI::App* cmd, CensusFlags& f) {
    cmd->add_option("--n", f.n, "number of variables")->required();
    cmd->add_option("--k", f.k, "immunity order")->required();
    cmd->add_option("--workers", f.workers, "worker threads (default: CICOUNT_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--allow-large", f.allow_large, "lift the n cap from 5 to 6");
    cmd->add_option("--budget-seconds", f.budget_seconds,
                    "abort with a budget error after this many seconds")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--format", f.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

ordered_json entry_json(const cicount::CensusEntry& e) {
    return ordered_json{{"n", e.n},
                        {"k", e.k},
                        {"q", e.q},
                        {"weight", e.weight},
                        {"count", e.count}};
}

int run_analyze(int n, const std::string& table_text) {
    cicount::BooleanFunction f =
        cicount::BooleanFunction::from_truth_table_text(n, table_text);
    cicount::WalshSpectrum s = cicount::walsh_transform(f);
    cicount::CiProfile p = cicount::ci_order(s);
    ordered_json j{{"n", n},
                   {"weight", p.weight},
                   {"walsh_spectrum", s.coeffs},
                   {"ci_order", p.ci_order},
                   {"q_at_order", p.q_at_order},
                   {"resilient_order", p.resilient_order}};
    emit(j);
    return 0;
}

int run_count(const CensusFlags& f, const std::optional<uint64_t>& q) {
    std::vector<cicount::CensusEntry> entries;
    std::optional<uint64_t> total;
    if (q) {
        entries.push_back(cicount::count_single(f.n, f.k, *q, f.budget()));
    } else {
        cicount::CensusTable table = cicount::census(f.n, f.k, f.budget());
        entries = table.entries;
        total = table.total;
    }
    if (f.format == "json") {
        ordered_json rows = ordered_json::array();
        for (const auto& e : entries) rows.push_back(entry_json(e));
        ordered_json j{{"n", f.n}, {"k", f.k}, {"entries", rows}};
        if (total) j["total"] = *total;
        emit(j);
    } else {
        std::string out = "n,k,q,weight,count\n";
        for (const auto& e : entries)
            out += std::to_string(e.n) + ',' + std::to_string(e.k) + ',' +
                   std::to_string(e.q) + ',' + std::to_string(e.weight) + ',' +
                   std::to_string(e.count) + '\n';
        std::cout << out;
    }
    return 0;
}

struct EstimateFlags {
    int n = 0;
    int k = 0;
    std::optional<uint64_t> q;
    std::string method = "main";
    std::string k1_mode = "auto";
};

uint64_t require_q(const EstimateFlags& f) {
    if (!f.q)
        throw cicount::RangeError("method '" + f.method + "' requires --q");
    return *f.q;
}

void require_no_q(const EstimateFlags& f) {
    if (f.q)
        throw cicount::RangeError("method '" + f.method +
                                  "' estimates the total count and takes no --q");
}

void require_k1(const EstimateFlags& f) {
    if (f.k != 1)
        throw cicount::RangeError("method '" + f.method +
                                  "' is specific to k = 1");
}

int run_estimate(const EstimateFlags& f) {
    ordered_json j{{"n", f.n}, {"k", f.k}};
    j["q"] = f.q ? ordered_json(*f.q) : ordered_json(nullptr);
    j["method"] = f.method;

    // Degenerate weight slices hold exactly one function; report that exact
    // count instead of failing on the singular formula.
    if (f.method == "main") {
        uint64_t q = require_q(f);
        cicount::AsymptoticParams p = cicount::params(f.n, f.k, q);
        if (q == 0 || q == (1ull << (f.n - f.k))) {
            j["log2_estimate"] = 0.0;
            j["exact"] = true;
            j["exact_count"] = 1;
            j["valid"] = true;
            j["eta"] = nullptr;
            j["in_kbounds"] = p.in_kbounds;
            j["in_krange"] = p.in_krange;
            j["notes"] = ordered_json::array(
                {"lambda is " + std::string(q == 0 ? "0" : "1") +
                 ": the slice holds exactly one function, reported exactly"});
            emit(j);
            return 0;
        }
        cicount::Log2Estimate e = cicount::estimate_main(p);
        j["log2_estimate"] = static_cast<double>(e.log2_value);
        j["valid"] = e.valid;
        j["eta"] = std::isinf(p.eta) ? ordered_json(nullptr)
                                     : ordered_json(static_cast<double>(p.eta));
        j["in_kbounds"] = p.in_kbounds;
        j["in_krange"] = p.in_krange;
        j["notes"] = e.notes;
        emit(j);
        return 0;
    }

    cicount::Log2Estimate e;
    if (f.method == "resilient") {
        require_no_q(f);
        e = cicount::estimate_resilient(f.n, f.k);
    } else if (f.method == "nk") {
        require_no_q(f);
        e = cicount::estimate_nk(f.n, f.k);
        j["expression"] = cicount::kNkSumExpression;
    } else if (f.method == "denisov") {
        require_no_q(f);
        e = cicount::estimate_denisov(f.n, f.k);
        j["expression"] = cicount::kDenisovExpression;
    } else if (f.method == "k1") {
        require_k1(f);
        uint64_t q = require_q(f);
        cicount::K1Mode mode;
        if (f.k1_mode == "exact")
            mode = cicount::K1Mode::exact;
        else if (f.k1_mode == "logspace")
            mode = cicount::K1Mode::logspace;
        else
            mode = f.n <= 16 ? cicount::K1Mode::exact : cicount::K1Mode::logspace;
        e = cicount::estimate_k1_exact_form(f.n, q, mode);
    } else { // smallq
        require_k1(f);
        e = cicount::estimate_small_q(f.n, require_q(f));
    }
    j["log2_estimate"] = static_cast<double>(e.log2_value);
    j["valid"] = e.valid;
    j["eta"] = nullptr;       // eta is defined per weight slice
    j["in_kbounds"] = nullptr; // likewise
    j["in_krange"] = cicount::detail::krange_flag(f.n, f.k);
    j["notes"] = e.notes;
    emit(j);
    return 0;
}

int run_compare(const CensusFlags& f) {
    cicount::CensusTable table = cicount::census(f.n, f.k, f.budget());
    uint64_t max_q = 1ull << (f.n - f.k);

    struct Row {
        uint64_t q;
        uint64_t exact;
        long double log2_exact;
        long double log2_estimate;
        long double ratio;
        long double eta;
    };
    std::vector<Row> rows;
    for (uint64_t q = 0; q <= max_q; ++q) {
        Row r;
        r.q = q;
        r.exact = table.count(q);
        cicount::AsymptoticParams p = cicount::params(f.n, f.k, q);
        r.eta = p.eta;
        if (q == 0 || q == max_q) {
            r.log2_estimate = 0.0L; // exact short-circuit: the count is 1
        } else {
            r.log2_estimate = cicount::estimate_main(p).log2_value;
        }
        r.log2_exact = r.exact == 0
                           ? -INFINITY
                           : std::log2(static_cast<long double>(r.exact));
        r.ratio = std::exp2(r.log2_exact - r.log2_estimate);
        rows.push_back(r);
    }

    if (f.format == "json") {
        ordered_json out = ordered_json::array();
        for (const Row& r : rows) {
            ordered_json j{{"q", r.q}, {"exact_count", r.exact}};
            j["log2_exact"] = std::isinf(r.log2_exact)
                                  ? ordered_json(nullptr)
                                  : ordered_json(static_cast<double>(r.log2_exact));
            j["log2_estimate"] = static_cast<double>(r.log2_estimate);
            j["ratio"] = static_cast<double>(r.ratio);
            j["eta"] = std::isinf(r.eta)
                           ? ordered_json(nullptr)
                           : ordered_json(static_cast<double>(r.eta));
            out.push_back(j);
        }
        emit(ordered_json{{"n", f.n}, {"k", f.k}, {"rows", out}});
    } else {
        std::string out = "q,exact_count,log2_exact,log2_estimate,ratio,eta\n";
        for (const Row& r : rows)
            out += std::to_string(r.q) + ',' + std::to_string(r.exact) + ',' +
                   fmt_g12(r.log2_exact) + ',' + fmt_g12(r.log2_estimate) +
                   ',' + fmt_g12(r.ratio) + ',' + fmt_g12(r.eta) + '\n';
        std::cout << out;
    }
    return 0;
}

int run_oa_check(const std::string& path, int k) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cicount::RangeError("cannot open file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    cicount::OaText oa;
    cicount::BooleanFunction f(1);
    try {
        oa = cicount::parse_oa_text(buffer.str());
        f = cicount::from_orthogonal_array(oa.n, oa.rows);
    } catch (const cicount::DuplicateRow& e) {
        print_error(e.kind(), e.what());
        return 1; // malformed array content is a failed check, not bad usage
    } catch (const cicount::ShapeError& e) {
        print_error(e.kind(), e.what());
        return 1;
    }
    if (k < 1 || k > oa.n)
        throw cicount::RangeError("strength k must satisfy 1 <= k <= " +
                                  std::to_string(oa.n));
    cicount::CiProfile p = cicount::ci_order(f);
    bool pass = p.ci_order >= k;
    ordered_json j{{"file", path},
                   {"n", oa.n},
                   {"rows", oa.rows.size()},
                   {"required_strength", k},
                   {"achieved_strength", p.ci_order},
                   {"index_q", pass ? ordered_json(p.weight >> k)
                                    : ordered_json(nullptr)},
                   {"resilient_order", p.resilient_order},
                   {"pass", pass}};
    emit(j);
    return pass ? 0 : 1;
}

int run_oa_export(int n, const std::string& table_text) {
    cicount::BooleanFunction f =
        cicount::BooleanFunction::from_truth_table_text(n, table_text);
    std::cout << cicount::format_oa(f);
    return 0;
}

int run_verify_lemma2(int n, int k) {
    uint64_t max_q = 1ull << (n - k);
    bool pass = true;
    ordered_json slices = ordered_json::array();
    for (uint64_t q = 0; q <= max_q; ++q) {
        uint64_t from_census = cicount::count_single(n, k, q).count;
        uint64_t from_generating_function = cicount::constant_term_count(n, k, q);
        bool match = from_census == from_generating_function;
        pass = pass && match;
        slices.push_back(ordered_json{{"q", q},
                                      {"census", from_census},
                                      {"constant_term", from_generating_function},
                                      {"match", match}});
    }
    emit(ordered_json{
        {"check", "lemma2"}, {"n", n}, {"k", k}, {"pass", pass}, {"slices", slices}});
    return pass ? 0 : 1;
}

int run_verify_lemma3(int n, int k) {
    cicount::LatticeCount lc = cicount::lattice_count(n, k);
    bool pass = lc.count == lc.expected;
    emit(ordered_json{{"check", "lemma3"},
                      {"n", n},
                      {"k", k},
                      {"pass", pass},
                      {"count", lc.count.get_str()},
                      {"expected", lc.expected.get_str()},
                      {"grid_checked", lc.grid_checked},
                      {"leaf_checked", lc.leaf_checked}});
    return pass ? 0 : 1;
}

int run_hadamard_count(int order, bool allow_long) {
    uint64_t count = cicount::count_hadamard(order, allow_long);
    emit(ordered_json{{"order", order}, {"count", count}});
    return 0;
}

int run_hadamard_identity(int order) {
    cicount::HadamardIdentityReport r = cicount::verify_identity(order);
    emit(ordered_json{{"check", "hadamard_identity"},
                      {"order", r.order},
                      {"matrix_count", r.lhs},
                      {"census_value", r.census_value},
                      {"formula_value", r.rhs},
                      {"pass", r.equal}});
    return r.equal ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact counting and asymptotic estimation of "
                 "correlation-immune boolean functions"};
    app.require_subcommand(1);
    int rc = 0;

    // analyze
    auto* analyze = app.add_subcommand(
        "analyze", "weight, Walsh spectrum, and immunity orders of one function");
    int analyze_n = 0;
    std::string analyze_table;
    analyze->add_option("--n", analyze_n, "number of variables")->required();
    analyze
        ->add_option("--truth-table", analyze_table,
                     "truth table, 2^n bits or 2^n/4 hex digits, index 0 first")
        ->required();
    analyze->callback([&] { rc = run_analyze(analyze_n, analyze_table); });

    // count
    auto* count =
        app.add_subcommand("count", "exact census of one (n, k), or one slice");
    CensusFlags count_flags;
    std::optional<uint64_t> count_q;
    add_census_flags(count, count_flags);
    count->add_option("--q", count_q, "restrict to the slice of weight 2^k q");
    count->callback([&] { rc = run_count(count_flags, count_q); });

    // estimate
    auto* estimate =
        app.add_subcommand("estimate", "closed-form log2 estimate of a count");
    EstimateFlags est;
    estimate->add_option("--n", est.n, "number of variables")->required();
    estimate->add_option("--k", est.k, "immunity order")->required();
    estimate->add_option("--q", est.q, "weight index (weight = 2^k q)");
    estimate
        ->add_option("--method", est.method,
                     "denisov|main|resilient|nk|k1|smallq (default main)")
        ->check(CLI::IsMember({"denisov", "main", "resilient", "nk", "k1",
                               "smallq"}));
    estimate
        ->add_option("--mode", est.k1_mode,
                     "k1 evaluation mode: exact|logspace (default: exact up "
                     "to n=16, logspace beyond)")
        ->check(CLI::IsMember({"auto", "exact", "logspace"}));
    estimate->callback([&] { rc = run_estimate(est); });

    // compare
    auto* compare = app.add_subcommand(
        "compare", "exact census vs central estimate, one row per slice");
    CensusFlags compare_flags;
    add_census_flags(compare, compare_flags);
    compare->callback([&] { rc = run_compare(compare_flags); });

    // oa check / oa export
    auto* oa = app.add_subcommand("oa", "orthogonal-array views of functions");
    oa->require_subcommand(1);
    auto* oa_check =
        oa->add_subcommand("check", "validate strength of an array file");
    std::string oa_file;
    int oa_k = 0;
    oa_check->add_option("file", oa_file, "array text: one 0/1 row per line")
        ->required()
        ->check(CLI::ExistingFile);
    oa_check->add_option("--k", oa_k, "required strength")->required();
    oa_check->callback([&] { rc = run_oa_check(oa_file, oa_k); });

    auto* oa_export =
        oa->add_subcommand("export", "emit the support rows of a function");
    int oa_n = 0;
    std::string oa_table;
    oa_export->add_option("--n", oa_n, "number of variables")->required();
    oa_export
        ->add_option("--truth-table", oa_table,
                     "truth table, 2^n bits or 2^n/4 hex digits, index 0 first")
        ->required();
    oa_export->callback([&] { rc = run_oa_export(oa_n, oa_table); });

    // verify lemma2 / lemma3
    auto* verify =
        app.add_subcommand("verify", "independent oracles for the exact counts");
    verify->require_subcommand(1);
    auto* lemma2 = verify->add_subcommand(
        "lemma2", "census vs generating-function constant term (n <= 3)");
    int l2_n = 0, l2_k = 0;
    lemma2->add_option("--n", l2_n, "number of variables")->required();
    lemma2->add_option("--k", l2_k, "immunity order")->required();
    lemma2->callback([&] { rc = run_verify_lemma2(l2_n, l2_k); });

    auto* lemma3 = verify->add_subcommand(
        "lemma3", "critical-lattice cardinality vs 2^Q (n <= 8)");
    int l3_n = 0, l3_k = 0;
    lemma3->add_option("--n", l3_n, "number of variables")->required();
    lemma3->add_option("--k", l3_k, "immunity order")->required();
    lemma3->callback([&] { rc = run_verify_lemma3(l3_n, l3_k); });

    // hadamard count / identity
    auto* hadamard =
        app.add_subcommand("hadamard", "sign matrices with orthogonal columns");
    hadamard->require_subcommand(1);
    auto* h_count =
        hadamard->add_subcommand("count", "count all matrices of one order");
    int h_order = 0;
    bool h_allow_long = false;
    h_count->add_option("--order", h_order, "matrix order (1..8)")->required();
    h_count->add_flag("--allow-long", h_allow_long,
                      "permit the long-running search for orders 5..8");
    h_count->callback([&] { rc = run_hadamard_count(h_order, h_allow_long); });

    auto* h_identity = hadamard->add_subcommand(
        "identity", "check the matrix count against the census identity");
    int hi_order = 0;
    h_identity->add_option("--order", hi_order, "matrix order (multiple of 4)")
        ->required();
    h_identity->callback([&] { rc = run_hadamard_identity(hi_order); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    } catch (const cicount::Error& e) {
        print_error(e.kind(), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 2;
    }
    return rc;
}
