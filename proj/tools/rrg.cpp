// rrg: batch front-end for the word, graph, limit-process and validation
// machinery. Every command writes <out>/<command>_report.json and prints an
// aligned text report (or the JSON with --json). Exit codes: 0 all gates pass,
// 2 statistical gate failure, 3 exact identity failure, 4 work budget
// exceeded, 64 usage error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrg/errors.hpp"
#include "rrg/graph.hpp"
#include "rrg/limitproc.hpp"
#include "rrg/parallel.hpp"
#include "rrg/random.hpp"
#include "rrg/report.hpp"
#include "rrg/spectral.hpp"
#include "rrg/stats.hpp"
#include "rrg/words.hpp"

namespace fs = std::filesystem;
using namespace rrg;

namespace {

// Chi-square gates use the two-sided 3-sigma tail probability.
constexpr double kGateP = 0.0027;

struct Common {
    unsigned threads = 0;
    std::uint64_t seed = 1;
    std::string out = ".";
    bool json = false;
};

std::ofstream open_output(const Common& c, const std::string& name) {
    fs::create_directories(c.out);
    const fs::path path = fs::path(c.out) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return f;
}

int finish(const Report& rep, const Common& c) {
    auto f = open_output(c, rep.command + "_report.json");
    f << rep.to_json().dump(2) << '\n';
    if (c.json) {
        std::cout << rep.to_json().dump(2) << '\n';
    } else {
        rep.write_text(std::cout);
    }
    return exit_code(rep);
}

bool wants(const std::vector<std::string>& emit, const std::string& what) {
    return std::find(emit.begin(), emit.end(), what) != emit.end();
}

// ---- words -----------------------------------------------------------------

struct WordsArgs {
    int d = 2;
    int k = 3;
    bool identities = false;
    std::vector<std::string> emit;
};

int run_words(const WordsArgs& a, const Common& c) {
    Report rep;
    rep.command = "words";
    rep.seed = c.seed;
    rep.config = {{"d", a.d}, {"k", a.k}, {"identities", a.identities}};

    const auto classes = enumerate_classes(a.d, a.k);
    std::size_t width = 5;
    for (const auto& w : classes) {
        width = std::max(width, w.str().size());
    }
    Rational mu_sum = 0;
    auto rows = nlohmann::json::array();
    std::ostringstream table;
    table << std::left << std::setw(static_cast<int>(width)) << "class" << std::right << std::setw(4) << "h"
          << std::setw(4) << "c" << std::setw(8) << "mu" << std::setw(7) << "orbit" << '\n';
    for (const auto& w : classes) {
        const Rational mu = mu_weight(w);
        mu_sum += mu;
        table << std::left << std::setw(static_cast<int>(width)) << w.str() << std::right << std::setw(4) << w.h()
              << std::setw(4) << w.c() << std::setw(8) << mu.str() << std::setw(7) << w.orbit_size() << '\n';
        rows.push_back({{"class", w.str()}, {"h", w.h()}, {"c", w.c()}, {"mu", mu.str()}, {"orbit", w.orbit_size()}});
    }
    table << classes.size() << " classes, mu sum " << mu_sum.str() << '\n';
    rep.extra["classes"] = rows;
    rep.extra["mu_sum"] = mu_sum.str();

    if (wants(a.emit, "csv")) {
        auto f = open_output(c, "words.csv");
        f << "class,h,c,mu,orbit" << kCsvEol;
        for (const auto& w : classes) {
            f << csv_field(w.str()) << ',' << w.h() << ',' << w.c() << ',' << mu_weight(w).str() << ','
              << w.orbit_size() << kCsvEol;
        }
    }
    if (a.identities) {
        for (const auto& chk : verify_word_identities(a.d, a.k).checks) {
            GateResult g;
            g.statistic = chk.name + " k=" + std::to_string(chk.k);
            g.score_name = "exact";
            g.passed = chk.passed;
            g.kind = GateKind::Exact;
            rep.gates.push_back(g);
            if (!chk.passed) {
                std::cerr << "identity failure: " << g.statistic << ": " << chk.detail << '\n';
            }
        }
    }
    if (!c.json) {
        std::cout << table.str();
    }
    return finish(rep, c);
}

// ---- grow ------------------------------------------------------------------

struct GrowArgs {
    int d = 2;
    double t_end = 7.0;
    int K = 4;
    std::int64_t replicas = 1;
    std::vector<std::string> emit;
    std::string resume;
    std::string check = "none";
};

int run_grow(const GrowArgs& a, const Common& c) {
    GraphState start(a.d);
    double t0 = 0.0;
    if (!a.resume.empty()) {
        std::ifstream f(a.resume);
        if (!f) {
            throw std::invalid_argument("cannot read snapshot " + a.resume);
        }
        const auto doc = nlohmann::json::parse(f);
        start = graph_from_json(doc);
        t0 = doc.value("t", 0.0);
        if (start.d() != a.d) {
            throw std::invalid_argument("snapshot d does not match -d");
        }
    }
    if (a.t_end < t0) {
        throw std::invalid_argument("--t-end is before the snapshot time");
    }
    if (a.check != "none" && a.replicas < 2) {
        throw std::invalid_argument("--check needs at least two replicas");
    }
    if (a.check == "means" && !a.resume.empty()) {
        throw std::invalid_argument("--check means needs a run from the empty graph");
    }
    const bool paths = wants(a.emit, "paths");

    struct Result {
        LengthCounts counts;
        std::vector<CyclePathRow> rows;
        std::optional<GraphState> state;
    };
    const auto results = parallel_map<Result>(static_cast<std::size_t>(a.replicas), c.threads, [&](std::size_t r) {
        Rng rng = make_stream(c.seed, r);
        GraphState g = start;
        Clock clock{t0, g.size(), std::nullopt};
        Result out;
        if (paths) {
            out.rows = grow_with_path(clock, g, a.t_end, a.K, rng);
        } else {
            advance(clock, g, a.t_end, rng);
        }
        out.counts = count_cycles_by_length(g, a.K);
        if (r == 0) {
            out.state = std::move(g);
        }
        return out;
    });

    Report rep;
    rep.command = "grow";
    rep.seed = c.seed;
    rep.config = {{"d", a.d},           {"t_end", a.t_end},  {"K", a.K},
                  {"replicas", a.replicas}, {"resume", a.resume}, {"t_start", t0}};
    // "means" gates against the exact finite-time mean, "limit" against a(d,k)/2k.
    std::vector<double> exact;
    if (a.check == "means") {
        exact = poissonized_cycle_means(a.d, a.K, a.t_end);
    }
    auto means = nlohmann::json::array();
    for (int k = 1; a.replicas >= 2 && k <= a.K; ++k) {
        std::vector<double> x;
        for (const auto& res : results) {
            x.push_back(static_cast<double>(res.counts[static_cast<std::size_t>(k)]));
        }
        const MomentEstimate m = sample_mean(x);
        const double limit = static_cast<double>(a_count(a.d, k)) / (2.0 * k);
        means.push_back({{"k", k}, {"mean", m.mean}, {"stderr", m.stderr_}, {"limit", limit}});
        if (a.check == "means") {
            means.back()["exact"] = exact[static_cast<std::size_t>(k)];
            rep.gates.push_back(z_gate("E C_" + std::to_string(k) + "(t_end)", exact[static_cast<std::size_t>(k)], m));
        } else if (a.check == "limit") {
            rep.gates.push_back(z_gate("E C_" + std::to_string(k) + "(t_end) vs limit", limit, m));
        }
    }
    rep.extra["terminal_means"] = means;
    rep.extra["vertices_replica0"] = results.front().state->size();

    if (paths) {
        auto f = open_output(c, "grow_path.csv");
        if (results.size() == 1) {
            write_cycle_path_csv(f, results.front().rows);
        } else {
            f << "replica,t,k,count" << kCsvEol;
            for (std::size_t r = 0; r < results.size(); ++r) {
                for (const auto& row : results[r].rows) {
                    f << r << ',' << format_double(row.t) << ',' << row.k << ',' << row.count << kCsvEol;
                }
            }
        }
    }
    if (wants(a.emit, "snapshot")) {
        auto doc = to_json(*results.front().state);
        doc["t"] = a.t_end;
        auto f = open_output(c, "grow_snapshot.json");
        f << doc.dump() << '\n';
    }
    if (wants(a.emit, "spectrum")) {
        auto f = open_output(c, "grow_spectrum.csv");
        write_trace_table_csv(f, *results.front().state, a.K);
    }
    return finish(rep, c);
}

// ---- limit -----------------------------------------------------------------

struct LimitArgs {
    int d = 2;
    int L = 12;
    double T = 2.0;
    std::optional<int> resolve;
    std::int64_t replicas = 100000;
    std::string check = "none";
    std::vector<std::string> emit;
    int grid = 11;
    std::int64_t path_replicas = 10;
};

int run_limit(const LimitArgs& a, const Common& c) {
    const int R = a.resolve.value_or(std::min(a.L, 3));
    if (R > a.L) {
        throw std::invalid_argument("--resolve cannot exceed -L");
    }
    if (a.grid < 2) {
        throw std::invalid_argument("--grid needs at least two points");
    }
    const LimitProcess proc(a.d, a.L, R);
    const WordTable& table = proc.table();
    std::vector<double> times;
    for (int i = 0; i < a.grid; ++i) {
        times.push_back(a.T * i / (a.grid - 1));
    }
    const bool paths = wants(a.emit, "paths");

    struct Result {
        std::vector<std::int64_t> start;
        std::vector<std::int64_t> end;
        std::vector<std::vector<std::int64_t>> grid;
    };
    const auto results = parallel_map<Result>(static_cast<std::size_t>(a.replicas), c.threads, [&](std::size_t r) {
        Rng rng = make_stream(c.seed, r);
        const CyclePath path = proc.simulate(a.T, rng);
        Result out{path.counts_at(table, 0.0), path.counts_at(table, a.T), {}};
        if (paths && static_cast<std::int64_t>(r) < a.path_replicas) {
            for (double t : times) {
                out.grid.push_back(path.aggregate_k(table, t));
            }
        }
        return out;
    });

    Report rep;
    rep.command = "limit";
    rep.seed = c.seed;
    rep.config = {{"d", a.d}, {"L", a.L}, {"T", a.T}, {"resolve", R}, {"replicas", a.replicas}, {"check", a.check}};
    auto means = nlohmann::json::array();
    for (int k = 1; k <= R; ++k) {
        const auto [lo, hi] = table.length_range(k);
        std::vector<double> x;
        for (const auto& res : results) {
            std::int64_t total = 0;
            for (std::size_t w = lo; w < hi; ++w) {
                total += res.end[w];
            }
            x.push_back(static_cast<double>(total));
        }
        const MomentEstimate m = sample_mean(x);
        means.push_back({{"k", k},
                         {"mean_T", m.mean},
                         {"stderr", m.stderr_},
                         {"stationary", static_cast<double>(a_count(a.d, k)) / (2.0 * k)}});
    }
    rep.extra["aggregate_means"] = means;

    if (a.check == "stationarity") {
        for (const auto& [label, pick] : {std::pair{std::string("0"), &Result::start}, std::pair{format_double(a.T), &Result::end}}) {
            for (std::size_t w = 0; w < table.size(); ++w) {
                std::vector<std::int64_t> x;
                std::vector<double> xd;
                for (const auto& res : results) {
                    x.push_back((res.*pick)[w]);
                    xd.push_back(static_cast<double>((res.*pick)[w]));
                }
                const double mean = 1.0 / table.word(w).h();
                const MomentEstimate m = sample_mean(xd);
                GateResult g;
                g.statistic = "N_w(" + label + ") ~ Poisson(1/h), w=" + table.word(w).str();
                g.formula = mean;
                g.estimate = m.mean;
                g.stderr_ = m.stderr_;
                g.score = poisson_gof(x, mean).p_value;
                g.score_name = "p";
                g.passed = g.score > kGateP;
                rep.gates.push_back(g);
            }
        }
    }
    if (paths) {
        std::vector<std::vector<std::vector<std::int64_t>>> grids;
        for (const auto& res : results) {
            if (!res.grid.empty()) {
                grids.push_back(res.grid);
            }
        }
        auto f = open_output(c, "limit_paths.csv");
        write_limit_path_csv(f, grids, times);
    }
    return finish(rep, c);
}

// ---- compare / tvscan / oulimit --------------------------------------------

int run_compare(CompareOptions o, const Common& c) {
    o.seed = c.seed;
    o.threads = c.threads;
    return finish(graph_vs_limit(o), c);
}

struct TvArgs {
    int d = 2;
    int r = 2;
    std::vector<int> n{50, 100, 200, 400};
    // The plug-in bias floor must sit well below the n = 400 distance.
    std::int64_t replicas = 1000000;
    int bootstrap = 200;
};

int run_tvscan(const TvArgs& a, const Common& c) {
    if (a.n.empty() || !std::is_sorted(a.n.begin(), a.n.end())) {
        throw std::invalid_argument("--n must be an increasing list");
    }
    const PoissonReference ref = PoissonReference::aggregate(a.d, a.r);
    TvOptions opts;
    opts.bootstrap = a.bootstrap;
    Report rep;
    rep.command = "tvscan";
    rep.seed = c.seed;
    rep.config = {{"d", a.d}, {"r", a.r}, {"n", a.n}, {"replicas", a.replicas}, {"bootstrap", a.bootstrap}};
    auto rows = nlohmann::json::array();
    std::vector<double> estimates;
    auto f = open_output(c, "tvscan.csv");
    f << "n,samples,plugin,stderr,bias_corrected,bound_shape" << kCsvEol;
    for (int n : a.n) {
        const auto samples =
            sample_cycle_counts(a.d, n, a.r, a.replicas, stream_seed(c.seed, static_cast<std::uint64_t>(n)), c.threads);
        Rng rng = make_stream(c.seed ^ 0x7f4a7c15ULL, static_cast<std::uint64_t>(n));
        TvReport tv = empirical_tv(samples, ref, rng, opts);
        tv.d = a.d;
        tv.n = n;
        tv.r = a.r;
        tv.bound_shape = std::pow(2.0 * a.d - 1.0, 2 * a.r - 1) / n;
        estimates.push_back(tv.bias_corrected);
        rows.push_back({{"n", n},
                        {"plugin", tv.estimate},
                        {"stderr", tv.stderr_},
                        {"bias_corrected", tv.bias_corrected},
                        {"bound_shape", tv.bound_shape}});
        f << n << ',' << tv.samples << ',' << format_double(tv.estimate) << ',' << format_double(tv.stderr_) << ','
          << format_double(tv.bias_corrected) << ',' << format_double(tv.bound_shape) << kCsvEol;
    }
    rep.extra["tv"] = rows;
    int violations = 0;
    for (std::size_t i = 1; i < estimates.size(); ++i) {
        violations += estimates[i] < estimates[i - 1] ? 0 : 1;
    }
    GateResult g;
    g.statistic = "bias-corrected TV strictly decreasing in n";
    g.estimate = estimates.back() / estimates.front();
    g.score = violations;
    g.score_name = "violations";
    g.passed = violations == 0;
    rep.gates.push_back(g);
    return finish(rep, c);
}

int run_oulimit(OuScanOptions o, const Common& c) {
    o.seed = c.seed;
    o.threads = c.threads;
    const Report rep = ou_limit_scan(o);
    auto f = open_output(c, "oulimit_prelimit.csv");
    f << "d,i,k,prelimit,limit" << kCsvEol;
    for (const auto& row : rep.extra["prelimit_table"]) {
        f << row["d"].get<int>() << ',' << row["i"].get<int>() << ',' << row["k"].get<int>() << ','
          << format_double(row["prelimit"].get<double>()) << ',' << format_double(row["limit"].get<double>())
          << kCsvEol;
    }
    return finish(rep, c);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random regular graph cycle processes: simulation and validation"};
    app.set_version_flag("--version", version_string());
    app.set_config("--config", "", "TOML config file; command-line flags override it");
    app.require_subcommand(1);

    Common common;
    app.add_option("--threads", common.threads, "Worker threads (0 = all cores)")->envname("RRG_THREADS");
    app.add_option("--seed", common.seed, "Master seed");
    app.add_option("--out", common.out, "Output directory")->envname("RRG_OUTPUT_DIR");
    app.add_flag("--json", common.json, "Print the JSON report instead of text");
    app.fallthrough();

    std::function<int()> run;
    const auto length = CLI::Range(1, 64);
    const auto degree = CLI::Range(1, 120);
    const auto positive = CLI::PositiveNumber;

    WordsArgs words;
    auto* w = app.add_subcommand("words", "Enumerate word classes of length k with h, c and mu");
    w->add_option("-d", words.d, "Number of permutations")->check(degree);
    w->add_option("-k", words.k, "Word length")->check(length);
    w->add_flag("--identities", words.identities, "Check the exact word identities for lengths 1..k");
    w->add_option("--emit", words.emit, "Extra outputs")->check(CLI::IsMember({"csv"}))->delimiter(',');
    w->callback([&] { run = [&] { return run_words(words, common); }; });

    GrowArgs grow;
    auto* g = app.add_subcommand("grow", "Grow the Poissonized graph process and track C_1..C_K");
    g->add_option("-d", grow.d, "Number of permutations")->check(degree);
    g->add_option("-T,--t-end", grow.t_end, "End time")->check(CLI::NonNegativeNumber);
    g->add_option("-K", grow.K, "Longest tracked cycle")->check(length);
    g->add_option("--replicas", grow.replicas, "Independent runs")->check(positive);
    g->add_option("--emit", grow.emit, "paths, snapshot, spectrum")
        ->check(CLI::IsMember({"paths", "snapshot", "spectrum"}))
        ->delimiter(',');
    g->add_option("--resume", grow.resume, "Continue from a snapshot file")->check(CLI::ExistingFile);
    g->add_option("--check", grow.check, "none, means (exact finite-time mean) or limit (a(d,k)/2k)")
        ->check(CLI::IsMember({"none", "means", "limit"}));
    g->callback([&] { run = [&] { return run_grow(grow, common); }; });

    LimitArgs limit;
    auto* l = app.add_subcommand("limit", "Simulate the limiting cycle process");
    l->add_option("-d", limit.d, "Number of permutations")->check(degree);
    l->add_option("-L", limit.L, "Truncation length")->check(CLI::Range(0, 64));
    l->add_option("-T", limit.T, "Horizon")->check(CLI::NonNegativeNumber);
    l->add_option("--resolve", limit.resolve, "Longest simulated length (default min(L, 3))")->check(length);
    l->add_option("--replicas", limit.replicas, "Independent runs")->check(positive);
    l->add_option("--check", limit.check, "none or stationarity")
        ->check(CLI::IsMember({"none", "stationarity"}));
    l->add_option("--emit", limit.emit, "paths")->check(CLI::IsMember({"paths"}))->delimiter(',');
    l->add_option("--grid", limit.grid, "Time points in the path export")->check(CLI::Range(2, 100000));
    l->add_option("--path-replicas", limit.path_replicas, "Replicas written to the path export")
        ->check(CLI::NonNegativeNumber);
    l->callback([&] { run = [&] { return run_limit(limit, common); }; });

    CompareOptions compare;
    bool no_cov = false;
    auto* cmp = app.add_subcommand("compare", "Compare graph cycle moments with the limit process");
    cmp->add_option("-d", compare.d, "Number of permutations")->check(degree);
    cmp->add_option("-K", compare.K, "Longest cycle length")->check(length);
    cmp->add_option("-s", compare.s, "Comparison time")->check(CLI::NonNegativeNumber);
    cmp->add_option("--replicas", compare.replicas, "Independent runs")->check(CLI::Range(2, 1 << 30));
    cmp->add_option("--delta", compare.deltas, "Time lags for covariances")->delimiter(',');
    cmp->add_flag("--no-cov", no_cov, "Means only");
    cmp->callback([&] {
        run = [&] {
            compare.covariances = !no_cov;
            return run_compare(compare, common);
        };
    });

    TvArgs tv;
    auto* tvc = app.add_subcommand("tvscan", "Total variation to the Poisson reference across n");
    tvc->add_option("-d", tv.d, "Number of permutations")->check(degree);
    tvc->add_option("-r", tv.r, "Longest cycle length")->check(length);
    tvc->add_option("--n", tv.n, "Graph sizes, increasing")->delimiter(',')->check(positive);
    tvc->add_option("--replicas", tv.replicas, "Samples per n")->check(positive);
    tvc->add_option("--bootstrap", tv.bootstrap, "Bootstrap resamples")->check(CLI::Range(2, 100000));
    tvc->callback([&] { run = [&] { return run_tvscan(tv, common); }; });

    OuScanOptions ou;
    auto* ouc = app.add_subcommand("oulimit", "Chebyshev-trace covariances against the large-d limit");
    ouc->add_option("--d-list", ou.d_list, "Degrees for the exact scan")->delimiter(',')->check(degree);
    ouc->add_option("--k-list", ou.k_list, "Trace indices")->delimiter(',')->check(length);
    ouc->add_option("-s", ou.s, "Earlier time");
    ouc->add_option("-t", ou.t, "Later time");
    ouc->add_option("--replicas", ou.replicas, "Monte Carlo runs")->check(CLI::Range(2, 1 << 30));
    ouc->add_option("--mc-d", ou.monte_carlo_d, "Degrees checked by simulation")->delimiter(',')->check(degree);
    ouc->callback([&] { run = [&] { return run_oulimit(ou, common); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    try {
        return run();
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid snapshot: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
