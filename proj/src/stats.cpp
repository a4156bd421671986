#include "rrg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "rrg/errors.hpp"
#include "rrg/moments.hpp"
#include "rrg/parallel.hpp"

namespace rrg {

namespace {

double chi_square_sf(double statistic, int dof) {
    if (dof < 1) {
        return 1.0;
    }
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

}  // namespace

ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> probs) {
    if (observed.size() != probs.size() || observed.empty()) {
        throw std::invalid_argument("observed counts and probabilities must have the same nonzero length");
    }
    const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
    const double mass = std::accumulate(probs.begin(), probs.end(), 0.0);
    std::vector<double> obs_pool;
    std::vector<double> exp_pool;
    double o = 0.0;
    double e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o += static_cast<double>(observed[i]);
        e += total * probs[i];
        if (i + 1 == observed.size()) {
            e += total * std::max(0.0, 1.0 - mass);
        }
        if (e >= 5.0) {
            obs_pool.push_back(o);
            exp_pool.push_back(e);
            o = 0.0;
            e = 0.0;
        }
    }
    if (e > 0.0 || o > 0.0) {
        if (exp_pool.empty()) {
            obs_pool.push_back(o);
            exp_pool.push_back(e);
        } else {
            obs_pool.back() += o;
            exp_pool.back() += e;
        }
    }
    ChiSquareResult r;
    r.cells = static_cast<int>(obs_pool.size());
    for (std::size_t i = 0; i < obs_pool.size(); ++i) {
        if (exp_pool[i] > 0.0) {
            r.statistic += (obs_pool[i] - exp_pool[i]) * (obs_pool[i] - exp_pool[i]) / exp_pool[i];
        }
    }
    r.dof = r.cells - 1;
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

ChiSquareResult poisson_gof(std::span<const std::int64_t> samples, double mean) {
    if (samples.empty()) {
        throw std::invalid_argument("no samples");
    }
    const std::int64_t top = *std::max_element(samples.begin(), samples.end());
    if (top < 0) {
        throw std::invalid_argument("negative count");
    }
    std::vector<std::int64_t> observed(static_cast<std::size_t>(top) + 1, 0);
    for (auto x : samples) {
        if (x < 0) {
            throw std::invalid_argument("negative count");
        }
        ++observed[static_cast<std::size_t>(x)];
    }
    std::vector<double> probs(observed.size(), 0.0);
    const boost::math::poisson_distribution<double> law(mean);
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        probs[i] = boost::math::pdf(law, static_cast<double>(i));
    }
    // The last cell carries the whole upper tail.
    probs.back() = top == 0 ? 1.0 : boost::math::cdf(boost::math::complement(law, static_cast<double>(top - 1)));
    return chi_square_gof(observed, probs);
}

ChiSquareResult chi_square_homogeneity(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("samples must share the same nonempty cell set");
    }
    const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::int64_t{0}));
    const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::int64_t{0}));
    const double n = na + nb;
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("both samples must be nonempty");
    }
    std::vector<std::pair<double, double>> pools;
    double pa = 0.0;
    double pb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa += static_cast<double>(a[i]);
        pb += static_cast<double>(b[i]);
        if ((pa + pb) * std::min(na, nb) / n >= 5.0) {
            pools.emplace_back(pa, pb);
            pa = 0.0;
            pb = 0.0;
        }
    }
    if (pa + pb > 0.0) {
        if (pools.empty()) {
            pools.emplace_back(pa, pb);
        } else {
            pools.back().first += pa;
            pools.back().second += pb;
        }
    }
    ChiSquareResult r;
    r.cells = static_cast<int>(pools.size());
    for (const auto& [x, y] : pools) {
        const double ea = (x + y) * na / n;
        const double eb = (x + y) * nb / n;
        r.statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    r.dof = r.cells - 1;
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

double JointLaw::probability(const std::vector<int>& key) const {
    auto it = weight.find(key);
    return it == weight.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

namespace {

std::vector<PermTower> all_permutations(int n) {
    std::vector<Vertex> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), Vertex{0});
    std::vector<PermTower> out;
    do {
        out.push_back(PermTower::from_successors(p));
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// Calls fn(state) for each of the (n!)^d tuples.
template <typename Fn>
void for_each_tuple(int n, int d, const OracleLimits& limits, Fn fn) {
    if (n < 0 || d < 1) {
        throw std::invalid_argument("oracle needs n >= 0 and d >= 1");
    }
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) {
        fact *= i;
    }
    if (std::pow(fact, d) > limits.max_tuples) {
        throw BudgetExceeded("(n!)^d exceeds the oracle enumeration budget");
    }
    const auto perms = all_permutations(n);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
        std::vector<PermTower> towers;
        towers.reserve(idx.size());
        for (auto i : idx) {
            towers.push_back(perms[i]);
        }
        fn(GraphState(std::move(towers)));
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == perms.size()) {
            idx[pos] = 0;
            ++pos;
        }
        if (pos == idx.size()) {
            return;
        }
    }
}

Rational falling(int n, int k) {
    Rational r = 1;
    for (int i = 0; i < k; ++i) {
        r *= (n - i);
    }
    return r;
}

}  // namespace

JointLaw exact_cycle_distribution(int n, int d, int r, const OracleLimits& limits) {
    if (r < 0) {
        throw std::invalid_argument("r must be nonnegative");
    }
    JointLaw law;
    for_each_tuple(n, d, limits, [&](const GraphState& g) {
        const auto counts = count_cycles_by_length(g, r);
        std::vector<int> key(counts.begin(), counts.end());
        ++law.weight[key];
        ++law.total;
    });
    return law;
}

std::map<WordClass, Rational> exact_word_means(int n, int d, int K, const OracleLimits& limits) {
    std::map<WordClass, std::int64_t> sums;
    std::int64_t total = 0;
    for_each_tuple(n, d, limits, [&](const GraphState& g) {
        for (const auto& [w, c] : count_cycles(g, K)) {
            sums[w] += c;
        }
        ++total;
    });
    std::map<WordClass, Rational> out;
    for (const auto& [w, s] : sums) {
        out[w] = Rational(s) / total;
    }
    return out;
}

Rational exact_class_mean(int n, int d, const WordClass& w) {
    const int k = w.length();
    if (k > n) {
        return 0;
    }
    Rational r = falling(n, k) / w.h();
    const auto e = w.letter_counts(d);
    for (std::size_t i = 1; i < e.size(); ++i) {
        r /= falling(n, e[i]);
    }
    return r;
}

Rational labeled_cycle_mean(int n, int k) {
    if (k < 1 || k > n) {
        throw std::invalid_argument("labeled cycle needs 1 <= k <= n");
    }
    return Rational(1) / falling(n, k);
}

std::vector<double> poissonized_cycle_means(int d, int K, double t, double max_terms) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("time must be nonnegative");
    }
    // Classes of one length with the same h and letter counts share a mean.
    struct Group {
        int k;
        std::vector<int> e;
        double weight;  // classes / h
    };
    std::map<std::pair<int, std::vector<int>>, double> grouped;
    for (int k = 1; k <= K; ++k) {
        for (const auto& w : enumerate_classes(d, k)) {
            auto e = w.letter_counts(d);
            e.insert(e.begin(), k);
            grouped[{w.h(), std::move(e)}] += 1.0 / w.h();
        }
    }
    std::vector<Group> groups;
    for (const auto& [key, weight] : grouped) {
        groups.push_back({key.second[0], std::vector<int>(key.second.begin() + 2, key.second.end()), weight});
    }

    std::vector<double> out(static_cast<std::size_t>(K) + 1, 0.0);
    const double stay = -std::expm1(-t);  // 1 - e^-t
    double mass = std::exp(-t);           // P[N_t = m]
    double tail = stay;                   // P[N_t > m]
    for (double m = 0.0; tail > 1e-13; m += 1.0) {
        if (m > max_terms) {
            throw BudgetExceeded("Poissonized mean needs too many graph sizes");
        }
        for (const auto& g : groups) {
            if (g.k > m) {
                continue;
            }
            double ratio = 1.0;
            for (int j = 0; j < g.k; ++j) {
                ratio *= m - j;
            }
            for (int ei : g.e) {
                for (int j = 0; j < ei; ++j) {
                    ratio /= m - j;
                }
            }
            out[static_cast<std::size_t>(g.k)] += mass * g.weight * ratio;
        }
        mass *= stay;
        tail *= stay;
    }
    return out;
}

PoissonReference PoissonReference::aggregate(int d, int r) {
    PoissonReference ref;
    ref.means.assign(static_cast<std::size_t>(r) + 1, 0.0);
    for (int k = 1; k <= r; ++k) {
        ref.means[static_cast<std::size_t>(k)] = static_cast<double>(a_count(d, k)) / (2.0 * k);
    }
    return ref;
}

double PoissonReference::pmf(const std::vector<int>& key) const {
    if (key.size() != means.size()) {
        throw std::invalid_argument("count vector has the wrong length");
    }
    double p = 1.0;
    for (std::size_t k = 1; k < means.size(); ++k) {
        p *= boost::math::pdf(boost::math::poisson_distribution<double>(means[k]), static_cast<double>(key[k]));
    }
    return p;
}

double exact_tv(const JointLaw& law, const PoissonReference& ref) {
    double diff = 0.0;
    double covered = 0.0;
    for (const auto& [key, w] : law.weight) {
        const double p = static_cast<double>(w) / static_cast<double>(law.total);
        const double q = ref.pmf(key);
        diff += std::abs(p - q);
        covered += q;
    }
    return 0.5 * (diff + std::max(0.0, 1.0 - covered));
}

namespace {

double tv_of_cells(std::span<const std::int64_t> counts, double total, std::span<const double> q) {
    double s = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        s += std::abs(static_cast<double>(counts[i]) / total - q[i]);
    }
    return 0.5 * s;
}

}  // namespace

TvReport empirical_tv(std::span<const std::vector<int>> samples, const PoissonReference& ref, Rng& rng,
                      const TvOptions& options) {
    if (static_cast<std::int64_t>(samples.size()) < options.min_samples) {
        throw std::invalid_argument("empirical TV needs at least " + std::to_string(options.min_samples) +
                                    " samples");
    }
    const int r = ref.r();
    const int base = options.max_count + 1;
    std::size_t cells = 1;
    for (int k = 1; k <= r; ++k) {
        cells *= static_cast<std::size_t>(base);
    }
    // Last cell collects everything above the truncation.
    std::vector<double> q(cells + 1, 0.0);
    std::vector<int> key(static_cast<std::size_t>(r) + 1, 0);
    double covered = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rest = c;
        for (int k = 1; k <= r; ++k) {
            key[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::size_t>(base));
            rest /= static_cast<std::size_t>(base);
        }
        q[c] = ref.pmf(key);
        covered += q[c];
    }
    q[cells] = std::max(0.0, 1.0 - covered);

    std::vector<std::int64_t> counts(cells + 1, 0);
    for (const auto& s : samples) {
        if (s.size() != static_cast<std::size_t>(r) + 1) {
            throw std::invalid_argument("sample has the wrong length");
        }
        std::size_t c = 0;
        std::size_t mult = 1;
        bool overflow = false;
        for (int k = 1; k <= r; ++k) {
            const int v = s[static_cast<std::size_t>(k)];
            if (v > options.max_count) {
                overflow = true;
                break;
            }
            c += static_cast<std::size_t>(v) * mult;
            mult *= static_cast<std::size_t>(base);
        }
        ++counts[overflow ? cells : c];
    }
    const double total = static_cast<double>(samples.size());

    TvReport out;
    out.r = r;
    out.samples = static_cast<std::int64_t>(samples.size());
    out.estimate = tv_of_cells(counts, total, q);

    // Multinomial bootstrap by sequential binomial splitting.
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        p[i] = static_cast<double>(counts[i]) / total;
    }
    std::vector<std::int64_t> boot(counts.size());
    double sum = 0.0;
    double sum2 = 0.0;
    for (int b = 0; b < options.bootstrap; ++b) {
        std::int64_t left = out.samples;
        double mass = 1.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (left == 0 || p[i] <= 0.0) {
                boot[i] = 0;
            } else if (i + 1 == p.size() || p[i] >= mass) {
                boot[i] = left;
            } else {
                boot[i] = std::binomial_distribution<std::int64_t>(left, std::min(1.0, p[i] / mass))(rng);
            }
            left -= boot[i];
            mass -= p[i];
        }
        const double t = tv_of_cells(boot, total, q);
        sum += t;
        sum2 += t * t;
    }
    if (options.bootstrap > 1) {
        const double mean = sum / options.bootstrap;
        out.stderr_ = std::sqrt(std::max(0.0, (sum2 - options.bootstrap * mean * mean) / (options.bootstrap - 1)));
        out.bias_corrected = 2.0 * out.estimate - mean;
    } else {
        out.bias_corrected = out.estimate;
    }
    return out;
}

std::vector<std::vector<int>> sample_cycle_counts(int d, int n, int r, std::int64_t replicas, std::uint64_t seed,
                                                  unsigned threads) {
    return parallel_map<std::vector<int>>(static_cast<std::size_t>(replicas), threads, [&](std::size_t i) {
        Rng rng = make_stream(seed, i);
        const GraphState g = random_graph(d, static_cast<std::size_t>(n), rng);
        const auto counts = count_cycles_by_length(g, r);
        return std::vector<int>(counts.begin(), counts.end());
    });
}

GraphState sample_conditioned(const GraphState& base, const CycleRecord& alpha) {
    const std::size_t k = alpha.letters.size();
    const std::size_t n = base.size();
    if (k == 0 || alpha.vertices.size() != k || !is_cyclically_reduced(alpha.letters)) {
        throw std::invalid_argument("alpha must be a nonempty cyclically reduced labeled cycle");
    }
    std::vector<char> seen(n, 0);
    for (std::size_t i = 0; i < k; ++i) {
        const Vertex v = alpha.vertices[i];
        if (v >= n || seen[v]) {
            throw std::invalid_argument("alpha's vertices must be distinct vertices of the graph");
        }
        seen[v] = 1;
        if (alpha.letters[i].label() >= base.d()) {
            throw std::invalid_argument("alpha uses a generator the graph does not have");
        }
    }
    std::vector<std::vector<Vertex>> succ(static_cast<std::size_t>(base.d()));
    std::vector<std::vector<Vertex>> pred(succ.size());
    for (int l = 0; l < base.d(); ++l) {
        const auto s = base.tower(l).successors();
        succ[static_cast<std::size_t>(l)].assign(s.begin(), s.end());
        pred[static_cast<std::size_t>(l)].resize(n);
        for (Vertex v = 0; v < n; ++v) {
            pred[static_cast<std::size_t>(l)][s[v]] = v;
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        const Letter a = alpha.letters[i];
        Vertex from = alpha.vertices[i];
        Vertex to = alpha.vertices[(i + 1) % k];
        if (a.inverted()) {
            std::swap(from, to);
        }
        auto& s = succ[static_cast<std::size_t>(a.label())];
        auto& p = pred[static_cast<std::size_t>(a.label())];
        const Vertex old = s[from];
        if (old == to) {
            continue;
        }
        // Transpose the images `old` and `to`.
        const Vertex other = p[to];
        s[from] = to;
        s[other] = old;
        p[to] = from;
        p[old] = other;
    }
    std::vector<PermTower> towers;
    for (auto& s : succ) {
        towers.push_back(PermTower::from_successors(std::move(s)));
    }
    GraphState out(std::move(towers));
    if (!contains_cycle(out, alpha)) {
        throw std::invalid_argument("alpha imposes inconsistent constraints");
    }
    return out;
}

GraphState sample_conditioned(int d, std::size_t n, const CycleRecord& alpha, Rng& rng) {
    return sample_conditioned(random_graph(d, n, rng), alpha);
}

double overlap_probability(int d, int n, int r, std::int64_t replicas, std::uint64_t seed, unsigned threads) {
    if (replicas < 1) {
        throw std::invalid_argument("need at least one replica");
    }
    if (r < 1) {
        return 0.0;
    }
    const auto hits = parallel_map<char>(static_cast<std::size_t>(replicas), threads, [&](std::size_t i) -> char {
        Rng rng = make_stream(seed, i);
        const GraphState g = random_graph(d, static_cast<std::size_t>(n), rng);
        std::vector<char> used(g.size(), 0);
        for (const auto& c : find_cycles(g, r)) {
            for (Vertex v : c.vertices) {
                if (used[v]) {
                    return 1;
                }
                used[v] = 1;
            }
        }
        return 0;
    });
    return static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / static_cast<double>(replicas);
}

MomentEstimate sample_mean(std::span<const double> x) {
    if (x.size() < 2) {
        throw std::invalid_argument("need at least two samples");
    }
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

MomentEstimate sample_cov(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("need two equally long samples");
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    std::vector<double> prod(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        prod[i] = (x[i] - mx) * (y[i] - my);
    }
    MomentEstimate m = sample_mean(prod);
    m.mean *= n / (n - 1.0);
    return m;
}

GateResult z_gate(std::string statistic, double formula, const MomentEstimate& est, double sigmas) {
    GateResult g;
    g.statistic = std::move(statistic);
    g.formula = formula;
    g.estimate = est.mean;
    g.stderr_ = est.stderr_;
    g.score = est.stderr_ > 0.0 ? (est.mean - formula) / est.stderr_ : (est.mean == formula ? 0.0 : INFINITY);
    g.score_name = "z";
    g.passed = std::abs(g.score) <= sigmas;
    g.kind = GateKind::Statistical;
    return g;
}

Report graph_vs_limit(const CompareOptions& o) {
    if (o.d < 1 || o.K < 1 || o.s < 0.0 || o.replicas < 2) {
        throw std::invalid_argument("compare needs d >= 1, K >= 1, s >= 0 and at least two replicas");
    }
    std::vector<double> deltas = o.deltas;
    std::sort(deltas.begin(), deltas.end());
    const std::size_t times = deltas.size() + 1;
    const auto K = static_cast<std::size_t>(o.K);
    // Per replica: counts at s, then at s + delta for each delta.
    const auto runs = parallel_map<std::vector<std::int64_t>>(
        static_cast<std::size_t>(o.replicas), o.threads, [&](std::size_t i) {
            Rng rng = make_stream(o.seed, i);
            GraphState g(o.d);
            Clock clock;
            std::vector<std::int64_t> row;
            row.reserve(times * K);
            auto record = [&](double t) {
                advance(clock, g, t, rng);
                const auto c = count_cycles_by_length(g, o.K);
                row.insert(row.end(), c.begin() + 1, c.end());
            };
            record(o.s);
            for (double delta : deltas) {
                record(o.s + delta);
            }
            return row;
        });
    auto column = [&](std::size_t time, std::size_t k) {
        std::vector<double> x(runs.size());
        for (std::size_t i = 0; i < runs.size(); ++i) {
            x[i] = static_cast<double>(runs[i][time * K + (k - 1)]);
        }
        return x;
    };
    Report rep;
    rep.command = "compare";
    rep.seed = o.seed;
    rep.config = {{"d", o.d}, {"K", o.K}, {"s", o.s}, {"deltas", deltas}, {"replicas", o.replicas}};
    for (std::size_t k = 1; k <= K; ++k) {
        const double limit = static_cast<double>(a_count(o.d, static_cast<int>(k))) / (2.0 * static_cast<double>(k));
        rep.gates.push_back(z_gate("E C_" + std::to_string(k) + "(s)", limit, sample_mean(column(0, k))));
    }
    if (o.covariances) {
        for (std::size_t di = 0; di < deltas.size(); ++di) {
            for (std::size_t j = 1; j <= K; ++j) {
                for (std::size_t k = 1; k <= K; ++k) {
                    const double formula = cov_formula(o.d, static_cast<int>(j), static_cast<int>(k), o.s,
                                                       o.s + deltas[di]);
                    rep.gates.push_back(z_gate("cov(C_" + std::to_string(k) + "(s+" + format_double(deltas[di]) +
                                                   "),C_" + std::to_string(j) + "(s))",
                                               formula, sample_cov(column(di + 1, k), column(0, j))));
                }
            }
        }
    }
    return rep;
}

std::vector<double> chebyshev_traces(int d, std::span<const std::int64_t> counts) {
    // Centering constants are dropped; only covariances are taken of these.
    const double q = 2.0 * d - 1.0;
    std::vector<double> out(counts.size(), 0.0);
    for (std::size_t i = 1; i < counts.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 1; k <= i; ++k) {
            if (i % k == 0) {
                s += 2.0 * static_cast<double>(k) * static_cast<double>(counts[k]);
            }
        }
        out[i] = 0.5 * std::pow(q, -static_cast<double>(i) / 2.0) * s;
    }
    return out;
}

Report ou_limit_scan(const OuScanOptions& o) {
    if (o.d_list.empty() || !std::is_sorted(o.d_list.begin(), o.d_list.end()) || o.k_list.empty()) {
        throw std::invalid_argument("ou scan needs an increasing d list and a nonempty k list");
    }
    if (o.s > o.t) {
        throw std::invalid_argument("ou scan needs s <= t");
    }
    Report rep;
    rep.command = "oulimit";
    rep.seed = o.seed;
    rep.config = {{"d_list", o.d_list}, {"k_list", o.k_list}, {"s", o.s},
                  {"t", o.t},           {"replicas", o.replicas}, {"monte_carlo_d", o.monte_carlo_d}};
    auto table = nlohmann::json::array();
    for (int i : o.k_list) {
        for (int k : o.k_list) {
            const double limit = ou_covariance(i, k, o.s, o.t);
            double previous = INFINITY;
            bool approaching = true;
            for (int d : o.d_list) {
                const double exact = chebyshev_cov_prelimit(d, i, k, o.s, o.t);
                table.push_back({{"d", d}, {"i", i}, {"k", k}, {"prelimit", exact}, {"limit", limit}});
                const double gap = std::abs(exact - limit);
                approaching = approaching && gap <= previous * (1.0 + 1e-12);
                previous = gap;
            }
            GateResult g;
            g.statistic = "|prelimit - limit| nonincreasing in d, (i,k)=(" + std::to_string(i) + "," +
                          std::to_string(k) + ")";
            g.formula = limit;
            g.estimate = chebyshev_cov_prelimit(o.d_list.back(), i, k, o.s, o.t);
            g.score = previous;
            g.score_name = "gap";
            g.passed = approaching;
            g.kind = GateKind::Exact;
            rep.gates.push_back(g);
        }
    }
    rep.extra["prelimit_table"] = table;

    const int R = *std::max_element(o.k_list.begin(), o.k_list.end());
    for (int d : o.monte_carlo_d) {
        const LengthProcess process = LengthProcess::aggregate(d, R);
        const std::vector<double> times{o.s, o.t};
        const auto runs = parallel_map<std::vector<std::vector<double>>>(
            static_cast<std::size_t>(o.replicas), o.threads, [&](std::size_t r) {
                Rng rng = make_stream(o.seed ^ static_cast<std::uint64_t>(d) * 0x9e3779b97f4a7c15ULL, r);
                const auto counts = process.counts_at_times(o.t, times, rng);
                return std::vector<std::vector<double>>{chebyshev_traces(d, counts[0]), chebyshev_traces(d, counts[1])};
            });
        for (int i : o.k_list) {
            for (int k : o.k_list) {
                std::vector<double> x(runs.size());
                std::vector<double> y(runs.size());
                for (std::size_t r = 0; r < runs.size(); ++r) {
                    x[r] = runs[r][1][static_cast<std::size_t>(i)];
                    y[r] = runs[r][0][static_cast<std::size_t>(k)];
                }
                rep.gates.push_back(z_gate("d=" + std::to_string(d) + " cov(trT_" + std::to_string(i) + "(t),trT_" +
                                               std::to_string(k) + "(s))",
                                           chebyshev_cov_prelimit(d, i, k, o.s, o.t), sample_cov(x, y)));
            }
        }
    }
    return rep;
}

}  // namespace rrg
