#include "rrg/limitproc.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

#include "rrg/report.hpp"

namespace rrg {

namespace {

constexpr std::int32_t kBeyond = WordTable::kBeyond;

std::int64_t poisson(Rng& rng, double mean) {
    if (mean <= 0.0) {
        return 0;
    }
    return std::poisson_distribution<std::int64_t>(mean)(rng);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

void check_time(double t, double horizon) {
    if (!(t >= 0.0) || t > horizon) {
        throw std::out_of_range("time outside [0, horizon]");
    }
}

}  // namespace

std::int32_t Chain::state_at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) {
        return kBeyond;
    }
    return states[static_cast<std::size_t>(it - times.begin() - 1)];
}

std::vector<std::int64_t> CyclePath::counts_at(const WordTable& table, double t) const {
    check_time(t, horizon);
    std::vector<std::int64_t> out(table.size(), 0);
    for (const auto& c : chains) {
        const auto s = c.state_at(t);
        if (s != kBeyond) {
            ++out[static_cast<std::size_t>(s)];
        }
    }
    return out;
}

std::vector<std::int64_t> CyclePath::aggregate_k(const WordTable& table, double t) const {
    check_time(t, horizon);
    std::vector<std::int64_t> out(static_cast<std::size_t>(table.max_length()) + 1, 0);
    for (const auto& c : chains) {
        const auto s = c.state_at(t);
        if (s != kBeyond) {
            ++out[static_cast<std::size_t>(table.length(static_cast<std::size_t>(s)))];
        }
    }
    return out;
}

std::vector<LimitEvent> path_events(const CyclePath& path) {
    std::vector<LimitEvent> out;
    for (const auto& c : path.chains) {
        if (c.birth() > 0.0) {
            out.push_back({LimitEvent::Kind::Immigration, c.birth(), kBeyond, c.states.front()});
        }
        for (std::size_t i = 1; i < c.states.size(); ++i) {
            const auto kind = c.states[i] == kBeyond ? LimitEvent::Kind::Exit : LimitEvent::Kind::Doubling;
            out.push_back({kind, c.times[i], c.states[i - 1], c.states[i]});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const LimitEvent& a, const LimitEvent& b) { return a.time < b.time; });
    return out;
}

LimitProcess::LimitProcess(int d, int L, std::optional<int> resolved_length, const EnumerationLimits& limits)
    : L_(L), table_(d, std::min(L, resolved_length.value_or(L)), limits) {
    if (L < 0) {
        throw std::invalid_argument("truncation length must be nonnegative");
    }
    if (resolved_length && *resolved_length < 1) {
        throw std::invalid_argument("resolved length must be at least 1");
    }
    const int R = table_.max_length();
    layers_.resize(static_cast<std::size_t>(R) + 1);
    for (int k = 1; k <= R; ++k) {
        const auto [first, last] = table_.length_range(k);
        std::map<int, std::vector<std::int32_t>> by_h;
        auto& layer = layers_[static_cast<std::size_t>(k)];
        for (std::size_t i = first; i < last; ++i) {
            const WordClass& w = table_.word(i);
            by_h[w.h()].push_back(static_cast<std::int32_t>(i));
            const double mu = static_cast<double>(w.length() - w.c()) / w.h();
            if (mu > 0.0) {
                layer.rate += mu;
                layer.members.push_back(static_cast<std::int32_t>(i));
                layer.weights.push_back(layer.rate);  // cumulative
            }
        }
        for (auto& [h, members] : by_h) {
            const double mean = static_cast<double>(members.size()) / h;
            init_groups_.push_back({first, std::move(members), mean});
        }
    }
}

std::vector<ImmigrationAtom> LimitProcess::sample_stationary_init(Rng& rng) const {
    // A Poisson total spread uniformly over a group is the same as independent
    // Poisson(1/h) counts per class.
    std::vector<ImmigrationAtom> out;
    for (const auto& g : init_groups_) {
        const std::int64_t total = poisson(rng, g.mean);
        for (std::int64_t i = 0; i < total; ++i) {
            out.push_back({g.members[uniform_index(rng, g.members.size())], 0.0});
        }
    }
    return out;
}

std::vector<ImmigrationAtom> LimitProcess::sample_immigration(double T, Rng& rng) const {
    // Superposition per length, marked by class with probability mu(w)/mu(k).
    std::vector<ImmigrationAtom> out;
    for (const auto& layer : layers_) {
        if (layer.rate <= 0.0) {
            continue;
        }
        const std::int64_t total = poisson(rng, layer.rate * T);
        for (std::int64_t i = 0; i < total; ++i) {
            const double u = uniform01(rng) * layer.rate;
            auto it = std::upper_bound(layer.weights.begin(), layer.weights.end(), u);
            if (it == layer.weights.end()) {
                --it;
            }
            const double birth = T * (1.0 - uniform01(rng));  // in (0, T]
            out.push_back({layer.members[static_cast<std::size_t>(it - layer.weights.begin())], birth});
        }
    }
    return out;
}

Chain LimitProcess::run_chain(std::int32_t word, double birth, double T, Rng& rng) const {
    Chain c;
    c.times.push_back(birth);
    c.states.push_back(word);
    double t = birth;
    std::int32_t cur = word;
    while (cur != kBeyond) {
        const int m = table_.length(static_cast<std::size_t>(cur));
        t += exponential(rng, m);
        if (t > T) {
            break;
        }
        const auto targets = table_.doubling_targets(static_cast<std::size_t>(cur));
        cur = targets[uniform_index(rng, targets.size())];
        c.times.push_back(t);
        c.states.push_back(cur);
    }
    return c;
}

CyclePath LimitProcess::simulate(double T, Rng& rng, std::optional<std::vector<ImmigrationAtom>> init) const {
    if (!(T >= 0.0)) {
        throw std::invalid_argument("horizon must be nonnegative");
    }
    std::vector<ImmigrationAtom> atoms = init ? std::move(*init) : sample_stationary_init(rng);
    for (const auto& a : atoms) {
        if (a.word < 0 || static_cast<std::size_t>(a.word) >= table_.size() || a.birth_time < 0.0) {
            throw std::invalid_argument("initial atom outside the resolved word set");
        }
    }
    const auto arrivals = sample_immigration(T, rng);
    atoms.insert(atoms.end(), arrivals.begin(), arrivals.end());
    CyclePath path;
    path.horizon = T;
    path.chains.reserve(atoms.size());
    for (const auto& a : atoms) {
        path.chains.push_back(run_chain(a.word, a.birth_time, T, rng));
    }
    return path;
}

std::vector<ReversedMove> reversed_rates(const WordTable& table, std::span<const std::int64_t> x) {
    if (x.size() != table.size()) {
        throw std::invalid_argument("state vector does not match the word table");
    }
    const int L = table.max_length();
    std::vector<ReversedMove> out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const WordClass& w = table.word(i);
        const auto xi = static_cast<double>(x[i]);
        if (w.length() == L) {
            out.push_back({ReversedMove::Kind::Creation, kBeyond, static_cast<std::int32_t>(i),
                           static_cast<double>(L) / w.h()});
        }
        if (xi == 0.0) {
            continue;
        }
        for (const auto& [u, b] : halvings(w)) {
            const auto j = table.find(u);
            out.push_back({ReversedMove::Kind::Shrink, static_cast<std::int32_t>(i),
                           static_cast<std::int32_t>(*j), b * xi});
        }
        const double death = (w.length() - w.c()) * xi;
        if (death > 0.0) {
            out.push_back({ReversedMove::Kind::Death, static_cast<std::int32_t>(i), kBeyond, death});
        }
    }
    return out;
}

std::vector<ForwardMove> forward_rates(const WordTable& table, std::span<const std::int64_t> x) {
    if (x.size() != table.size()) {
        throw std::invalid_argument("state vector does not match the word table");
    }
    std::vector<ForwardMove> out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const WordClass& w = table.word(i);
        const double mu = static_cast<double>(w.length() - w.c()) / w.h();
        if (mu > 0.0) {
            out.push_back({LimitEvent::Kind::Immigration, kBeyond, static_cast<std::int32_t>(i), mu});
        }
        if (x[i] == 0) {
            continue;
        }
        std::map<std::int32_t, int> mult;
        for (auto target : table.doubling_targets(i)) {
            ++mult[target];
        }
        for (const auto& [target, m] : mult) {
            const auto kind = target == kBeyond ? LimitEvent::Kind::Exit : LimitEvent::Kind::Doubling;
            out.push_back({kind, static_cast<std::int32_t>(i), target, static_cast<double>(m * x[i])});
        }
    }
    return out;
}

std::vector<std::int64_t> LengthPath::counts_at(double t) const {
    check_time(t, horizon);
    std::vector<std::int64_t> out(static_cast<std::size_t>(max_length) + 1, 0);
    for (const auto& c : chains) {
        if (c.birth > t) {
            continue;
        }
        const auto grown = std::upper_bound(c.jumps.begin(), c.jumps.end(), t) - c.jumps.begin();
        const int len = c.start_length + static_cast<int>(grown);
        if (len <= max_length) {
            ++out[static_cast<std::size_t>(len)];
        }
    }
    return out;
}

std::int64_t LengthPath::count_immigrants(int k, double from, double to) const {
    std::int64_t n = 0;
    for (const auto& c : chains) {
        if (c.start_length == k && c.birth > from && c.birth <= to) {
            ++n;
        }
    }
    return n;
}

LengthProcess::LengthProcess(std::vector<double> init_means, std::vector<double> rates)
    : init_means_(std::move(init_means)), rates_(std::move(rates)) {
    if (rates_.size() < 2 || init_means_.size() != rates_.size()) {
        throw std::invalid_argument("length process needs matching means and rates for k = 1..R");
    }
}

LengthProcess LengthProcess::aggregate(int d, int R) {
    std::vector<double> means(static_cast<std::size_t>(R) + 1, 0.0);
    std::vector<double> rates(means.size(), 0.0);
    for (int k = 1; k <= R; ++k) {
        means[static_cast<std::size_t>(k)] = static_cast<double>(a_count(d, k)) / (2.0 * k);
        rates[static_cast<std::size_t>(k)] = to_double(mu_k(d, k));
    }
    return LengthProcess(std::move(means), std::move(rates));
}

LengthProcess LengthProcess::increment(int d, int R) {
    std::vector<double> means(static_cast<std::size_t>(R) + 1, 0.0);
    std::vector<double> rates(means.size(), 0.0);
    for (int k = 1; k <= R; ++k) {
        means[static_cast<std::size_t>(k)] =
            static_cast<double>(a_count(d + 1, k) - a_count(d, k)) / (2.0 * k);
        rates[static_cast<std::size_t>(k)] = to_double(nu_rate(d, k));
    }
    return LengthProcess(std::move(means), std::move(rates));
}

LengthPath LengthProcess::simulate(double T, Rng& rng, bool stationary) const {
    if (!(T >= 0.0)) {
        throw std::invalid_argument("horizon must be nonnegative");
    }
    const int R = max_length();
    LengthPath path;
    path.horizon = T;
    path.max_length = R;
    auto grow = [&](int k, double birth) {
        LengthPath::LengthChain c{k, birth, {}};
        double t = birth;
        for (int m = k; m <= R; ++m) {
            t += exponential(rng, m);
            if (t > T) {
                break;
            }
            c.jumps.push_back(t);
        }
        path.chains.push_back(std::move(c));
    };
    if (stationary) {
        for (int k = 1; k <= R; ++k) {
            const std::int64_t n = poisson(rng, init_means_[static_cast<std::size_t>(k)]);
            for (std::int64_t i = 0; i < n; ++i) {
                grow(k, 0.0);
            }
        }
    }
    for (int k = 1; k <= R; ++k) {
        const std::int64_t n = poisson(rng, rates_[static_cast<std::size_t>(k)] * T);
        for (std::int64_t i = 0; i < n; ++i) {
            grow(k, T * (1.0 - uniform01(rng)));
        }
    }
    return path;
}

std::vector<std::vector<std::int64_t>> LengthProcess::counts_at_times(double T, std::span<const double> times,
                                                                      Rng& rng, bool stationary) const {
    for (double t : times) {
        check_time(t, T);
    }
    const int R = max_length();
    std::vector<std::vector<std::int64_t>> out(times.size(), std::vector<std::int64_t>(static_cast<std::size_t>(R) + 1, 0));
    auto grow = [&](int k, double birth) {
        // Lengths at each observation time from one pass over the jump times.
        double next = birth + exponential(rng, k);
        int m = k;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double t = times[i];
            if (t < birth) {
                continue;
            }
            while (next <= t && m <= R) {
                ++m;
                next += exponential(rng, m);
            }
            if (m <= R) {
                ++out[i][static_cast<std::size_t>(m)];
            }
        }
    };
    // Observation times must be visited in increasing order by each chain.
    if (!std::is_sorted(times.begin(), times.end())) {
        throw std::invalid_argument("observation times must be sorted");
    }
    if (stationary) {
        for (int k = 1; k <= R; ++k) {
            const std::int64_t n = poisson(rng, init_means_[static_cast<std::size_t>(k)]);
            for (std::int64_t i = 0; i < n; ++i) {
                grow(k, 0.0);
            }
        }
    }
    for (int k = 1; k <= R; ++k) {
        const std::int64_t n = poisson(rng, rates_[static_cast<std::size_t>(k)] * T);
        for (std::int64_t i = 0; i < n; ++i) {
            grow(k, T * (1.0 - uniform01(rng)));
        }
    }
    return out;
}

LengthPath simulate_increment_process(int d, int R, double T, Rng& rng) {
    return LengthProcess::increment(d, R).simulate(T, rng);
}

int yule_sample(int j, double dt, Rng& rng) {
    if (j < 1 || dt < 0.0) {
        throw std::invalid_argument("Yule chain needs j >= 1 and dt >= 0");
    }
    int m = j;
    double t = exponential(rng, m);
    while (t <= dt) {
        ++m;
        t += exponential(rng, m);
    }
    return m;
}

SplitPath split_by_level(const CyclePath& path, const WordTable& table, int inner_d) {
    SplitPath out;
    out.inner.horizon = path.horizon;
    out.increment.horizon = path.horizon;
    for (const auto& c : path.chains) {
        const WordClass& w = table.word(static_cast<std::size_t>(c.states.front()));
        // Doubling never introduces a new generator, so the split is stable in time.
        (w.max_generator() <= inner_d ? out.inner : out.increment).chains.push_back(c);
    }
    return out;
}

void write_limit_path_csv(std::ostream& out, std::span<const std::vector<std::vector<std::int64_t>>> replicas,
                          std::span<const double> times) {
    out << "replica,t,k,count" << kCsvEol;
    for (std::size_t r = 0; r < replicas.size(); ++r) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto& counts = replicas[r].at(i);
            for (std::size_t k = 1; k < counts.size(); ++k) {
                out << r << ',' << format_double(times[i]) << ',' << k << ',' << counts[k] << kCsvEol;
            }
        }
    }
}

}  // namespace rrg
