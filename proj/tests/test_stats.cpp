#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rrg/errors.hpp"
#include "rrg/stats.hpp"

using namespace rrg;

TEST_CASE("chi-square helpers") {
    const std::vector<std::int64_t> obs{50, 50};
    const std::vector<double> p{0.5, 0.5};
    CHECK(chi_square_gof(obs, p).statistic == doctest::Approx(0.0));
    CHECK(chi_square_gof(obs, p).p_value == doctest::Approx(1.0));
    const std::vector<std::int64_t> skew{90, 10};
    CHECK(chi_square_gof(skew, p).p_value < 1e-10);
    // Sparse cells get pooled; a short tail folds into the last full cell.
    const std::vector<std::int64_t> sparse{40, 40, 1, 1, 0};
    const std::vector<double> q{0.5, 0.47, 0.02, 0.01, 0.0};
    CHECK(chi_square_gof(sparse, q).cells == 2);
    CHECK(chi_square_homogeneity(obs, obs).p_value == doctest::Approx(1.0));

    Rng rng(1);
    std::vector<std::int64_t> draws(5000);
    for (auto& x : draws) {
        x = std::poisson_distribution<std::int64_t>(2.5)(rng);
    }
    CHECK(poisson_gof(draws, 2.5).p_value > 0.001);
    CHECK(poisson_gof(draws, 3.0).p_value < 1e-6);
}

TEST_CASE("exact oracle: tiny cases") {
    const JointLaw s3 = exact_cycle_distribution(3, 1, 1);
    CHECK(s3.total == 6);
    CHECK(s3.probability({0, 3}) == doctest::Approx(1.0 / 6));
    CHECK(s3.probability({0, 0}) == doctest::Approx(2.0 / 6));
    const JointLaw s2 = exact_cycle_distribution(2, 1, 2);
    CHECK(s2.probability({0, 0, 1}) == doctest::Approx(0.5));
    const JointLaw d2 = exact_cycle_distribution(3, 2, 3);
    double mass = 0.0;
    for (const auto& [key, w] : d2.weight) {
        mass += d2.probability(key);
    }
    CHECK(mass == doctest::Approx(1.0));
    CHECK_THROWS_AS(exact_cycle_distribution(8, 2, 2), BudgetExceeded);
}

TEST_CASE("exact oracle agrees with the classical permutation law") {
    for (int n = 1; n <= 7; ++n) {
        const JointLaw law = exact_cycle_distribution(n, 1, 3);
        const auto classical = oracle::classical_cycle_law(n, 3);
        CHECK(law.weight == classical);
    }
}

TEST_CASE("exact class means") {
    for (int n = 1; n <= 4; ++n) {
        const auto means = exact_word_means(n, 2, 3);
        for (int k = 1; k <= 3; ++k) {
            for (const auto& w : enumerate_classes(2, k)) {
                const auto it = means.find(w);
                const Rational got = it == means.end() ? Rational(0) : it->second;
                INFO("n=" << n << " w=" << w.str());
                CHECK(got == exact_class_mean(n, 2, w));
            }
        }
    }
    // E C_2 = 3 - 2/n for d = 2.
    for (int n = 2; n <= 4; ++n) {
        Rational total = 0;
        for (const auto& [w, m] : exact_word_means(n, 2, 2)) {
            if (w.length() == 2) {
                total += m;
            }
        }
        CHECK(total == Rational(3) - Rational(2, n));
    }
    CHECK(labeled_cycle_mean(5, 3) == Rational(1, 60));
}

TEST_CASE("Poisson reference and TV") {
    const auto ref = PoissonReference::aggregate(2, 2);
    CHECK(ref.means[1] == doctest::Approx(2.0));
    CHECK(ref.means[2] == doctest::Approx(3.0));
    CHECK(ref.pmf({0, 1, 2}) == doctest::Approx(oracle::poisson_pmf(2.0, 1) * oracle::poisson_pmf(3.0, 2)));

    const auto ref1 = PoissonReference::aggregate(1, 3);
    const double tv4 = exact_tv(exact_cycle_distribution(4, 1, 3), ref1);
    const double tv8 = exact_tv(exact_cycle_distribution(8, 1, 3), ref1);
    CHECK(tv4 > 0.0);
    CHECK(tv8 < tv4);

    // Samples drawn from the reference itself give a TV near zero.
    Rng rng(2);
    std::vector<std::vector<int>> samples(40000, std::vector<int>(3, 0));
    for (auto& s : samples) {
        s[1] = std::poisson_distribution<int>(2.0)(rng);
        s[2] = std::poisson_distribution<int>(3.0)(rng);
    }
    const TvReport rep = empirical_tv(samples, ref, rng);
    CHECK(rep.bias_corrected < 4.0 * rep.stderr_ + 0.003);
    CHECK(rep.estimate < 0.03);
    samples.resize(100);
    CHECK_THROWS_AS(empirical_tv(samples, ref, rng), std::invalid_argument);
}

TEST_CASE("conditioned sampler") {
    Rng rng(3);
    CycleRecord alpha{{0, 3, 5}, parse_word("1 2' 1")};
    for (int r = 0; r < 200; ++r) {
        const GraphState g = sample_conditioned(2, 8, alpha, rng);
        CHECK(contains_cycle(g, alpha));
    }
    CycleRecord loop{{2}, parse_word("2")};
    CHECK(contains_cycle(sample_conditioned(2, 5, loop, rng), loop));
    CHECK_THROWS_AS(sample_conditioned(2, 5, CycleRecord{{0, 0}, parse_word("1 2")}, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_conditioned(2, 5, CycleRecord{{0, 1}, parse_word("1 1'")}, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_conditioned(1, 5, CycleRecord{{0, 1}, parse_word("1 2")}, rng), std::invalid_argument);

    // Edges of the base graph that contradict alpha never survive.
    const GraphState base = random_graph(2, 10, rng);
    const GraphState cond = sample_conditioned(base, alpha);
    CHECK(cond.tower(0).succ(0) == 3);
    CHECK(cond.tower(1).succ(5) == 3);
    CHECK(cond.tower(0).succ(5) == 0);
}

TEST_CASE("overlap probability") {
    CHECK(overlap_probability(1, 50, 3, 1000, 1, 1) == 0.0);
    CHECK(overlap_probability(2, 50, 0, 1000, 1, 1) == 0.0);
    const double p = overlap_probability(2, 50, 2, 2000, 1, 1);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
}

TEST_CASE("moment helpers") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{2, 4, 6, 8};
    CHECK(sample_mean(x).mean == doctest::Approx(2.5));
    CHECK(sample_cov(x, y).mean == doctest::Approx(2.0 * 5.0 / 3.0));
    const auto g = z_gate("x", 2.0, MomentEstimate{2.3, 0.1});
    CHECK(g.score == doctest::Approx(3.0));
    const auto traces = chebyshev_traces(2, std::vector<std::int64_t>{0, 1, 1});
    CHECK(traces[1] == doctest::Approx(0.5 / std::sqrt(3.0) * 2.0));
    CHECK(traces[2] == doctest::Approx(0.5 / 3.0 * (2.0 + 4.0)));
}

TEST_CASE("graph versus limit at small scale") {
    CompareOptions o;
    o.d = 1;
    o.K = 3;
    o.s = 5.0;
    o.replicas = 3000;
    o.covariances = false;
    const Report rep = graph_vs_limit(o);
    REQUIRE(rep.gates.size() == 3);
    for (const auto& g : rep.gates) {
        CHECK(std::abs(g.score) < 4.0);
    }
    CHECK(rep.gates[1].formula == doctest::Approx(0.5));
}

TEST_CASE("Poissonized finite-time cycle means") {
    // d = 1: E C_k(n) = 1/k once n >= k, and P[N_t >= k] = (1 - e^-t)^k.
    for (double t : {0.3, 1.0, 4.0}) {
        const auto m = poissonized_cycle_means(1, 5, t);
        for (int k = 1; k <= 5; ++k) {
            CHECK(m[static_cast<std::size_t>(k)] == doctest::Approx(std::pow(1.0 - std::exp(-t), k) / k).epsilon(1e-10));
        }
    }
    const auto late = poissonized_cycle_means(2, 3, 14.0);
    for (int k = 1; k <= 3; ++k) {
        CHECK(late[static_cast<std::size_t>(k)] == doctest::Approx(static_cast<double>(a_count(2, k)) / (2.0 * k)).epsilon(1e-3));
    }
    // Monte Carlo growth to t = 2.5.
    const auto exact = poissonized_cycle_means(2, 3, 2.5);
    const std::int64_t reps = 20000;
    std::vector<std::vector<double>> x(4);
    for (std::int64_t r = 0; r < reps; ++r) {
        Rng rng = make_stream(31, static_cast<std::uint64_t>(r));
        GraphState g(2);
        Clock clock;
        advance(clock, g, 2.5, rng);
        const auto c = count_cycles_by_length(g, 3);
        for (int k = 1; k <= 3; ++k) {
            x[static_cast<std::size_t>(k)].push_back(static_cast<double>(c[static_cast<std::size_t>(k)]));
        }
    }
    for (int k = 1; k <= 3; ++k) {
        const auto est = sample_mean(x[static_cast<std::size_t>(k)]);
        CHECK(std::abs(est.mean - exact[static_cast<std::size_t>(k)]) < 4.0 * est.stderr_);
    }
    CHECK_THROWS_AS(poissonized_cycle_means(2, 2, 30.0, 1e5), BudgetExceeded);
}
