#include <doctest.h>

#include <cmath>
#include <random>

#include "renewal/renewal_hmm.hpp"
#include "support/oracle.hpp"

using namespace renewal;

TEST_CASE("default model matches the plate settings") {
    const RenewalHmmModel m = default_model();
    REQUIRE(m.n_states == 2);
    CHECK(m.at(0, 0) == 0.999998);
    CHECK(m.at(1, 0) == 2e-6);
    CHECK(m.at(0, 1) == 0.04);
    CHECK(m.at(1, 1) == 0.96);
    CHECK(m.track_mean[0] == 360.0);
    // equilibrium of the two-state chain: pi_track = p_bt / (p_bt + p_tb)
    CHECK(std::abs(m.initial[0] - 0.99995000) < 5e-9);
    CHECK(std::abs(m.initial[1] - 4.99975e-5) < 1e-9);
    CHECK_NOTHROW(validate_model(m));
}

TEST_CASE("equilibrium solves pi = P pi") {
    SUBCASE("symmetric two-state chain") {
        const std::vector<double> p{0.9, 0.1, 0.1, 0.9};
        const auto pi = equilibrium(p, 2);
        CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("plate matrix") {
        const std::vector<double> p{0.999998, 0.04, 2e-6, 0.96};
        const auto pi = equilibrium(p, 2);
        // closed form: pi_track = p_bt / (p_bt + p_tb)
        const double pi_track = 2e-6 / (2e-6 + 0.04);
        CHECK(std::abs(pi[1] - pi_track) < 1e-12);
        CHECK(std::abs(pi[0] - (1.0 - pi_track)) < 1e-12);
        // the published rounding of the same numbers
        CHECK(std::abs(pi[0] - 0.99995000) < 5e-9);
        CHECK(std::abs(pi[1] - 4.99975e-5) < 1e-9);
    }
    SUBCASE("identity matrix has no unique stationary vector") {
        const std::vector<double> p{1.0, 0.0, 0.0, 1.0};
        CHECK_THROWS_AS(equilibrium(p, 2), std::invalid_argument);
    }
    SUBCASE("fixed point property for random chains") {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 50; ++trial) {
            const auto model = oracle::random_model(rng, 3, false);
            const auto pi = equilibrium(model.transition, 3);
            double sum = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                double v = 0.0;
                for (std::size_t j = 0; j < 3; ++j) v += model.at(i, j) * pi[j];
                CHECK(v == doctest::Approx(pi[i]).epsilon(1e-9));
                sum += pi[i];
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("emission log density") {
    const RenewalHmmModel m = default_model();

    SUBCASE("unit rate at zero gap has density one") {
        Observation o;
        o.delta_t = 0.0;
        o.local_bg_rate = 1.0;
        CHECK(emission_log_density(o, 0, m) == doctest::Approx(0.0));
    }
    SUBCASE("track rate adds the background rate to 1/mean") {
        Observation o;
        o.delta_t = 0.0;
        o.local_bg_rate = 1e-3;
        const double expected_rate = 1.0 / 360.0 + 1e-3;
        CHECK(emission_log_density(o, 1, m) == doctest::Approx(std::log(expected_rate)));
        CHECK(expected_rate == doctest::Approx(3.7778e-3).epsilon(1e-4));
    }
    SUBCASE("vanishing background leaves the pure track rate") {
        Observation o;
        o.delta_t = 360.0;
        o.local_bg_rate = 1e-12;
        const double got = emission_log_density(o, 1, m);
        CHECK(got == doctest::Approx(std::log(1.0 / 360.0 + 1e-12) - (1.0 / 360.0 + 1e-12) * 360.0));
    }
    SUBCASE("alignment term multiplies in only when present") {
        RenewalHmmModel am = default_model();
        am.alignment_enabled = true;
        am.alignment_prob = {0.1, 0.8};
        Observation o;
        o.delta_t = 100.0;
        o.local_bg_rate = 1e-3;
        const double base = emission_log_density(o, 1, m);
        CHECK(emission_log_density(o, 1, am) == doctest::Approx(base));  // absent -> no factor
        o.aligned = true;
        CHECK(emission_log_density(o, 1, am) == doctest::Approx(base + std::log(0.8)));
        o.aligned = false;
        CHECK(emission_log_density(o, 1, am) == doctest::Approx(base + std::log(0.2)));
    }
}

TEST_CASE("single observation posterior is one-step bayes") {
    const RenewalHmmModel m = default_model();
    Observation o;
    o.delta_t = 200.0;
    o.local_bg_rate = 1e-4;
    const auto table = forward_backward(std::vector<Observation>{o}, m);
    REQUIRE(table.rows() == 1);

    double w0 = m.initial[0] * std::exp(emission_log_density(o, 0, m));
    double w1 = m.initial[1] * std::exp(emission_log_density(o, 1, m));
    CHECK(table.at(0, 0) == doctest::Approx(w0 / (w0 + w1)).epsilon(1e-12));
    CHECK(table.at(0, 1) == doctest::Approx(w1 / (w0 + w1)).epsilon(1e-12));
}

TEST_CASE("two observations match the four-path enumeration") {
    const RenewalHmmModel m = default_model();
    std::vector<Observation> obs(2);
    obs[0] = {150.0, 2e-4, std::nullopt};
    obs[1] = {90.0, 2e-4, std::nullopt};
    const auto table = forward_backward(obs, m);
    const auto expected = oracle::enumerate_marginals(obs, m);
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t s = 0; s < 2; ++s)
            CHECK(table.at(t, s) == doctest::Approx(expected[t][s]).epsilon(1e-12));
}

TEST_CASE("identical emissions reproduce the chain prior") {
    // With 1/track_mean below one ulp of the background rate every state
    // shares the same emission, the likelihood cancels, and the smoothed
    // marginal of X_i is the prior marginal of the chain.
    RenewalHmmModel uniform = default_model();
    uniform.track_mean = {1e30};
    std::vector<Observation> obs(4);
    for (auto& o : obs) o = {250.0, 5e-4, std::nullopt};
    const auto table = forward_backward(obs, uniform);

    std::vector<double> prior = uniform.initial;  // pi, P pi, P^2 pi, ...
    for (std::size_t t = 0; t < obs.size(); ++t) {
        CHECK(table.at(t, 0) == doctest::Approx(prior[0]).epsilon(1e-9));
        CHECK(table.at(t, 1) == doctest::Approx(prior[1]).epsilon(1e-9));
        std::vector<double> next(2, 0.0);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) next[i] += uniform.at(i, j) * prior[j];
        prior = next;
    }
}

TEST_CASE("forward-backward equals exhaustive enumeration on random problems") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> n_states_dist(2, 3);
    std::uniform_int_distribution<std::size_t> len_dist(1, 12);
    for (int trial = 0; trial < 60; ++trial) {
        CAPTURE(trial);
        const std::size_t n = n_states_dist(rng);
        const bool with_alignment = trial % 3 == 0;
        const auto model = oracle::random_model(rng, n, with_alignment);
        const auto obs = oracle::random_observations(rng, len_dist(rng), with_alignment);
        const auto table = forward_backward(obs, model);
        const auto expected = oracle::enumerate_marginals(obs, model);
        for (std::size_t t = 0; t < obs.size(); ++t)
            for (std::size_t s = 0; s < n; ++s) {
                const double rel = std::abs(table.at(t, s) - expected[t][s]) /
                                   std::max(expected[t][s], 1e-300);
                CHECK(rel < 1e-10);
            }
    }
}

TEST_CASE("posterior rows sum to one within 1e-12") {
    std::mt19937_64 rng(55);
    const auto model = oracle::random_model(rng, 3, false);
    const auto obs = oracle::random_observations(rng, 400, false);
    const auto table = forward_backward(obs, model);
    for (std::size_t t = 0; t < table.rows(); ++t) {
        double sum = 0.0;
        for (std::size_t s = 0; s < table.n_states(); ++s) {
            sum += table.at(t, s);
            CHECK(table.at(t, s) >= 0.0);
            CHECK(table.at(t, s) <= 1.0);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("posterior is invariant under per-step emission scaling") {
    // Scaling all densities at one step is a shift of every log emission at
    // that step; compare against a model whose alignment term applies the
    // same factor to all states.
    std::mt19937_64 rng(77);
    auto model = oracle::random_model(rng, 2, true);
    model.alignment_prob = {0.37, 0.37};  // common factor at aligned steps
    auto plain = model;
    plain.alignment_enabled = false;
    plain.alignment_prob.clear();

    auto obs = oracle::random_observations(rng, 30, false);
    for (auto& o : obs) o.aligned = true;
    const auto scaled = forward_backward(obs, model);
    const auto unscaled = forward_backward(obs, plain);
    for (std::size_t t = 0; t < obs.size(); ++t)
        for (std::size_t s = 0; s < 2; ++s)
            CHECK(scaled.at(t, s) == doctest::Approx(unscaled.at(t, s)).epsilon(1e-12));
}

TEST_CASE("long sequences do not underflow") {
    const RenewalHmmModel m = default_model();
    std::mt19937_64 rng(13);
    std::exponential_distribution<double> gap(1e-4);
    std::vector<Observation> obs(1000000);
    for (auto& o : obs) o = {gap(rng), 1e-4, std::nullopt};
    const auto table = forward_backward(obs, m);
    REQUIRE(table.rows() == obs.size());
    for (std::size_t t = 0; t < table.rows(); t += 10007) {
        double sum = 0.0;
        for (std::size_t s = 0; s < 2; ++s) sum += table.at(t, s);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(std::isfinite(table.at(t, 0)));
    }
}

TEST_CASE("empty observation list gives an empty table") {
    const auto table = forward_backward(std::vector<Observation>{}, default_model());
    CHECK(table.rows() == 0);
}

TEST_CASE("inserting a short-gap observation does not lower neighbor posteriors") {
    // Regression property on a fixed configuration, not a theorem.
    const RenewalHmmModel m = default_model();
    std::vector<Observation> obs;
    for (int i = 0; i < 12; ++i) obs.push_back({300.0, 1e-4, std::nullopt});
    const auto before = forward_backward(obs, m);

    std::vector<Observation> denser = obs;
    denser.insert(denser.begin() + 6, Observation{40.0, 1e-4, std::nullopt});
    const auto after = forward_backward(denser, m);

    CHECK(after.track_mass(5) >= before.track_mass(5) - 1e-12);
    CHECK(after.track_mass(7) >= before.track_mass(6) - 1e-12);
}

TEST_CASE("merged exponential streams look like the summed rate") {
    // Superposition: merging gaps at rates a and b yields gaps at rate a+b.
    const double a = 1.0 / 360.0, b = 1e-3;
    std::mt19937_64 rng(4242);
    std::exponential_distribution<double> gap_a(a), gap_b(b);
    std::vector<double> events;
    double t = 0.0;
    while (events.size() < 6000) {
        t += gap_a(rng);
        events.push_back(t);
    }
    t = 0.0;
    std::vector<double> events_b;
    while (events_b.size() < 6000) {
        t += gap_b(rng);
        events_b.push_back(t);
    }
    const double horizon = std::min(events.back(), events_b.back());
    events.insert(events.end(), events_b.begin(), events_b.end());
    std::sort(events.begin(), events.end());
    std::vector<double> gaps;
    for (std::size_t i = 1; i < events.size() && events[i] < horizon; ++i)
        gaps.push_back(events[i] - events[i - 1]);

    const double rate = a + b;
    const double d = oracle::ks_statistic(
        gaps, [rate](double x) { return 1.0 - std::exp(-rate * x); });
    CHECK_FALSE(oracle::ks_reject_1pct(d, gaps.size()));
}

TEST_CASE("model validation rejects bad inputs") {
    RenewalHmmModel m = default_model();
    SUBCASE("column sum off") {
        m.at(0, 0) = 0.9;
        CHECK_THROWS_AS(validate_model(m), std::invalid_argument);
    }
    SUBCASE("negative entry") {
        m.at(0, 0) = 1.04;
        m.at(1, 0) = -0.04;
        CHECK_THROWS_AS(validate_model(m), std::invalid_argument);
    }
    SUBCASE("zero track mean") {
        m.track_mean = {0.0};
        CHECK_THROWS_AS(validate_model(m), std::invalid_argument);
    }
    SUBCASE("initial does not sum to one") {
        m.initial = {0.6, 0.6};
        CHECK_THROWS_AS(validate_model(m), std::invalid_argument);
    }
}
