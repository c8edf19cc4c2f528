#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "esum/bounds.hpp"

using namespace esum;

TEST_CASE("exponent schedule values and recurrence, r = 1..64") {
    for (int r = 1; r <= 64; ++r) {
        const auto s = ExponentSchedule::for_r(r);
        REQUIRE(s.beta[0] == Rat(1));
        REQUIRE(s.beta[1] == Rat(2 + 2 * r, 3 + 2 * r));
        REQUIRE(s.beta[2] == Rat(2 * r - 1, 2 * r));
        REQUIRE(s.gamma[0] == Rat(1, 2 * r));
        REQUIRE(s.delta[0] == -Rat(1, 2 * r));
        REQUIRE(s.delta[2] == Rat(1, 2 * r));
        // delta_2 = 1 - beta_2
        REQUIRE(s.delta[2] == Rat(1) - s.beta[2]);
        if (r < 64) {
            const auto next = ExponentSchedule::for_r(r + 1);
            for (int j = 0; j < 3; ++j)
                REQUIRE(ExponentSchedule::beta_step(s.beta[j], s.gamma[j]) ==
                        next.beta[j]);
        }
    }
}

TEST_CASE("beta_1 and beta_2 increase in r") {
    for (int r = 1; r < 64; ++r) {
        const auto a = ExponentSchedule::for_r(r);
        const auto b = ExponentSchedule::for_r(r + 1);
        REQUIRE(a.beta[1] < b.beta[1]);
        REQUIRE(a.beta[2] < b.beta[2]);
    }
}

TEST_CASE("improvement deltas are exact") {
    REQUIRE(Rat(16, 17) - Rat(6, 7) == Rat(10, 119));
    REQUIRE(Rat(7, 8) - Rat(3, 4) == Rat(1, 8));
}

TEST_CASE("r = 1 family specializes to the single-sum bound") {
    const auto general = envelope_for("1.1", {.r = 1});
    const auto vinogradov = envelope_for("1.2");
    REQUIRE(general.terms.size() == vinogradov.terms.size());
    for (std::size_t i = 0; i < general.terms.size(); ++i) {
        REQUIRE(general.terms[i].beta == vinogradov.terms[i].beta);
        REQUIRE(general.terms[i].delta == vinogradov.terms[i].delta);
        REQUIRE(general.terms[i].lam == vinogradov.terms[i].lam);
        REQUIRE(general.terms[i].coeff == vinogradov.terms[i].coeff);
    }
    // identical values once Upsilon = 1
    const auto a = evaluate(general, 1e5, 37, 1.0);
    const auto b = evaluate(vinogradov, 1e5, 37, 1.0);
    REQUIRE(a.value == Catch::Approx(b.value).epsilon(1e-15));
}

TEST_CASE("transcribed term lists") {
    const auto s2 = envelope_for("1.4-S2");
    REQUIRE(s2.terms.size() == 3);
    REQUIRE(s2.terms[0].beta == Rat(1));
    REQUIRE(s2.terms[0].gamma == Rat(1, 4));
    REQUIRE(s2.terms[0].delta == Rat(-1, 4));
    REQUIRE(s2.terms[0].lam == Rat(5, 2));
    REQUIRE(s2.terms[1].beta == Rat(6, 7));
    REQUIRE(s2.terms[1].lam == Rat(19, 7));
    REQUIRE(s2.terms[2].beta == Rat(3, 4));
    REQUIRE(s2.terms[2].delta == Rat(1, 4));
    REQUIRE(s2.terms[2].lam == Rat(5, 2));

    const auto s3 = envelope_for("1.4-S3");
    REQUIRE(s3.terms[0].gamma == Rat(1, 6));
    REQUIRE(s3.terms[1].beta == Rat(8, 9));
    REQUIRE(s3.terms[1].lam == Rat(23, 9));
    REQUIRE(s3.terms[2].beta == Rat(5, 6));

    const auto m8 = envelope_for("1.8");
    REQUIRE(m8.terms.size() == 3);
    REQUIRE(m8.terms[0].beta == Rat(1));
    REQUIRE(m8.terms[0].delta == Rat(-1));
    REQUIRE(m8.terms[0].lam == Rat(1));
    REQUIRE(m8.terms[1].beta == Rat(8, 13));
    REQUIRE(m8.terms[1].lam == Rat(37, 13));
    REQUIRE(m8.terms[2].beta == Rat(0));
    REQUIRE(m8.terms[2].delta == Rat(1));
    REQUIRE(m8.terms[2].lam == Rat(1));

    // quadratic-phase bound carries log q factors
    const auto m9 = envelope_for("1.9");
    REQUIRE(m9.terms[1].lam_logq == Rat(1, 2));
    REQUIRE(m9.terms[2].lam_logq == Rat(1, 4));
}

TEST_CASE("comparison-only envelopes evaluate") {
    // historical global-prefactor bound and the six-term legacy S_3 bound;
    // transcribed for side-by-side plots, no sharper claims attached.
    const auto hist = envelope_for("1.3");
    REQUIRE(hist.terms.size() == 3);
    for (const auto& t : hist.terms) REQUIRE(t.gamma == Rat(1));
    const auto at2 = evaluate(hist, 1e5, 11, 2.0);
    const auto at1 = evaluate(hist, 1e5, 11, 1.0);
    REQUIRE(at2.value == Catch::Approx(2.0 * at1.value).epsilon(1e-12));
    REQUIRE_FALSE(evaluate(hist, 1e5, 11, 0.5).in_regime);

    const auto legacy = envelope_for("legacy-s3");
    REQUIRE(legacy.terms.size() == 6);
    const auto v = evaluate(legacy, 1e5, 11, 2.0);
    REQUIRE(v.value > 0.0);
    // strictly weaker than the direct three-term S_3 bound at this point
    const auto direct = evaluate(envelope_for("1.4-S3"), 1e5, 11, 2.0);
    REQUIRE(v.value > direct.value);

    const auto weyl = envelope_for("5.1", {.k = 3});
    REQUIRE(weyl.terms.size() == 4);
    REQUIRE(evaluate(weyl, 1e4, 7, 1.0).value > 0.0);
    const auto quad = envelope_for("5.2");
    REQUIRE(evaluate(quad, 1e4, 7, 1.0).value > 0.0);
    const auto poly3 = envelope_for("5.3", {.k = 3});
    const auto poly5 = envelope_for("5.3", {.k = 5});
    REQUIRE(evaluate(poly3, 1e4, 7, 1.0).value > 0.0);
    REQUIRE(evaluate(poly5, 1e4, 7, 1.0).value > 0.0);
    const auto abstract = envelope_for("2.4", {.r = 2, .eta = Rat(1)});
    REQUIRE(abstract.terms[0].lam == Rat(5));  // 3 + r*eta
    const auto tau_bounded = envelope_for("4.2", {.r = 3});
    REQUIRE(tau_bounded.terms[0].lam == Rat(9));  // max(r^2, 3)
}

TEST_CASE("envelope_for rejects unknown or underspecified requests") {
    REQUIRE_THROWS_AS(envelope_for("9.99"), std::invalid_argument);
    REQUIRE_THROWS_AS(envelope_for("1.1"), std::invalid_argument);   // needs r
    REQUIRE_THROWS_AS(envelope_for("5.1"), std::invalid_argument);   // needs k
    REQUIRE_THROWS_AS(envelope_for("5.3", {.k = 2}), std::invalid_argument);
}

TEST_CASE("evaluate: dominant regimes and Upsilon clamp") {
    const auto env = envelope_for("1.2");
    const auto at_qX = evaluate(env, 1e6, 1e6, 1.0);
    REQUIRE(at_qX.dominant_term == 2);  // X^{1/2} q^{1/2} wins at q = X

    const auto u0 = evaluate(env, 1e5, 11, 0.0);
    const auto u1 = evaluate(env, 1e5, 11, 1.0);
    const auto uhalf = evaluate(env, 1e5, 11, 0.5);
    REQUIRE(u0.value == u1.value);
    REQUIRE(uhalf.value == u1.value);

    // direct arithmetic of the three-term sum
    const double X = 1e6, q = 1e3, L = std::log(X);
    const auto s2 = evaluate(envelope_for("1.4-S2"), X, q, 1.0);
    const double expect = X * std::pow(q, -0.25) * std::pow(L, 2.5) +
                          std::pow(X, 6.0 / 7) * std::pow(L, 19.0 / 7) +
                          std::pow(X, 0.75) * std::pow(q, 0.25) * std::pow(L, 2.5);
    REQUIRE(s2.value == Catch::Approx(expect).epsilon(1e-14));
    REQUIRE(s2.in_regime);

    // out-of-regime points still evaluate, flagged
    const auto oor = evaluate(envelope_for("1.1", {.r = 2}), 100.0, 1000, 1.0);
    REQUIRE_FALSE(oor.in_regime);
    REQUIRE(oor.value > 0.0);
}

TEST_CASE("envelope monotone nondecreasing in X") {
    for (const char* id : {"1.2", "1.4-S2", "1.8"}) {
        const auto env = envelope_for(id);
        double prev = 0.0;
        for (double X = 2.0; X < 1e7; X *= 1.7) {
            const double v = evaluate(env, X, 17, 1.0).value;
            REQUIRE(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("minmax optimizer on the symmetric crossing") {
    const auto res = minmax_optimize([](double x) { return 1.0 / x; },
                                     {[](double x) { return x; }}, 1e9);
    REQUIRE(res.x_star == Catch::Approx(1.0).epsilon(1e-10));
    REQUIRE(res.value == Catch::Approx(1.0).epsilon(1e-10));
    REQUIRE_FALSE(res.cap_binding);
}

TEST_CASE("minmax optimizer recovers the closed-form cut points") {
    const double X = 1e6, q = 997.0, L = std::log(X);
    auto F = [&](double u) { return X / std::sqrt(u) / L; };

    SECTION("two-fold system") {
        const std::vector<std::function<double(double)>> Gs = {
            [&](double u) { return X * std::sqrt(u) / std::sqrt(q); },
            [&](double u) { return std::pow(X, 0.8) * std::pow(u, 0.2); },
            [&](double u) { return std::sqrt(X * q * u); },
        };
        const auto res = minmax_optimize(F, Gs, X);
        const double n0 = std::sqrt(q) / L;
        const double n1 = std::pow(X, 2.0 / 7) * std::pow(L, -10.0 / 7);
        const double n2 = std::sqrt(X) / (std::sqrt(q) * L);
        REQUIRE(res.roots[0] == Catch::Approx(n0).epsilon(1e-6));
        REQUIRE(res.roots[1] == Catch::Approx(n1).epsilon(1e-6));
        REQUIRE(res.roots[2] == Catch::Approx(n2).epsilon(1e-6));
        REQUIRE(res.x_star == Catch::Approx(std::min({n0, n1, n2})).epsilon(1e-6));
        REQUIRE(res.value == Catch::Approx(F(res.x_star)).epsilon(1e-9));
    }

    SECTION("three-fold system") {
        const std::vector<std::function<double(double)>> Gs = {
            [&](double u) {
                return X * std::pow(q, -0.25) * std::pow(u, 0.25) * std::pow(L, 2.5 - 3.0);
            },
            [&](double u) {
                return std::pow(X, 6.0 / 7) * std::pow(u, 1.0 / 7) *
                       std::pow(L, 19.0 / 7 - 3.0);
            },
            [&](double u) {
                return std::pow(X, 0.75) * std::pow(q, 0.25) * std::pow(u, 0.25) *
                       std::pow(L, 2.5 - 3.0);
            },
        };
        const auto res = minmax_optimize(F, Gs, X);
        REQUIRE(res.roots[0] ==
                Catch::Approx(std::pow(q, 1.0 / 3) * std::pow(L, -2.0 / 3)).epsilon(1e-6));
        REQUIRE(res.roots[1] ==
                Catch::Approx(std::pow(X, 2.0 / 9) * std::pow(L, -10.0 / 9)).epsilon(1e-6));
        REQUIRE(res.roots[2] ==
                Catch::Approx(std::pow(X, 1.0 / 3) * std::pow(q, -1.0 / 3) *
                              std::pow(L, -2.0 / 3))
                    .epsilon(1e-6));
    }
}

TEST_CASE("minmax optimizer certifies the min of the max") {
    const double X = 1e6, q = 997.0, L = std::log(X);
    auto F = [&](double u) { return X / std::sqrt(u) / L; };
    const std::vector<std::function<double(double)>> Gs = {
        [&](double u) { return X * std::sqrt(u) / std::sqrt(q); },
        [&](double u) { return std::pow(X, 0.8) * std::pow(u, 0.2); },
        [&](double u) { return std::sqrt(X * q * u); },
    };
    const auto res = minmax_optimize(F, Gs, X);
    auto H = [&](double u) {
        double g = 0.0;
        for (const auto& G : Gs) g = std::max(g, G(u));
        return std::max(F(u), g);
    };
    double gmax = 0.0;
    for (const auto& G : Gs) gmax = std::max(gmax, G(res.x_star));
    REQUIRE(std::abs(F(res.x_star) - gmax) <= 1e-9 * F(res.x_star));
    for (int i = 0; i < 1000; ++i) {
        const double u = std::exp(-5.0 + 20.0 * i / 999.0);
        REQUIRE(res.value <= H(u) * (1 + 1e-9));
    }
}

TEST_CASE("minmax optimizer reports bracket failure") {
    // G never crosses F inside [1e-12, 1e18]
    REQUIRE_THROWS_AS(
        minmax_optimize([](double x) { return 1.0 / x; },
                        {[](double x) { return 1e-40 * std::sqrt(x); }}, 1e9),
        std::runtime_error);
}

TEST_CASE("empirical ratio at alpha = 0 and determinism") {
    const auto env = envelope_for("1.2");
    std::vector<std::pair<double, double>> samples{{0.0, 1e4}, {0.271, 1e4},
                                                   {0.271, 1e4}};
    const auto stats = empirical_ratio({Fn::one_p, 1}, env, samples);
    REQUIRE(stats.samples.size() == 3);
    // alpha = 0: |S| = pi(X) and the envelope at q = 1 is at least X log^3 X
    REQUIRE(stats.samples[0].q == 1);
    REQUIRE(stats.samples[0].ratio <= 1.0);
    // duplicates give identical ratios
    REQUIRE(stats.samples[1].ratio == stats.samples[2].ratio);
    REQUIRE(stats.max_ratio >= stats.min_ratio);
}
