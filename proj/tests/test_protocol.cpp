#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <array>
#include <vector>

#include "ecasim/protocol.hpp"

using namespace ecasim;

TEST_CASE("contention window doubles per stage") {
    ProtocolParams p{32, 5};
    CHECK(cw(p, 0) == 32);
    CHECK(cw(p, 3) == 256);
    CHECK(cw(ProtocolParams{16, 5}, 1) == 32);
    CHECK(cw(p, 5) == 1024);
}

TEST_CASE("random backoff stays inside the window") {
    ProtocolParams p{32, 5};
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        int b = sample_random_backoff(p, 0, rng);
        CHECK(b >= 0);
        CHECK(b < 32);
    }
    ProtocolParams tiny{2, 0};
    for (int i = 0; i < 100; ++i) {
        int b = sample_random_backoff(tiny, 0, rng);
        CHECK((b == 0 || b == 1));
    }
}

TEST_CASE("random backoff is uniform (chi-square, 1e6 draws)") {
    ProtocolParams p{32, 5};
    Rng rng(20240901);
    const int draws = 1000000;
    std::array<int, 32> bins{};
    for (int i = 0; i < draws; ++i) ++bins[static_cast<std::size_t>(sample_random_backoff(p, 0, rng))];
    const double expected = draws / 32.0;
    double stat = 0.0;
    for (int count : bins) {
        const double d = count - expected;
        stat += d * d / expected;
    }
    boost::math::chi_squared chi2(31);
    CHECK(stat < boost::math::quantile(chi2, 0.99));
}

TEST_CASE("deterministic backoff") {
    ProtocolParams p{32, 5};
    CHECK(deterministic_backoff(p, Variant::CsmaEca, 4) == 16);
    CHECK(deterministic_backoff(p, Variant::EcaHysteresis, 2) == 64);
    CHECK(deterministic_backoff(p, Variant::EcaHysteresis, 0) == 16);
    CHECK(deterministic_backoff(p, Variant::EcaHysteresisFairShare, 3) == 128);
}

TEST_CASE("on_success per variant") {
    ProtocolParams p{32, 5};
    Rng rng(1);

    NodeState s;
    s.stage = 3;
    s.backoff = 9;

    SUBCASE("csma/ca resets and redraws") {
        NodeState out = on_success(s, p, Variant::CsmaCa, rng);
        CHECK(out.stage == 0);
        CHECK(out.backoff >= 0);
        CHECK(out.backoff < 32);
        CHECK(out.pending_burst == 1);
    }
    SUBCASE("csma/eca resets to CW_min/2") {
        NodeState out = on_success(s, p, Variant::CsmaEca, rng);
        CHECK(out.stage == 0);
        CHECK(out.backoff == 16);
        CHECK(out.pending_burst == 1);
    }
    SUBCASE("hysteresis keeps the stage") {
        NodeState out = on_success(s, p, Variant::EcaHysteresis, rng);
        CHECK(out.stage == 3);
        CHECK(out.backoff == 128);
        CHECK(out.pending_burst == 1);
    }
    SUBCASE("fair-share bursts 2^k") {
        NodeState s2;
        s2.stage = 2;
        NodeState out = on_success(s2, p, Variant::EcaHysteresisFairShare, rng);
        CHECK(out.stage == 2);
        CHECK(out.backoff == 64);
        CHECK(out.pending_burst == 4);
    }
}

TEST_CASE("eca on_success consumes no randomness") {
    ProtocolParams p{32, 5};
    Rng rng(42);
    Rng before = rng;
    NodeState s;
    s.stage = 3;
    on_success(s, p, Variant::CsmaEca, rng);
    CHECK(rng == before);
    on_success(s, p, Variant::EcaHysteresis, rng);
    CHECK(rng == before);
}

TEST_CASE("on_collision doubles the window up to the cap") {
    ProtocolParams p{32, 5};
    Rng rng(3);

    NodeState s;
    NodeState out = on_collision(s, p, Variant::CsmaCa, rng);
    CHECK(out.stage == 1);
    CHECK(out.backoff >= 0);
    CHECK(out.backoff < 64);

    NodeState capped;
    capped.stage = 5;
    out = on_collision(capped, p, Variant::CsmaCa, rng);
    CHECK(out.stage == 5);
    CHECK(out.backoff < 1024);

    NodeState fs;
    fs.stage = 1;
    fs.pending_burst = 2;
    out = on_collision(fs, p, Variant::EcaHysteresisFairShare, rng);
    CHECK(out.stage == 2);
    CHECK(out.pending_burst == 4);
}

TEST_CASE("empty slot decrements the counter") {
    NodeState s;
    s.backoff = 5;
    CHECK(on_empty_slot(s).backoff == 4);
    s.backoff = 1;
    CHECK(on_empty_slot(s).backoff == 0);
    s.backoff = 16;
    for (int i = 0; i < 16; ++i) s = on_empty_slot(s);
    CHECK(s.backoff == 0);
}

TEST_CASE("transmission readiness") {
    NodeState s;
    s.backoff = 0;
    CHECK(wants_to_transmit(s));
    s.backoff = 1;
    CHECK(!wants_to_transmit(s));

    ProtocolParams p{32, 5};
    Rng rng(1);
    NodeState fresh = on_success(NodeState{}, p, Variant::CsmaEca, rng);
    CHECK(!wants_to_transmit(fresh));
    CHECK(fresh.backoff == 16);
}

// Drive each variant through random event sequences and check the state
// invariants after every transition.
TEST_CASE("state invariants under random event sequences") {
    ProtocolParams p{32, 5};
    for (Variant v : {Variant::CsmaCa, Variant::CsmaEca, Variant::EcaHysteresis,
                      Variant::EcaHysteresisFairShare}) {
        Rng rng(99);
        Rng events(1234);
        NodeState s;
        s.backoff = sample_random_backoff(p, 0, rng);
        int prev_stage = 0;
        for (int i = 0; i < 20000; ++i) {
            if (s.backoff == 0) {
                if (events() % 2 == 0)
                    s = on_success(s, p, v, rng);
                else
                    s = on_collision(s, p, v, rng);
            } else {
                s = on_empty_slot(s);
            }
            CHECK(s.stage >= 0);
            CHECK(s.stage <= p.max_stage);
            CHECK(s.backoff >= 0);
            CHECK(s.backoff < cw(p, s.stage));
            if (v == Variant::EcaHysteresisFairShare)
                CHECK(s.pending_burst == (1 << s.stage));
            else
                CHECK(s.pending_burst == 1);
            if (uses_hysteresis(v)) CHECK(s.stage >= prev_stage);
            prev_stage = s.stage;
        }
    }
}

TEST_CASE("transitions are pure functions of their inputs") {
    ProtocolParams p{32, 5};
    for (Variant v : {Variant::CsmaCa, Variant::CsmaEca, Variant::EcaHysteresis,
                      Variant::EcaHysteresisFairShare}) {
        Rng a(5), b(5);
        NodeState s;
        s.stage = 2;
        s.pending_burst = burst_for_stage(v, 2);
        NodeState out_a = on_collision(s, p, v, a);
        NodeState out_b = on_collision(s, p, v, b);
        CHECK(out_a.backoff == out_b.backoff);
        CHECK(out_a.stage == out_b.stage);
        CHECK(out_a.pending_burst == out_b.pending_burst);
        out_a = on_success(s, p, v, a);
        out_b = on_success(s, p, v, b);
        CHECK(out_a.backoff == out_b.backoff);
        CHECK(out_a.stage == out_b.stage);
    }
}
