#include <gtest/gtest.h>

#include "cowork/petri.hpp"
#include "cowork/scenario.hpp"
#include "oracles.hpp"

using namespace cowork;

namespace {

const Scenario& golden() {
    static const Scenario s = load_scenario(COWORK_SCENARIO_DIR "/workshop.yaml");
    return s;
}

// Random net with up to `np` places and `nt` transitions; roughly a third of
// place/transition pairs get an input arc and a third an output arc.
PetriNet random_net(Rng& rng, int np, int nt) {
    std::set<PlaceId> places;
    std::set<TransitionId> ts;
    for (int p = 1; p <= np; ++p) places.insert(p);
    for (int t = 0; t < nt; ++t) ts.insert("t" + std::to_string(t));
    ArcSet h, u;
    for (int p = 1; p <= np; ++p)
        for (const auto& t : ts) {
            if (rng.below(3) == 0) h.insert(Arc::input(p, t));
            if (rng.below(3) == 0) h.insert(Arc::output(t, p));
            if (rng.below(4) == 0) u.insert(Arc::input(p, t));
            if (rng.below(4) == 0) u.insert(Arc::output(t, p));
        }
    return PetriNet(places, ts, h, u);
}

}  // namespace

TEST(Petri, OutTransitionsExamples) {
    const PetriNet net({1, 2}, {"t1", "t2"}, {Arc::input(1, "t1"), Arc::input(1, "t2")}, {});
    EXPECT_EQ(out_transitions(net, 1, Agent::Human), (std::set<TransitionId>{"t1", "t2"}));
    EXPECT_TRUE(out_transitions(net, 2, Agent::Human).empty());
    EXPECT_TRUE(out_transitions(net, 1, Agent::Uas).empty());
    EXPECT_THROW(out_transitions(net, 3, Agent::Human), UnknownPlace);
}

TEST(Petri, GoldenOutTransitionsPerDestination) {
    const auto& net = golden().net;
    const auto ts = out_transitions(net, 1, Agent::Human);
    ASSERT_EQ(ts.size(), 3u);
    std::set<PlaceId> reached;
    for (const auto& t : ts)
        for (PlaceId q : net.outputs(t, Agent::Human)) reached.insert(q);
    EXPECT_EQ(reached, (std::set<PlaceId>{6, 11, 16}));
}

TEST(Petri, CyclicArcsExamples) {
    const ArcSet pair{Arc::input(1, "t"), Arc::output("t", 1)};
    EXPECT_EQ(cyclic_arcs(pair), pair);
    EXPECT_TRUE(cyclic_arcs(ArcSet{Arc::input(1, "t")}).empty());

    const ArcSet mixed{Arc::input(1, "w"), Arc::output("w", 1), Arc::input(1, "go"),
                       Arc::output("go", 2)};
    const PetriNet net({1, 2}, {"w", "go"}, mixed, {});
    EXPECT_EQ(cyclic_arcs(net), oracle::cyclic_pairs({1, 2}, {"w", "go"}, mixed));
    EXPECT_EQ(cyclic_arcs(net), (ArcSet{Arc::input(1, "w"), Arc::output("w", 1)}));
}

TEST(Petri, CyclicArcsMatchPairScanOnRandomNets) {
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const PetriNet net = random_net(rng, 1 + int(rng.below(6)), 1 + int(rng.below(4)));
        for (Agent who : {Agent::Human, Agent::Uas})
            EXPECT_EQ(net.cyclic(who),
                      oracle::cyclic_pairs(net.places(), net.transitions(), net.arcs(who)));
    }
}

TEST(Petri, GoldenNextStations) {
    const auto& net = golden().net;
    EXPECT_EQ(next_stations(net, 1, Agent::Human), (std::set<PlaceId>{6, 11, 16}));
    EXPECT_EQ(next_stations(net, 2, Agent::Human), (std::set<PlaceId>{7, 12, 17}));
    EXPECT_EQ(next_stations(net, 3, Agent::Human), (std::set<PlaceId>{8, 13, 18}));
    EXPECT_EQ(next_stations(net, 4, Agent::Human), (std::set<PlaceId>{9, 14, 19}));
    EXPECT_EQ(next_stations(net, 5, Agent::Human), (std::set<PlaceId>{10, 15, 20}));
    EXPECT_EQ(next_stations(net, 21, Agent::Uas), (std::set<PlaceId>{22}));
    for (PlaceId p = 6; p <= 20; ++p) EXPECT_TRUE(next_stations(net, p, Agent::Human).empty()) << p;
}

TEST(Petri, OnlyCyclicMeansNoNextStation) {
    const PetriNet net({1}, {"w"}, {Arc::input(1, "w"), Arc::output("w", 1)}, {});
    EXPECT_TRUE(next_stations(net, 1, Agent::Human).empty());
    EXPECT_EQ(classify_place(net, 1, Agent::Human), (std::set<ConstructKind>{ConstructKind::Cyclic}));
}

TEST(Petri, NextStationsNeverUseCyclicArcs) {
    Rng rng(8);
    for (int i = 0; i < 300; ++i) {
        const PetriNet net = random_net(rng, 1 + int(rng.below(6)), 1 + int(rng.below(4)));
        for (Agent who : {Agent::Human, Agent::Uas}) {
            const auto cyc = oracle::cyclic_pairs(net.places(), net.transitions(), net.arcs(who));
            for (PlaceId p : net.places()) {
                // Expected set: outputs of p's transitions through non-cyclic arcs.
                std::set<PlaceId> want;
                for (const Arc& in : net.arcs(who)) {
                    if (in.place != p || in.dir != Arc::Dir::PlaceToTransition) continue;
                    for (const Arc& out : net.arcs(who))
                        if (out.transition == in.transition &&
                            out.dir == Arc::Dir::TransitionToPlace && !cyc.count(out))
                            want.insert(out.place);
                }
                EXPECT_EQ(next_stations(net, p, who), want);
            }
        }
    }
}

TEST(Petri, ClassifyExamples) {
    const auto& net = golden().net;
    EXPECT_TRUE(classify_place(net, 3, Agent::Human).count(ConstructKind::Conflict));
    EXPECT_TRUE(classify_place(net, 21, Agent::Uas).count(ConstructKind::Sequential));
    EXPECT_TRUE(classify_place(net, 8, Agent::Human).count(ConstructKind::Cyclic));

    const PetriNet chain({1, 2}, {"t"}, {Arc::input(1, "t"), Arc::output("t", 2)}, {});
    EXPECT_EQ(classify_place(chain, 1, Agent::Human),
              (std::set<ConstructKind>{ConstructKind::Sequential}));

    const PetriNet dep({1, 2, 3}, {"t"},
                       {Arc::input(1, "t"), Arc::input(2, "t"), Arc::output("t", 3)}, {});
    EXPECT_TRUE(classify_place(dep, 1, Agent::Human).count(ConstructKind::Dependency));
    EXPECT_TRUE(classify_place(dep, 2, Agent::Human).count(ConstructKind::Dependency));
    EXPECT_FALSE(classify_place(dep, 3, Agent::Human).count(ConstructKind::Dependency));

    const PetriNet conc({1, 2, 3}, {"t"},
                        {Arc::input(1, "t"), Arc::output("t", 2), Arc::output("t", 3)}, {});
    const auto k = classify_place(conc, 1, Agent::Human);
    EXPECT_TRUE(k.count(ConstructKind::Concurrency));
    EXPECT_TRUE(k.count(ConstructKind::Conflict));
    EXPECT_THROW(classify_place(conc, 4, Agent::Human), UnknownPlace);
}

TEST(Petri, ConflictIffSeveralNextStations) {
    Rng rng(99);
    for (int i = 0; i < 300; ++i) {
        const PetriNet net = random_net(rng, 1 + int(rng.below(6)), 1 + int(rng.below(4)));
        for (PlaceId p : net.places())
            EXPECT_EQ(classify_place(net, p, Agent::Human).count(ConstructKind::Conflict) == 1,
                      next_stations(net, p, Agent::Human).size() > 1);
    }
}

TEST(Petri, CanFireExamples) {
    const PetriNet net({1, 2, 3}, {"t", "d"},
                       {Arc::input(1, "t"), Arc::output("t", 2), Arc::input(1, "d"),
                        Arc::input(2, "d"), Arc::output("d", 3)},
                       {});
    Marking m;
    m.tokens_h[1] = 1;
    EXPECT_TRUE(can_fire(net, m, "t", Agent::Human));
    EXPECT_FALSE(can_fire(net, m, "d", Agent::Human));
    m.tokens_h[1] = 0;
    EXPECT_FALSE(can_fire(net, m, "t", Agent::Human));
    EXPECT_THROW(can_fire(net, m, "nope", Agent::Human), UnknownTransition);
}

TEST(Petri, FireExamples) {
    const PetriNet chain({1, 2}, {"t"}, {Arc::input(1, "t"), Arc::output("t", 2)},
                         {Arc::input(1, "t"), Arc::output("t", 2)});
    Marking m;
    m.tokens_h[1] = 1;
    m.tokens_u[1] = 1;
    const Marking n = fire(chain, m, "t", Agent::Human);
    EXPECT_EQ(n.get(1, Agent::Human), 0);
    EXPECT_EQ(n.get(2, Agent::Human), 1);
    EXPECT_EQ(n.tokens_u, m.tokens_u);

    const PetriNet loop({1}, {"w"}, {Arc::input(1, "w"), Arc::output("w", 1)}, {});
    Marking one;
    one.tokens_h[1] = 1;
    EXPECT_EQ(fire(loop, one, "w", Agent::Human), one);

    const PetriNet conc({1, 2, 3}, {"t"},
                        {Arc::input(1, "t"), Arc::output("t", 2), Arc::output("t", 3)}, {});
    const Marking c = fire(conc, one, "t", Agent::Human);
    EXPECT_EQ(c.get(1, Agent::Human), 0);
    EXPECT_EQ(c.get(2, Agent::Human), 1);
    EXPECT_EQ(c.get(3, Agent::Human), 1);

    EXPECT_THROW(fire(chain, Marking{}, "t", Agent::Human), NotEnabled);
}

TEST(Petri, FireNeverGoesNegative) {
    Rng rng(3);
    for (int trial = 0; trial < 12; ++trial) {
        const int np = 1 + trial % 6;
        const PetriNet net = random_net(rng, np, 1 + int(rng.below(3)));
        int total = 1;
        for (int i = 0; i < np; ++i) total *= 4;
        for (int code = 0; code < total; ++code) {
            Marking m;
            int c = code;
            for (int p = 1; p <= np; ++p, c /= 4) {
                m.tokens_h[p] = c % 4;
                m.tokens_u[p] = (c / 2) % 4;
            }
            for (Agent who : {Agent::Human, Agent::Uas})
                for (const auto& t : net.transitions()) {
                    if (!can_fire(net, m, t, who)) {
                        EXPECT_THROW(fire(net, m, t, who), NotEnabled);
                        continue;
                    }
                    const Marking n = fire(net, m, t, who);
                    for (const auto& [p, v] : n.tokens_h) ASSERT_GE(v, 0);
                    for (const auto& [p, v] : n.tokens_u) ASSERT_GE(v, 0);
                }
        }
    }
}

TEST(Petri, Rule4Examples) {
    auto at_one = [](int u, int h) {
        Marking m;
        m.tokens_u[1] = u;
        m.tokens_h[1] = h;
        return check_rule4(m);
    };
    EXPECT_TRUE(at_one(1, 1).empty());
    EXPECT_EQ(at_one(1, 2), (std::vector<PlaceId>{1}));
    EXPECT_TRUE(at_one(0, 5).empty());
    EXPECT_TRUE(at_one(2, 0).empty());
    EXPECT_EQ(at_one(3, 0), (std::vector<PlaceId>{1}));
}

TEST(Petri, Rule4TruthTable) {
    for (int u = 0; u <= 3; ++u)
        for (int h = 0; h <= 3; ++h) {
            Marking m;
            m.tokens_u[4] = u;
            m.tokens_h[4] = h;
            const bool want = u == 0 ? false : u + h <= 2 ? false : true;
            EXPECT_EQ(!check_rule4(m).empty(), want) << "M_U=" << u << " M_H=" << h;
        }
}

TEST(Petri, UndeclaredReferencesRejected) {
    EXPECT_THROW(PetriNet({1}, {"t"}, {Arc::input(2, "t")}, {}), ValidationError);
    EXPECT_THROW(PetriNet({1}, {"t"}, {}, {Arc::output("x", 1)}), ValidationError);
}

TEST(Petri, WeightsAreOne) {
    const auto& net = golden().net;
    for (Agent who : {Agent::Human, Agent::Uas})
        for (const Arc& a : net.arcs(who)) EXPECT_EQ(net.weight(a, who), 1);
}
