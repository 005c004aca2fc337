#include <gtest/gtest.h>

#include "sstforge.hpp"

using namespace sstforge;

namespace {

std::string show(const Precongruence& pc, const std::vector<StateSet>& sets) {
    std::string out;
    for (auto s : sets) out += clique_name(pc, s) + " ";
    return out;
}

}  // namespace

TEST(Precongruence, RejectsRelationsThatAreNotTransitionClosed) {
    Dfa d({"0", "1", "2"}, {"a"});
    d.set(0, 0, 1);
    d.set(1, 0, 2);
    d.set(2, 0, 2);
    EXPECT_THROW(make_precongruence(d, {{0, 1}}), InputError);
    EXPECT_NO_THROW(make_precongruence(d, {{0, 1}, {1, 2}}));
    EXPECT_EQ(find_precongruence_violation(d, {0b011, 0b011, 0b100})->symbol, 0u);
}

TEST(Precongruence, RequiresACompleteBase) {
    Dfa d({"0"}, {"a"});
    EXPECT_THROW(make_precongruence(d, {}), InputError);
}

TEST(Precongruence, ThreeStateInstance) {
    const auto pc = fixtures::three_state_precongruence();
    EXPECT_TRUE(pc.compatible(0, 1));
    EXPECT_TRUE(pc.compatible(0, 2));
    EXPECT_FALSE(pc.compatible(1, 2));
    EXPECT_EQ(pc.incompatible_pairs(), (std::vector<std::pair<StateId, StateId>>{{1, 2}}));
    EXPECT_TRUE(pc.is_clique(0b011));
    EXPECT_FALSE(pc.is_clique(0b111));
}

TEST(SubsetExpansion, StatesAreTheCliques) {
    const auto pc = fixtures::three_state_precongruence();
    EXPECT_EQ(show(pc, all_cliques(pc)), "{0} {0,1} {0,2} {1} {2} ");
    const Nfa e = subset_expansion(pc);
    EXPECT_EQ(e.size(), 5u);
    EXPECT_EQ(e.initials.size(), 3u);
}

TEST(SubsetExpansion, IdentityHasSingletonsOnly) {
    const auto pc = identity_precongruence(fixtures::swap_left());
    const Nfa e = subset_expansion(pc);
    EXPECT_EQ(e.size(), 3u);
    EXPECT_EQ(e.initials.size(), 1u);
    EXPECT_TRUE(is_deterministic(e));
}

TEST(Refinement, EnumeratedDfasAreFiner) {
    const auto pc = fixtures::three_state_precongruence();
    const auto dfas = enumerate_finer_dfas(pc, 2);
    EXPECT_EQ(dfas.size(), 2u);
    for (const auto& d : dfas) EXPECT_TRUE(is_finer_than(d.dfa, pc));
}

TEST(Refinement, IdentityEnumerationContainsTheBase) {
    const Dfa base = fixtures::swap_left();
    const auto dfas = enumerate_finer_dfas(identity_precongruence(base), 3);
    bool found = false;
    for (const auto& d : dfas) found = found || isomorphic(d.dfa, base);
    EXPECT_TRUE(found);
}

TEST(Refinement, MinimalRefinementOfTheThreeStateInstance) {
    const auto pc = fixtures::three_state_precongruence();
    const auto res = minimal_refinement(pc);
    EXPECT_EQ(res.k_min, 2u);
    EXPECT_EQ(res.witnesses.size(), 2u);
    for (const auto& d : res.witnesses) {
        EXPECT_EQ(d.size(), 2u);
        EXPECT_TRUE(is_finer_than(d, pc));
    }
    EXPECT_FALSE(brute_force_refinement(pc, 1));
    EXPECT_TRUE(brute_force_refinement(pc, 2));
}

TEST(Refinement, IdentityOnAMinimalDfaNeedsAllStates) {
    const auto pc = identity_precongruence(fixtures::swap_left());
    EXPECT_EQ(minimal_refinement(pc).k_min, 3u);
    EXPECT_FALSE(brute_force_refinement(pc, 2));
}

TEST(Refinement, FullRelationNeedsOneState) {
    const Dfa base = fixtures::swap_left();
    const auto pc = make_precongruence(base, {{0, 1}, {0, 2}, {1, 2}});
    const auto res = minimal_refinement(pc);
    EXPECT_EQ(res.k_min, 1u);
    EXPECT_EQ(res.witnesses.size(), 1u);
}

TEST(Refinement, BruteForceGuard) {
    const auto pc = identity_precongruence(fixtures::swap_left());
    EXPECT_THROW(brute_force_refinement(pc, 5), ResourceError);
}

TEST(Refinement, ReachedSetsOfAWitness) {
    const auto pc = fixtures::three_state_precongruence();
    const auto res = minimal_refinement(pc);
    for (std::size_t i = 0; i < res.witnesses.size(); ++i) {
        EXPECT_EQ(res.reached[i], reached_sets(pc, res.witnesses[i]));
        for (auto s : res.reached[i]) EXPECT_TRUE(pc.is_clique(s));
    }
}

namespace {

// Sequential letter-to-letter: q0 -a/a-> q1, q0 -b/b-> q2, q1 -a/a-> q1,
// q2 -a/b-> q2; finals q1, q2.
Fst small_sequential() {
    Fst t;
    t.states = {"q0", "q1", "q2"};
    t.input_alphabet = fixtures::ab;
    t.output_alphabet = fixtures::ab;
    t.init[0] = {};
    t.trans[{0, 0, 1}] = {"a"};
    t.trans[{0, 1, 2}] = {"b"};
    t.trans[{1, 0, 1}] = {"a"};
    t.trans[{2, 0, 2}] = {"b"};
    t.final_out[1] = {};
    t.final_out[2] = {};
    return t;
}

}  // namespace

TEST(Extension, CompatibilityOfASequentialTransducer) {
    const Fst t = small_sequential();
    const auto pc = compat_letter_to_letter(t);
    EXPECT_EQ(pc.size(), 4u);  // plus the sink
    EXPECT_TRUE(pc.compatible(0, 1));
    EXPECT_FALSE(pc.compatible(1, 2));
    EXPECT_TRUE(pc.compatible(3, 1));
    EXPECT_TRUE(pc.compatible(3, 2));
}

TEST(Extension, PipelineBuildsASmallerTotalExtension) {
    const Fst t = small_sequential();
    const auto inst = extension_to_refinement(t, 2);
    const auto res = minimal_refinement(inst.pc);
    EXPECT_EQ(res.k_min, 2u);
    const Fst e = build_extended_transducer(t, res.witnesses[0]);
    EXPECT_EQ(e.size(), 2u);
    EXPECT_TRUE(e.is_sequential());
    EXPECT_FALSE(check_equal_on_domain_bounded(t, e, 8, AgreementMode::ExtendsFirst));
}

TEST(Extension, NonFinerAutomataAreRejectedWithTwoWords) {
    const Fst t = small_sequential();
    Dfa one({"x"}, fixtures::ab);
    one.set(0, 0, 0);
    one.set(0, 1, 0);
    EXPECT_THROW(build_extended_transducer(t, one), PreconditionError);
}

TEST(Extension, ReductionFromRefinementPreservesTheRelation) {
    const auto pc = fixtures::three_state_precongruence();
    const Fst t = refinement_to_extension(pc);
    EXPECT_TRUE(t.is_sequential());
    EXPECT_TRUE(t.is_letter_to_letter());
    const auto back = sequential_compat(t);
    for (StateId p = 0; p < pc.size(); ++p)
        for (StateId q = 0; q < pc.size(); ++q) EXPECT_EQ(back.pc.compatible(p, q), pc.compatible(p, q));
    EXPECT_EQ(minimal_refinement(back.pc).k_min, 2u);
}

TEST(Extension, RequiresLetterToLetterOrPrefixClosedDomain) {
    Fst t = small_sequential();
    t.trans[{0, 0, 1}] = chars("aa");
    t.final_out.erase(1);
    t.states.push_back("q3");
    t.trans[{1, 1, 3}] = {"a"};
    t.final_out[3] = {};
    EXPECT_FALSE(has_prefix_closed_domain(t));
    EXPECT_THROW(extension_to_refinement(t, 2), PreconditionError);
}
