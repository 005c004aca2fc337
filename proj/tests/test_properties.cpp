#include <gtest/gtest.h>

#include "sstforge.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace sstforge;
namespace gen = sstforge::testing;

TEST(Properties, MinimalRefinementMatchesBruteForce) {
    gen::Rng rng(1101);
    for (int i = 0; i < 40; ++i) {
        const auto pc = gen::random_precongruence(rng, gen::pick(rng, 1, 4), fixtures::ab);
        const auto res = minimal_refinement(pc);
        ASSERT_LE(res.k_min, 4u);
        EXPECT_TRUE(brute_force_refinement(pc, res.k_min)) << "instance " << i;
        if (res.k_min > 1) EXPECT_FALSE(brute_force_refinement(pc, res.k_min - 1)) << "instance " << i;
        for (const auto& d : res.witnesses) {
            EXPECT_EQ(d.size(), res.k_min);
            EXPECT_TRUE(is_finer_than(d, pc));
        }
    }
}

TEST(Properties, EnumeratedDfasAreFinerAndDistinct) {
    gen::Rng rng(1102);
    for (int i = 0; i < 25; ++i) {
        const auto pc = gen::random_precongruence(rng, gen::pick(rng, 2, 4), fixtures::ab);
        const auto dfas = enumerate_finer_dfas(pc, 2);
        for (std::size_t a = 0; a < dfas.size(); ++a) {
            EXPECT_TRUE(is_finer_than(dfas[a].dfa, pc));
            for (std::size_t b = a + 1; b < dfas.size(); ++b) EXPECT_FALSE(dfas[a].dfa == dfas[b].dfa);
        }
    }
}

TEST(Properties, CompatibilityIsAPrecongruence) {
    gen::Rng rng(1103);
    for (int i = 0; i < 40; ++i) {
        const Fst t = gen::random_letter_to_letter(rng, gen::pick(rng, 1, 4));
        const auto pc = compat_letter_to_letter(t);
        std::vector<StateSet> rows(pc.size());
        for (StateId p = 0; p < pc.size(); ++p) {
            EXPECT_TRUE(pc.compatible(p, p));
            for (StateId q = 0; q < pc.size(); ++q) {
                EXPECT_EQ(pc.compatible(p, q), pc.compatible(q, p));
                if (pc.compatible(p, q)) rows[p] |= StateSet{1} << q;
            }
        }
        EXPECT_FALSE(find_precongruence_violation(pc.base, rows));
    }
}

TEST(Properties, ExtensionPipelineMatchesTheProductSearch) {
    gen::Rng rng(1104);
    for (int i = 0; i < 30; ++i) {
        const Fst t = gen::random_letter_to_letter(rng, gen::pick(rng, 1, 3));
        const auto inst = extension_to_refinement(t, t.size());
        const auto res = minimal_refinement(inst.pc);
        EXPECT_EQ(res.k_min, gen::min_extension_states(t)) << "instance " << i;
        const Fst e = build_extended_transducer(t, res.witnesses[0]);
        EXPECT_FALSE(check_equal_on_domain_bounded(t, e, 7, AgreementMode::ExtendsFirst)) << "instance " << i;
    }
}

TEST(Properties, DomainCheckAgreesWithEnumeration) {
    gen::Rng rng(1105);
    for (int i = 0; i < 60; ++i) {
        const Asst s = gen::random_partial_asst(rng, gen::pick(rng, 1, 3), gen::pick(rng, 1, 2));
        const auto res = check_domain_is_underlying_language(s);
        const bool bounded = gen::domain_matches_bounded(s, 8);
        if (res.domain_is_underlying_language) EXPECT_TRUE(bounded) << "instance " << i;
        if (!bounded) EXPECT_FALSE(res.domain_is_underlying_language) << "instance " << i;
        if (!res.domain_is_underlying_language) EXPECT_TRUE(res.witness);
    }
}

TEST(Properties, RunExpansionPreservesTheFunction) {
    gen::Rng rng(1106);
    for (int i = 0; i < 40; ++i) {
        const Asst s = gen::random_partial_asst(rng, gen::pick(rng, 1, 3), gen::pick(rng, 1, 3));
        const Fst t = asst_to_fst(s);
        EXPECT_FALSE(non_functional_witness(t, 5));
        EXPECT_FALSE(first_disagreement(as_function(s), as_function(t), fixtures::ab, 6)) << "instance " << i;
    }
}

TEST(Properties, MachineFilesRoundTrip) {
    gen::Rng rng(1107);
    for (int i = 0; i < 30; ++i) {
        const Machine a = gen::random_partial_asst(rng, gen::pick(rng, 1, 4), gen::pick(rng, 1, 3));
        EXPECT_TRUE(parse_machine_text(machine_file(a).dump()) == a);
        const Machine t = gen::random_letter_to_letter(rng, gen::pick(rng, 1, 4));
        EXPECT_TRUE(parse_machine_text(machine_file(t).dump()) == t);
        const Machine pc = gen::random_precongruence(rng, gen::pick(rng, 1, 4), fixtures::ab);
        EXPECT_TRUE(parse_machine_text(machine_file(pc).dump()) == pc);
        const Machine g = gen::random_graph(rng, gen::pick(rng, 1, 5));
        EXPECT_TRUE(parse_machine_text(machine_file(g).dump()) == g);
    }
}

TEST(Properties, LargerThresholdsNeverAddClasses) {
    gen::Rng rng(1108);
    for (int i = 0; i < 10; ++i) {
        const Asst s = gen::random_partial_asst(rng, 2, 2);
        const FunctionOracle f("random", s.input_alphabet, s.output_alphabet, as_function(s));
        for (Side side : {Side::left, Side::right}) {
            std::size_t prev = detail::syntactic_classes(f, side, 3, 1).size();
            for (std::size_t D = 2; D <= 5; ++D) {
                const std::size_t now = detail::syntactic_classes(f, side, 3, D).size();
                EXPECT_LE(now, prev) << "instance " << i;
                prev = now;
            }
        }
    }
}

TEST(Properties, FixedOutputConversionsPreserveTheFunction) {
    gen::Rng rng(1109);
    int converted = 0;
    for (int i = 0; i < 60; ++i) {
        const Asst s = gen::random_partial_asst(rng, gen::pick(rng, 1, 3), gen::pick(rng, 1, 2), 0.0);
        if (!s.fixed_output_register()) continue;
        const auto b = asst_to_async_bimachine(s);
        EXPECT_FALSE(first_disagreement(as_function(s), as_function(b), fixtures::ab, 6)) << "instance " << i;
        const Asst back = async_bimachine_to_asst(b);
        EXPECT_FALSE(first_disagreement(as_function(s), as_function(back), fixtures::ab, 6)) << "instance " << i;
        ++converted;
    }
    EXPECT_GT(converted, 5);
}
