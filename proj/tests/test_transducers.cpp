#include <gtest/gtest.h>

#include "sstforge.hpp"

using namespace sstforge;

TEST(Transducers, LastLetterGuessesUpFront) {
    const Fst t = fixtures::last_letter_fst();
    EXPECT_FALSE(t.is_sequential());
    EXPECT_TRUE(t.is_cosequential());
    EXPECT_EQ(eval_fst(t, chars("aab")), (std::set<Word>{chars("bbb")}));
    EXPECT_EQ(eval_fst(t, {}), (std::set<Word>{Word{}}));
    EXPECT_FALSE(non_functional_witness(t, 6));
    EXPECT_FALSE(first_disagreement(as_function(t), fixtures::last_letter, fixtures::ab, 7));
}

TEST(Transducers, NonFunctionalWitnessIsShortest) {
    Fst t = identity_fst({"a"});
    t.states.push_back("r");
    t.trans[{0, 0, 1}] = {};
    t.final_out[1] = {};
    EXPECT_EQ(non_functional_witness(t, 4), chars("a"));
    EXPECT_THROW(as_function(t)(chars("a")), PreconditionError);
}

TEST(Transducers, ProductionFollowsTheRun) {
    const Fst id = identity_fst({"a", "b"});
    EXPECT_EQ(production(id, 0, chars("abb")), chars("abb"));
    EXPECT_THROW(production(fixtures::last_letter_fst(), 0, {}), PreconditionError);
}

TEST(Transducers, BoundedEquivalence) {
    const Fst id = identity_fst({"a", "b"});
    Fst prefix = id;
    prefix.final_out.clear();
    prefix.states.push_back("stop");
    prefix.trans[{0, 0, 1}] = {"a"};
    prefix.trans.erase({0, 0, 0});
    prefix.final_out[1] = {};
    EXPECT_FALSE(check_equal_on_domain_bounded(prefix, id, 5, AgreementMode::ExtendsFirst));
    EXPECT_TRUE(check_equal_on_domain_bounded(prefix, id, 5, AgreementMode::Equal));
}

TEST(Transducers, LetterToLetterDetection) {
    EXPECT_TRUE(identity_fst({"a"}).is_letter_to_letter());
    Fst t = identity_fst({"a"});
    t.trans[{0, 0, 0}] = chars("aa");
    EXPECT_FALSE(t.is_letter_to_letter());
}

TEST(Transducers, ValidationCatchesForeignOutputs) {
    Fst t = identity_fst({"a"});
    t.trans[{0, 0, 0}] = {"z"};
    EXPECT_THROW(t.validate(), InputError);
}
