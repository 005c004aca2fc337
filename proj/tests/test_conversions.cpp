#include <gtest/gtest.h>

#include "sstforge.hpp"

using namespace sstforge;

TEST(Conversions, TwoRegisterMachineToAsyncBimachineAndBack) {
    const Asst s = fixtures::last_letter_asst();
    const auto b = asst_to_async_bimachine(s);
    EXPECT_EQ(b.left.size(), 2u);
    EXPECT_EQ(b.right.size(), 2u);
    EXPECT_FALSE(first_disagreement(as_function(s), as_function(b), fixtures::ab, 8));
    const Asst back = async_bimachine_to_asst(b);
    EXPECT_TRUE(isomorphic(back, s));
    EXPECT_EQ(back, s);
}

TEST(Conversions, AsyncRequiresAFixedOutputRegister) {
    EXPECT_THROW(asst_to_async_bimachine(tradeoff_example(1)), PreconditionError);
    EXPECT_THROW(asst_to_async_bimachine(fixtures::last_letter_partial_asst()), PreconditionError);
}

TEST(Conversions, IndependentFlowsGiveABimachine) {
    const Asst s = fixtures::last_letter_iffo_asst();
    const auto b = asst_iffo_to_bimachine(s);
    EXPECT_EQ(b.left.size(), 1u);
    EXPECT_EQ(b.right.size(), 3u);
    EXPECT_NO_THROW(b.validate());
    EXPECT_FALSE(first_disagreement(as_function(s), as_function(b), fixtures::ab, 8));
    const auto back = bimachine_to_asst_iffo(b);
    EXPECT_TRUE(back.report.exact());
    EXPECT_TRUE(isomorphic(back.machine, s));
}

TEST(Conversions, StateDependentFlowsAreRejectedWithAReason) {
    try {
        asst_iffo_to_bimachine(fixtures::last_letter_asst());
        FAIL() << "expected PreconditionError";
    } catch (const PreconditionError& e) {
        EXPECT_STREQ(e.what(),
                     "flows depend on states: register 'X' reads different sources on 'a' in states '0' and '1'");
    }
}

TEST(Conversions, SwapBimachineToAsst) {
    const auto b = fixtures::swap_bimachine();
    const auto res = bimachine_to_asst_iffo(b);
    EXPECT_TRUE(res.report.exact());
    EXPECT_EQ(res.machine.size(), 3u);
    EXPECT_EQ(res.machine.register_count(), 3u);
    EXPECT_TRUE(has_independent_flows(res.machine));
    EXPECT_FALSE(first_disagreement(as_function(b), as_function(res.machine), fixtures::ab, 8));
}

TEST(Conversions, MissingBimachineOutputsAreReported) {
    auto b = fixtures::swap_bimachine();
    b.lambda.erase(1);
    b.omega.erase({0, 0, 0});
    const auto res = bimachine_to_asst_iffo(b);
    EXPECT_EQ(res.report.defaulted_registers, std::vector<StateId>{1});
    ASSERT_EQ(res.report.fallbacks.size(), 1u);
    EXPECT_FALSE(res.report.exact());
}

TEST(Conversions, RunExpansionAgreesWithTheMachine) {
    for (const Asst& s : {fixtures::last_letter_asst(), fixtures::last_letter_iffo_asst(), tradeoff_example(2)}) {
        const Fst t = asst_to_fst(s);
        EXPECT_EQ(t.size(), s.size() * s.register_count());
        EXPECT_FALSE(non_functional_witness(t, 5));
        EXPECT_FALSE(first_disagreement(as_function(s), as_function(t), fixtures::ab, 6));
    }
}

TEST(Conversions, IsomorphismDetectsRegisterPermutations) {
    Asst s = fixtures::last_letter_asst();
    Asst p = s;
    p.registers = {"Y", "X"};
    for (auto& row : p.delta)
        for (auto& e : row) {
            std::swap(e->update[0], e->update[1]);
            for (auto& u : e->update) u->src = 1 - u->src;
        }
    for (auto& g : p.gamma) g->src = 1 - g->src;
    std::swap(p.v0[0], p.v0[1]);
    EXPECT_TRUE(isomorphic(s, p));
    p.gamma[1]->append = {"a"};
    EXPECT_FALSE(isomorphic(s, p));
}
