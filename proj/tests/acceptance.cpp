#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "sstforge.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace sstforge;
using namespace sstforge::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0 for no limit
    std::function<Outcome()> run;
};

Outcome fail(const std::string& why) { return {false, why}; }

bool agree(const WordFunction& f, const WordFunction& g, std::size_t len, std::string& why) {
    if (auto w = first_disagreement(f, g, fixtures::ab, len)) {
        why = "disagreement on '" + to_string(*w) + "'";
        return false;
    }
    return true;
}

Outcome last_letter_fidelity() {
    std::string why;
    if (!agree(as_function(fixtures::last_letter_asst()), fixtures::last_letter, 8, why)) return fail(why);
    return {true, "511 words"};
}

std::vector<std::pair<std::string, Asst>> asst_fixtures() {
    return {{"last-letter", fixtures::last_letter_asst()},
            {"lastletter-iffo", fixtures::last_letter_iffo_asst()},
            {"identity", fixtures::identity_asst(fixtures::ab)},
            {"tradeoff1", normalize_output_register(tradeoff_example(1))},
            {"tradeoff2", normalize_output_register(tradeoff_example(2))}};
}

Outcome size_preserving_conversions() {
    std::string why;
    std::size_t checks = 0;
    for (const auto& [name, s] : asst_fixtures()) {
        auto b = asst_to_async_bimachine(s);
        if (b.left.size() != s.size() || b.right.size() != s.register_count())
            return fail(name + ": async bimachine sizes differ");
        auto back = async_bimachine_to_asst(b);
        if (back.size() != s.size() || back.register_count() != s.register_count() || !isomorphic(back, s))
            return fail(name + ": round trip is not isomorphic");
        if (!agree(as_function(s), as_function(b), 8, why) || !agree(as_function(s), as_function(back), 8, why))
            return fail(name + ": " + why);
        ++checks;
        if (has_independent_flows(s) && s.fixed_output_register()) {
            auto bim = asst_iffo_to_bimachine(s);
            if (bim.left.size() != s.size() || bim.right.size() != s.register_count())
                return fail(name + ": bimachine sizes differ");
            auto again = bimachine_to_asst_iffo(bim);
            if (!isomorphic(again.machine, s)) return fail(name + ": iffo round trip is not isomorphic");
            if (!agree(as_function(s), as_function(bim), 8, why)) return fail(name + ": " + why);
            ++checks;
        }
    }
    {
        const auto b = fixtures::async_swap_bimachine();
        auto s = async_bimachine_to_asst(b);
        if (s.size() != b.left.size() || s.register_count() != b.right.size()) return fail("swap async: sizes differ");
        auto again = asst_to_async_bimachine(s);
        if (again != b) return fail("swap async: round trip differs");
        if (!agree(as_function(b), as_function(s), 8, why)) return fail("swap async: " + why);
        ++checks;
    }
    {
        const auto b = fixtures::swap_bimachine();
        auto res = bimachine_to_asst_iffo(b);
        if (res.machine.size() != b.left.size() || res.machine.register_count() != b.right.size())
            return fail("swap bimachine: sizes differ");
        auto again = asst_iffo_to_bimachine(res.machine);
        if (again.left.size() != b.left.size() || again.right.size() != b.right.size())
            return fail("swap bimachine: round trip sizes differ");
        if (!agree(as_function(b), as_function(res.machine), 8, why) || !agree(as_function(b), as_function(again), 8, why))
            return fail("swap bimachine: " + why);
        ++checks;
    }
    return {true, std::to_string(checks) + " round trips"};
}

Outcome decomposition_identity() {
    std::vector<std::pair<std::string, AsyncBimachine>> machines{{"swap", fixtures::async_swap_bimachine()}};
    for (const auto& [name, s] : asst_fixtures()) machines.emplace_back(name, asst_to_async_bimachine(s));
    for (const auto& [name, b] : machines) {
        const auto d = decompose_async(b);
        FstEvaluator left(d.left), right(d.right);
        std::optional<Word> bad;
        for_each_word(b.left.alphabet, 8, [&](const Word& w) {
            auto mid = left.eval_function(w);
            std::optional<Word> composed = mid ? right.eval_function(*mid) : std::nullopt;
            if (composed != eval_async(b, w)) bad = w;
            return !bad;
        });
        if (bad) return fail(name + ": differs on '" + to_string(*bad) + "'");
    }
    return {true, std::to_string(machines.size()) + " machines"};
}

Outcome register_complexity_gap() {
    FunctionOracle closed("last-letter", fixtures::ab, fixtures::ab, fixtures::last_letter);
    FunctionOracle machine("last-letter-machine", fixtures::ab, fixtures::ab, as_function(fixtures::last_letter_asst()));
    std::ostringstream detail;
    for (std::size_t W = 4; W <= 6; ++W) {
        auto p = left_syntactic_classes(closed, W, 2 * W);
        auto q = left_syntactic_classes(machine, W, 2 * W);
        if (p.size() != 3 || q.size() != 3)
            return fail("W=" + std::to_string(W) + ": " + std::to_string(p.size()) + " classes");
        detail << "W=" << W << ":3 ";
    }
    const auto two_reg = fixtures::last_letter_asst();
    std::string why;
    if (two_reg.register_count() != 2 || !agree(as_function(two_reg), fixtures::last_letter, 8, why))
        return fail("two-register machine does not realize the function");
    detail << "vs 2 registers";
    return {true, detail.str()};
}

Outcome refinement_completeness() {
    Rng rng(20240501);
    for (int i = 0; i < 200; ++i) {
        auto pc = random_precongruence(rng, pick(rng, 1, 4), fixtures::ab);
        auto res = minimal_refinement(pc, 1);
        std::size_t oracle = 0;
        for (std::size_t k = 1; !oracle; ++k)
            if (brute_force_refinement(pc, k)) oracle = k;
        if (res.k_min != oracle)
            return fail("instance " + std::to_string(i) + ": k_min " + std::to_string(res.k_min) + " vs " +
                        std::to_string(oracle));
    }
    return {true, "200/200"};
}

Outcome coloring_reduction() {
    Rng rng(7);
    std::vector<Graph> graphs{Graph::complete(3), Graph::complete(4), Graph::cycle(5), Graph::path(3)};
    // Without edges S_N is never read and one register fewer suffices, so the sample
    // keeps graphs with at least one edge.
    while (graphs.size() < 54) {
        auto g = random_graph(rng, pick(rng, 2, 5));
        if (!g.edges.empty()) graphs.push_back(std::move(g));
    }
    std::size_t runs = 0;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        const auto& g = graphs[i];
        const auto s = coloring_to_asst(g);
        for (std::size_t k = 1; k <= g.size() + 3; ++k) {
            const bool solved = fa_reg_min(s, k).machine.has_value();
            const bool expected = k >= 3 && colorable(g, k - 3);
            ++runs;
            if (solved != expected)
                return fail("graph " + std::to_string(i) + " at k=" + std::to_string(k) + ": solver " +
                            (solved ? "succeeds" : "fails"));
        }
    }
    return {true, std::to_string(graphs.size()) + " graphs, " + std::to_string(runs) + " budgets"};
}

Outcome extension_pipeline() {
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        const Fst t = random_letter_to_letter(rng, pick(rng, 1, 5));
        const auto inst = extension_to_refinement(t, 0);
        const auto res = minimal_refinement(inst.pc, 1);
        const Fst e = build_extended_transducer(t, res.witnesses.at(0));
        if (auto w = check_equal_on_domain_bounded(t, e, 8, AgreementMode::ExtendsFirst))
            return fail("instance " + std::to_string(i) + ": extension differs on '" + to_string(*w) + "'");
        const std::size_t oracle = min_extension_states(t);
        if (e.size() != oracle)
            return fail("instance " + std::to_string(i) + ": " + std::to_string(e.size()) + " states vs minimum " +
                        std::to_string(oracle));
    }
    return {true, "100/100"};
}

Outcome domain_analysis() {
    Rng rng(4242);
    std::size_t strict = 0;
    for (int i = 0; i < 100; ++i) {
        const Asst s = random_partial_asst(rng, pick(rng, 1, 4), pick(rng, 1, 3));
        const bool claimed = check_domain_is_underlying_language(s).domain_is_underlying_language;
        if (claimed != domain_matches_bounded(s, 8)) return fail("instance " + std::to_string(i));
        strict += !claimed;
    }
    return {true, "100/100, " + std::to_string(strict) + " with a smaller domain"};
}

Outcome tradeoff_construction() {
    for (std::size_t n = 1; n <= 4; ++n) {
        std::string why;
        if (!agree(as_function(tradeoff_example(n)), tradeoff_function(n), n + 2, why))
            return fail("n=" + std::to_string(n) + ": " + why);
    }
    const auto min = min_single_register_states(tradeoff_function(1), fixtures::ab, 4, 2, 4 + 3);
    if (!min) return fail("no one-register machine with at most 4 states");
    if (*min != 4) return fail("one-register minimum is " + std::to_string(*min));
    return {true, "n<=4 exact; one register needs 4 states"};
}

Outcome swap_bimachine() {
    const auto b = fixtures::swap_bimachine();
    const auto a = fixtures::async_swap_bimachine();
    if (eval_bimachine(b, chars("abab")) != chars("bbaa") || eval_async(a, chars("abab")) != chars("bbaa"))
        return fail("abab does not map to bbaa");
    std::size_t n = 0;
    for (std::size_t len = 2; len <= 8; ++len) {
        std::optional<Word> bad;
        for_each_word(fixtures::ab, len, [&](const Word& w) {
            if (w.size() != len) return true;
            ++n;
            if (eval_bimachine(b, w) != fixtures::swap_ends(w) || eval_async(a, w) != fixtures::swap_ends(w)) bad = w;
            return !bad;
        });
        if (bad) return fail("differs on '" + to_string(*bad) + "'");
    }
    return {true, std::to_string(n) + " words"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "last-letter fidelity", 1, last_letter_fidelity},
        {2, "size-preserving conversions", 5, size_preserving_conversions},
        {3, "decomposition identity", 0, decomposition_identity},
        {4, "register-complexity gap", 10, register_complexity_gap},
        {5, "refinement completeness", 60, refinement_completeness},
        {6, "coloring reduction", 120, coloring_reduction},
        {7, "extension pipeline", 120, extension_pipeline},
        {8, "domain analysis", 0, domain_analysis},
        {9, "tradeoff construction", 0, tradeoff_construction},
        {10, "swap bimachine", 0, swap_bimachine},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.pass && c.limit_seconds > 0 && secs >= c.limit_seconds) o = fail("over the time limit");
        failures += !o.pass;
        std::printf("%s criterion %2d  %-28s %7.3fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    }
    return failures == 0 ? 0 : 1;
}
