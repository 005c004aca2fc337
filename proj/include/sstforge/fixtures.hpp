#pragma once

// Reference machines used by the tests, the acceptance suite and the CLI fixtures.

#include "sstforge/bimachines.hpp"
#include "sstforge/asst.hpp"
#include "sstforge/refinement.hpp"

namespace sstforge::fixtures {

inline const Alphabet ab = {"a", "b"};

/// sigma^{|w|} where sigma is the last letter of w; the empty word maps to itself.
inline std::optional<Word> last_letter(const Word& w) {
    if (w.empty()) return Word{};
    return Word(w.size(), w.back());
}

/// Exchanges the first and last letters.
inline std::optional<Word> swap_ends(const Word& w) {
    Word out = w;
    if (out.size() >= 2) std::swap(out.front(), out.back());
    return out;
}

/// Two-state, two-register aSST for last_letter whose flows depend on the state.
inline Asst last_letter_asst() {
    Asst s({"0", "1"}, {"X", "Y"}, ab, ab);
    const std::size_t X = 0, Y = 1;
    auto e = [](std::size_t src, const char* w) { return AppendExpr{src, chars(w)}; };
    s.set_transition(0, 0, 0, {e(X, "a"), e(Y, "b")});
    s.set_transition(0, 1, 1, {e(Y, "b"), e(X, "a")});
    s.set_transition(1, 0, 0, {e(Y, "a"), e(X, "b")});
    s.set_transition(1, 1, 1, {e(X, "b"), e(Y, "a")});
    s.gamma[0] = AppendExpr{X, {}};
    s.gamma[1] = AppendExpr{X, {}};
    return s;
}

/// last_letter_asst without the update of Y on 0 -b-> 1.
inline Asst last_letter_partial_asst() {
    Asst s = last_letter_asst();
    s.delta[0][1]->update[1].reset();
    return s;
}

/// One-state aSST for last_letter with independent flows: registers X (output),
/// A = a^n and B = b^n.
inline Asst last_letter_iffo_asst() {
    Asst s({"q"}, {"X", "A", "B"}, ab, ab);
    auto e = [](std::size_t src, const char* w) { return AppendExpr{src, chars(w)}; };
    s.set_transition(0, 0, 0, {e(1, "a"), e(1, "a"), e(2, "b")});
    s.set_transition(0, 1, 0, {e(2, "b"), e(1, "a"), e(2, "b")});
    s.gamma[0] = AppendExpr{0, {}};
    return s;
}

/// Cosequential transducer for last_letter guessing the last letter up front.
inline Fst last_letter_fst() {
    Fst t;
    t.states = {"C_a", "C_b", "F"};
    t.input_alphabet = ab;
    t.output_alphabet = ab;
    for (StateId q = 0; q < 3; ++q) t.init[q] = {};
    for (StateId c = 0; c < 2; ++c) {
        for (std::size_t s = 0; s < 2; ++s) t.trans[{c, s, c}] = {ab[c]};
        t.trans[{c, c, 2}] = {ab[c]};
    }
    t.final_out[2] = {};
    return t;
}

inline Asst identity_asst(const Alphabet& alphabet) {
    Asst s({"q"}, {"X"}, alphabet, alphabet);
    for (std::size_t sym = 0; sym < alphabet.size(); ++sym) s.set_transition(0, sym, 0, {AppendExpr{0, {alphabet[sym]}}});
    s.gamma[0] = AppendExpr{0, {}};
    return s;
}

/// Left automaton l_i -s-> l_s, l_t -s-> l_t, all final.
inline Dfa swap_left() {
    Dfa L({"l_i", "l_a", "l_b"}, ab);
    for (std::size_t s = 0; s < 2; ++s) {
        L.set(0, s, 1 + s);
        L.set(1, s, 1);
        L.set(2, s, 2);
    }
    L.finals = {0, 1, 2};
    return L;
}

/// Bimachine exchanging the first and last letters. The right state r_t records the
/// last letter t of the suffix read so far.
inline Bimachine swap_bimachine() {
    Bimachine b;
    b.left = swap_left();
    b.output_alphabet = ab;
    b.right.backward = Dfa({"r_f", "r_a", "r_b"}, ab);
    b.right.backward.initial = 0;
    b.right.backward.finals = {0, 1, 2};
    for (std::size_t s = 0; s < 2; ++s) {
        b.right.backward.set(0, s, 1 + s);
        b.right.backward.set(1, s, 1);
        b.right.backward.set(2, s, 2);
    }
    for (StateId r = 0; r < 3; ++r) b.lambda[r] = {};
    for (StateId l = 0; l < 3; ++l) b.rho[l] = {};
    for (StateId l = 0; l < 3; ++l)
        for (std::size_t s = 0; s < 2; ++s)
            for (StateId r = 0; r < 3; ++r) {
                Symbol out = ab[s];
                if (l == 0 && r != 0) out = ab[r - 1];
                if (l != 0 && r == 0) out = ab[l - 1];
                b.omega[{l, s, r}] = {out};
            }
    b.left_recognizes_domain = true;
    b.right_recognizes_domain = true;
    return b;
}

/// Asynchronous version of swap_bimachine: (l, s) . r_f = r_s and (l, s) . r_t = r_t.
inline AsyncBimachine async_swap_bimachine() {
    const Bimachine sync = swap_bimachine();
    AsyncBimachine b;
    b.left = sync.left;
    b.output_alphabet = ab;
    b.right.backward = Dfa({"r_f", "r_a", "r_b"}, pair_alphabet(b.left));
    b.right.backward.initial = 0;
    b.right.backward.finals = {0, 1, 2};
    for (StateId l = 0; l < 3; ++l)
        for (std::size_t s = 0; s < 2; ++s) {
            b.right.backward.set(0, b.pair_symbol(l, s), 1 + s);
            b.right.backward.set(1, b.pair_symbol(l, s), 1);
            b.right.backward.set(2, b.pair_symbol(l, s), 2);
        }
    b.lambda = sync.lambda;
    b.omega = sync.omega;
    b.rho = sync.rho;
    return b;
}

/// Three-state DFA with 0 ~ 1 and 0 ~ 2 but 1 !~ 2. Two states suffice, in two
/// different ways.
inline Precongruence three_state_precongruence() {
    Dfa d({"0", "1", "2"}, ab);
    d.set(0, 0, 1);
    d.set(0, 1, 2);
    d.set(1, 0, 1);
    d.set(1, 1, 0);
    d.set(2, 0, 0);
    d.set(2, 1, 2);
    d.finals = {0, 1, 2};
    return make_precongruence(d, {{0, 1}, {0, 2}});
}

}  // namespace sstforge::fixtures
