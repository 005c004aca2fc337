#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "sstforge/transducers.hpp"

namespace sstforge {

using OmegaKey = std::tuple<StateId, std::size_t, StateId>;

/// Bimachine (L, R, lambda, omega, rho): a left DFA and a right codeterministic
/// automaton over the same input alphabet.
struct Bimachine {
    Dfa left;
    CoDfa right;
    Alphabet output_alphabet;
    std::map<StateId, Word> lambda;  // on initial states of R
    std::map<OmegaKey, Word> omega;  // (l, symbol, r)
    std::map<StateId, Word> rho;     // on final states of L
    bool left_recognizes_domain = false;
    bool right_recognizes_domain = false;

    void validate() const {
        left.validate();
        right.backward.validate();
        validate_alphabet(output_alphabet);
        if (left.alphabet != right.alphabet()) throw InputError("left and right automata read different alphabets");
        for (const auto& [r, w] : lambda)
            if (!right.is_initial(r)) throw InputError("lambda defined outside the initial states of R");
        for (const auto& [l, w] : rho)
            if (!left.is_final(l)) throw InputError("rho defined outside the final states of L");
        for (const auto& [key, w] : omega) {
            auto [l, s, r] = key;
            if (l >= left.size() || s >= left.alphabet.size() || r >= right.size())
                throw InputError("omega key out of range");
        }
    }

    bool operator==(const Bimachine&) const = default;
};

/// omega(l, u, r) with omega(l, eps, r) = eps and
/// omega(l, uv, r) = omega(l, u, v.r) omega(l.u, v, r).
inline std::optional<Word> omega_extend(const Bimachine& b, StateId l, const Word& u, StateId r) {
    const std::size_t n = u.size();
    std::vector<std::size_t> sym(n);
    for (std::size_t i = 0; i < n; ++i) sym[i] = require_symbol(b.left.alphabet, u[i]);
    std::vector<StateId> rs(n + 1);
    rs[n] = r;
    for (std::size_t i = n; i > 0; --i) {
        auto prev = b.right.step(rs[i], sym[i - 1]);
        if (!prev) return std::nullopt;
        rs[i - 1] = *prev;
    }
    Word out;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = b.omega.find({l, sym[i], rs[i + 1]});
        if (it == b.omega.end()) return std::nullopt;
        append(out, it->second);
        auto next = b.left.step(l, sym[i]);
        if (!next) return std::nullopt;
        l = *next;
    }
    return out;
}

/// lambda(w . r_f) omega(l_i, w, r_f) rho(l_i . w).
inline std::optional<Word> eval_bimachine(const Bimachine& b, const Word& w) {
    auto mid = omega_extend(b, b.left.initial, w, b.right.final_state());
    if (!mid) return std::nullopt;
    auto l = run_dfa(b.left, w);
    if (!l) return std::nullopt;
    StateId r = b.right.final_state();
    for (std::size_t i = w.size(); i > 0; --i) r = *b.right.step(r, require_symbol(b.right.alphabet(), w[i - 1]));
    auto lam = b.lambda.find(r);
    auto rh = b.rho.find(*l);
    if (lam == b.lambda.end() || rh == b.rho.end()) return std::nullopt;
    return concat(concat(lam->second, *mid), rh->second);
}

inline WordFunction as_function(const Bimachine& b) {
    auto keep = std::make_shared<const Bimachine>(b);
    return [keep](const Word& w) { return eval_bimachine(*keep, w); };
}

inline const Symbol end_marker = "<end>";

inline Symbol pair_symbol_name(const std::string& left_state, const Symbol& letter) {
    return "(" + left_state + "," + letter + ")";
}

/// Alphabet L x Sigma, indexed l * |Sigma| + sigma.
inline Alphabet pair_alphabet(const Dfa& left) {
    Alphabet out;
    for (const auto& l : left.states)
        for (const auto& s : left.alphabet) out.push_back(pair_symbol_name(l, s));
    return out;
}

/// Asynchronous bimachine: the right automaton reads the run of the left one.
/// omega is keyed by (l, sigma, r); its source state r' = (l, sigma) . r is implied.
struct AsyncBimachine {
    Dfa left;
    CoDfa right;  // over pair_alphabet(left)
    Alphabet output_alphabet;
    std::map<StateId, Word> lambda;
    std::map<OmegaKey, Word> omega;
    std::map<StateId, Word> rho;

    std::size_t pair_symbol(StateId l, std::size_t sigma) const { return l * left.alphabet.size() + sigma; }

    std::optional<StateId> right_step(StateId r, StateId l, std::size_t sigma) const {
        return right.step(r, pair_symbol(l, sigma));
    }

    void validate() const {
        left.validate();
        right.backward.validate();
        validate_alphabet(output_alphabet);
        if (right.alphabet() != pair_alphabet(left)) throw InputError("right automaton must read the left run alphabet");
        for (const auto& [r, w] : lambda)
            if (!right.is_initial(r)) throw InputError("lambda defined outside the initial states of R");
        for (const auto& [l, w] : rho)
            if (!left.is_final(l)) throw InputError("rho defined outside the final states of L");
        for (const auto& [key, w] : omega) {
            auto [l, s, r] = key;
            if (l >= left.size() || s >= left.alphabet.size() || r >= right.size())
                throw InputError("omega key out of range");
        }
    }

    /// Describes the first violation of the all-states-initial convention, if any:
    /// every right state is initial with a lambda value, and (l, sigma) . r exists
    /// whenever l . sigma does.
    std::optional<std::string> convention_violation() const {
        for (StateId r = 0; r < right.size(); ++r) {
            if (!right.is_initial(r)) return "right state '" + right.states()[r] + "' is not initial";
            if (!lambda.count(r)) return "lambda undefined on right state '" + right.states()[r] + "'";
        }
        for (StateId l = 0; l < left.size(); ++l)
            for (std::size_t s = 0; s < left.alphabet.size(); ++s) {
                if (!left.step(l, s)) continue;
                for (StateId r = 0; r < right.size(); ++r) {
                    if (!right_step(r, l, s))
                        return "missing (" + left.states[l] + "," + left.alphabet[s] + ") . " + right.states()[r];
                    if (!omega.count({l, s, r}))
                        return "omega undefined on (" + left.states[l] + "," + left.alphabet[s] + ") into " +
                               right.states()[r];
                }
            }
        return std::nullopt;
    }

    bool operator==(const AsyncBimachine&) const = default;
};

/// lambda(r_0) prod omega(r_{j-1}, (l_{j-1}, a_j), r_j) rho(l_n).
inline std::optional<Word> eval_async(const AsyncBimachine& b, const Word& w) {
    const std::size_t n = w.size();
    std::vector<std::size_t> sym(n);
    for (std::size_t i = 0; i < n; ++i) sym[i] = require_symbol(b.left.alphabet, w[i]);
    std::vector<StateId> ls(n + 1);
    ls[0] = b.left.initial;
    for (std::size_t i = 0; i < n; ++i) {
        auto next = b.left.step(ls[i], sym[i]);
        if (!next) return std::nullopt;
        ls[i + 1] = *next;
    }
    std::vector<StateId> rs(n + 1);
    rs[n] = b.right.final_state();
    for (std::size_t i = n; i > 0; --i) {
        auto prev = b.right_step(rs[i], ls[i - 1], sym[i - 1]);
        if (!prev) return std::nullopt;
        rs[i - 1] = *prev;
    }
    auto lam = b.lambda.find(rs[0]);
    auto rh = b.rho.find(ls[n]);
    if (!b.right.is_initial(rs[0]) || lam == b.lambda.end() || rh == b.rho.end()) return std::nullopt;
    Word out = lam->second;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = b.omega.find({ls[i], sym[i], rs[i + 1]});
        if (it == b.omega.end()) return std::nullopt;
        append(out, it->second);
    }
    append(out, rh->second);
    return out;
}

inline WordFunction as_function(const AsyncBimachine& b) {
    auto keep = std::make_shared<const AsyncBimachine>(b);
    return [keep](const Word& w) { return eval_async(*keep, w); };
}

/// T_L annotates the input with left states and closes with (l_n, <end>);
/// T_R reads the annotation right to left and produces the output.
struct AsyncDecomposition {
    Fst left;
    Fst right;
};

inline AsyncDecomposition decompose_async(const AsyncBimachine& b) {
    if (auto why = b.convention_violation()) throw StructuralError(*why);
    const auto& L = b.left;
    const auto pairs = pair_alphabet(L);

    Alphabet annotated = pairs;
    std::vector<std::size_t> end_symbol(L.size(), 0);
    for (auto l : L.finals) {
        end_symbol[l] = annotated.size();
        annotated.push_back(pair_symbol_name(L.states[l], end_marker));
    }

    AsyncDecomposition d;
    d.left.states = L.states;
    d.left.input_alphabet = L.alphabet;
    d.left.output_alphabet = annotated;
    d.left.init[L.initial] = {};
    for (StateId l = 0; l < L.size(); ++l)
        for (std::size_t s = 0; s < L.alphabet.size(); ++s)
            if (auto to = L.step(l, s)) d.left.trans[{l, s, *to}] = {pairs[b.pair_symbol(l, s)]};
    for (auto l : L.finals) d.left.final_out[l] = {annotated[end_symbol[l]]};

    const StateId rf = b.right.final_state();
    d.right.states = b.right.states();
    d.right.input_alphabet = annotated;
    d.right.output_alphabet = b.output_alphabet;
    for (const auto& [r, w] : b.lambda) d.right.init[r] = w;
    for (const auto& [key, w] : b.omega) {
        auto [l, s, r] = key;
        if (!L.step(l, s)) continue;
        if (auto from = b.right_step(r, l, s)) d.right.trans[{*from, b.pair_symbol(l, s), r}] = w;
    }
    for (const auto& [l, w] : b.rho) d.right.trans[{rf, end_symbol[l], rf}] = w;
    d.right.final_out[rf] = {};
    return d;
}

}  // namespace sstforge
