#pragma once

#include <compare>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sstforge/words.hpp"

namespace sstforge {

using StateId = std::size_t;

struct Transition {
    StateId from;
    std::size_t symbol;
    StateId to;
    auto operator<=>(const Transition&) const = default;
};

inline StateId index_of(const std::vector<std::string>& names, const std::string& name,
                        const char* what = "state") {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InputError(std::string("unknown ") + what + " '" + name + "'");
    return static_cast<StateId>(it - names.begin());
}

inline void validate_names(const std::vector<std::string>& names, const char* what) {
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (n.empty()) throw InputError(std::string("empty ") + what + " id");
        if (!seen.insert(n).second) throw InputError(std::string("duplicate ") + what + " '" + n + "'");
    }
}

/// Nondeterministic automaton (Q, I, Delta, F). Transitions are kept sorted and unique.
struct Nfa {
    std::vector<std::string> states;
    Alphabet alphabet;
    std::set<StateId> initials;
    std::set<StateId> finals;
    std::vector<Transition> transitions;

    std::size_t size() const { return states.size(); }

    void add_transition(StateId from, std::size_t symbol, StateId to) {
        Transition t{from, symbol, to};
        auto it = std::lower_bound(transitions.begin(), transitions.end(), t);
        if (it == transitions.end() || *it != t) transitions.insert(it, t);
    }

    void validate() const {
        validate_names(states, "state");
        validate_alphabet(alphabet);
        for (auto q : initials)
            if (q >= size()) throw InputError("initial state out of range");
        for (auto q : finals)
            if (q >= size()) throw InputError("final state out of range");
        for (const auto& t : transitions)
            if (t.from >= size() || t.to >= size() || t.symbol >= alphabet.size())
                throw InputError("transition endpoint out of range");
    }

    bool operator==(const Nfa&) const = default;
};

/// Reverses every transition and swaps initial and final states.
inline Nfa mirror(const Nfa& a) {
    Nfa m;
    m.states = a.states;
    m.alphabet = a.alphabet;
    m.initials = a.finals;
    m.finals = a.initials;
    for (const auto& t : a.transitions) m.add_transition(t.to, t.symbol, t.from);
    return m;
}

inline bool is_deterministic(const Nfa& a) {
    if (a.initials.size() != 1) return false;
    for (std::size_t i = 1; i < a.transitions.size(); ++i) {
        const auto& p = a.transitions[i - 1];
        const auto& t = a.transitions[i];
        if (p.from == t.from && p.symbol == t.symbol) return false;
    }
    return true;
}

inline bool is_codeterministic(const Nfa& a) { return is_deterministic(mirror(a)); }

/// Deterministic automaton with a partial transition function. Completeness is a
/// property checked with is_complete(), not an assumption.
struct Dfa {
    std::vector<std::string> states;
    Alphabet alphabet;
    StateId initial = 0;
    std::set<StateId> finals;
    std::vector<std::vector<std::optional<StateId>>> delta;  // [state][symbol]

    Dfa() = default;
    Dfa(std::vector<std::string> names, Alphabet sigma)
        : states(std::move(names)), alphabet(std::move(sigma)),
          delta(states.size(), std::vector<std::optional<StateId>>(alphabet.size())) {}

    std::size_t size() const { return states.size(); }

    StateId add_state(std::string name) {
        states.push_back(std::move(name));
        delta.emplace_back(alphabet.size());
        return states.size() - 1;
    }

    std::optional<StateId> step(StateId q, std::size_t symbol) const { return delta[q][symbol]; }
    void set(StateId q, std::size_t symbol, StateId to) { delta[q][symbol] = to; }
    bool is_final(StateId q) const { return finals.count(q) != 0; }

    bool is_complete() const {
        for (const auto& row : delta)
            for (const auto& t : row)
                if (!t) return false;
        return true;
    }

    void validate() const {
        validate_names(states, "state");
        validate_alphabet(alphabet);
        if (states.empty()) throw InputError("DFA without states");
        if (initial >= size()) throw InputError("initial state out of range");
        if (delta.size() != size()) throw InputError("transition table size mismatch");
        for (const auto& row : delta) {
            if (row.size() != alphabet.size()) throw InputError("transition table width mismatch");
            for (const auto& t : row)
                if (t && *t >= size()) throw InputError("transition target out of range");
        }
        for (auto q : finals)
            if (q >= size()) throw InputError("final state out of range");
    }

    Nfa to_nfa() const {
        Nfa n;
        n.states = states;
        n.alphabet = alphabet;
        n.initials = {initial};
        n.finals = finals;
        for (StateId q = 0; q < size(); ++q)
            for (std::size_t s = 0; s < alphabet.size(); ++s)
                if (delta[q][s]) n.transitions.push_back({q, s, *delta[q][s]});
        std::sort(n.transitions.begin(), n.transitions.end());
        return n;
    }

    static Dfa from_nfa(const Nfa& n) {
        if (!is_deterministic(n)) throw InputError("automaton is not deterministic");
        Dfa d(n.states, n.alphabet);
        d.initial = *n.initials.begin();
        d.finals = n.finals;
        for (const auto& t : n.transitions) d.set(t.from, t.symbol, t.to);
        return d;
    }

    bool operator==(const Dfa&) const = default;
};

inline std::optional<StateId> run_dfa_from(const Dfa& a, StateId q, const Word& w) {
    std::optional<StateId> cur = q;
    for (const auto& s : w) {
        auto idx = require_symbol(a.alphabet, s);
        if (!cur) continue;
        cur = a.step(*cur, idx);
    }
    return cur;
}

/// q0 . w, or nullopt when the run leaves the transition function.
inline std::optional<StateId> run_dfa(const Dfa& a, const Word& w) { return run_dfa_from(a, a.initial, w); }

inline bool accepts(const Dfa& a, const Word& w) {
    auto q = run_dfa(a, w);
    return q && a.is_final(*q);
}

/// Completes a partial DFA with a fresh non-final sink. Returns the input unchanged
/// when it is already complete.
inline Dfa complete_with_sink(Dfa a, const std::string& sink_name = "#sink") {
    if (a.is_complete()) return a;
    std::string name = sink_name;
    while (std::find(a.states.begin(), a.states.end(), name) != a.states.end()) name += "'";
    StateId sink = a.add_state(name);
    for (auto& row : a.delta)
        for (auto& t : row)
            if (!t) t = sink;
    return a;
}

inline std::vector<bool> reachable_states(const Dfa& a) {
    std::vector<bool> seen(a.size(), false);
    std::deque<StateId> todo{a.initial};
    seen[a.initial] = true;
    while (!todo.empty()) {
        StateId q = todo.front();
        todo.pop_front();
        for (const auto& t : a.delta[q])
            if (t && !seen[*t]) {
                seen[*t] = true;
                todo.push_back(*t);
            }
    }
    return seen;
}

/// Maps each symbol of `from` to its index in `to`, or throws on mismatch.
inline std::vector<std::size_t> alphabet_map(const Alphabet& from, const Alphabet& to) {
    if (from.size() != to.size()) throw InputError("alphabet mismatch");
    std::vector<std::size_t> map;
    for (const auto& s : from) {
        auto idx = symbol_index(to, s);
        if (!idx) throw InputError("alphabet mismatch on '" + s + "'");
        map.push_back(*idx);
    }
    return map;
}

/// True iff the congruence of `a` refines that of `b`: the map q0_a.u -> q0_b.u is
/// well defined on reachable states. Both automata must be complete.
inline bool finer_than(const Dfa& a, const Dfa& b) {
    if (!a.is_complete() || !b.is_complete()) throw PreconditionError("finer_than requires complete DFAs");
    auto sym = alphabet_map(a.alphabet, b.alphabet);
    std::vector<std::optional<StateId>> image(a.size());
    std::deque<StateId> todo{a.initial};
    image[a.initial] = b.initial;
    while (!todo.empty()) {
        StateId p = todo.front();
        todo.pop_front();
        for (std::size_t s = 0; s < a.alphabet.size(); ++s) {
            StateId pa = *a.step(p, s);
            StateId pb = *b.step(*image[p], sym[s]);
            if (!image[pa]) {
                image[pa] = pb;
                todo.push_back(pa);
            } else if (*image[pa] != pb) {
                return false;
            }
        }
    }
    return true;
}

/// Structural isomorphism of the reachable parts (finals included), up to state renaming.
inline bool isomorphic(const Dfa& a, const Dfa& b) {
    std::vector<std::size_t> sym;
    try {
        sym = alphabet_map(a.alphabet, b.alphabet);
    } catch (const InputError&) {
        return false;
    }
    std::vector<std::optional<StateId>> fwd(a.size()), bwd(b.size());
    std::deque<StateId> todo{a.initial};
    fwd[a.initial] = b.initial;
    bwd[b.initial] = a.initial;
    while (!todo.empty()) {
        StateId p = todo.front();
        todo.pop_front();
        StateId q = *fwd[p];
        if (a.is_final(p) != b.is_final(q)) return false;
        for (std::size_t s = 0; s < a.alphabet.size(); ++s) {
            auto pa = a.step(p, s);
            auto qb = b.step(q, sym[s]);
            if (pa.has_value() != qb.has_value()) return false;
            if (!pa) continue;
            if (!fwd[*pa] && !bwd[*qb]) {
                fwd[*pa] = *qb;
                bwd[*qb] = *pa;
                todo.push_back(*pa);
            } else if (fwd[*pa] != qb || bwd[*qb] != pa) {
                return false;
            }
        }
    }
    auto ra = reachable_states(a), rb = reachable_states(b);
    return std::count(ra.begin(), ra.end(), true) == std::count(rb.begin(), rb.end(), true);
}

/// Codeterministic automaton with a single final state, stored as its mirror DFA:
/// backward.initial is the final state r_f, backward.finals are the initial states,
/// and backward.step(r, s) is s . r (the state read before r).
struct CoDfa {
    Dfa backward;

    std::size_t size() const { return backward.size(); }
    const std::vector<std::string>& states() const { return backward.states; }
    const Alphabet& alphabet() const { return backward.alphabet; }
    StateId final_state() const { return backward.initial; }
    bool is_initial(StateId r) const { return backward.is_final(r); }
    const std::set<StateId>& initials() const { return backward.finals; }
    std::optional<StateId> step(StateId r, std::size_t symbol) const { return backward.step(r, symbol); }

    Nfa to_nfa() const { return mirror(backward.to_nfa()); }

    static CoDfa from_nfa(const Nfa& n) {
        if (!is_codeterministic(n)) throw InputError("automaton is not codeterministic");
        return CoDfa{Dfa::from_nfa(mirror(n))};
    }

    bool operator==(const CoDfa&) const = default;
};

}  // namespace sstforge
