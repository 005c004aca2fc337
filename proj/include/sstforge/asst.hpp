#pragma once

#include <algorithm>
#include <deque>
#include <memory>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "sstforge/automata.hpp"

namespace sstforge {

/// X . w : the content of one register followed by a constant word.
struct AppendExpr {
    std::size_t src = 0;
    Word append;
    bool operator==(const AppendExpr&) const = default;
};

/// Register update. An empty slot leaves the register undefined (partial update).
using Substitution = std::vector<std::optional<AppendExpr>>;

/// Register contents. An empty slot is an undefined register.
using Valuation = std::vector<std::optional<Word>>;

inline std::optional<Word> apply_expr(const Valuation& v, const AppendExpr& e) {
    if (!v[e.src]) return std::nullopt;
    return concat(*v[e.src], e.append);
}

/// v o s : X -> v(s(X)).
inline Valuation apply_update(const Valuation& v, const Substitution& s) {
    Valuation out(s.size());
    for (std::size_t x = 0; x < s.size(); ++x)
        if (s[x]) out[x] = apply_expr(v, *s[x]);
    return out;
}

/// s o t, so that apply_update(apply_update(v, s), t) == apply_update(v, compose(s, t)).
inline Substitution compose(const Substitution& s, const Substitution& t) {
    Substitution out(t.size());
    for (std::size_t x = 0; x < t.size(); ++x) {
        if (!t[x] || !s[t[x]->src]) continue;
        const auto& inner = *s[t[x]->src];
        out[x] = AppendExpr{inner.src, concat(inner.append, t[x]->append)};
    }
    return out;
}

inline bool is_total(const Substitution& s) {
    return std::all_of(s.begin(), s.end(), [](const auto& e) { return e.has_value(); });
}

inline Substitution identity_substitution(std::size_t registers) {
    Substitution s(registers);
    for (std::size_t x = 0; x < registers; ++x) s[x] = AppendExpr{x, {}};
    return s;
}

struct AsstEdge {
    StateId to;
    Substitution update;
    bool operator==(const AsstEdge&) const = default;
};

/// Appending streaming string transducer (Q, X, q0, v0, delta_s, delta_r, gamma).
/// delta_s and delta_r share one table; updates may be partial.
struct Asst {
    std::vector<std::string> states;
    std::vector<std::string> registers;
    Alphabet input_alphabet;
    Alphabet output_alphabet;
    StateId q0 = 0;
    std::vector<Word> v0;
    std::vector<std::vector<std::optional<AsstEdge>>> delta;  // [state][symbol]
    std::vector<std::optional<AppendExpr>> gamma;

    Asst() = default;
    Asst(std::vector<std::string> state_names, std::vector<std::string> register_names, Alphabet in, Alphabet out)
        : states(std::move(state_names)), registers(std::move(register_names)), input_alphabet(std::move(in)),
          output_alphabet(std::move(out)), v0(registers.size()),
          delta(states.size(), std::vector<std::optional<AsstEdge>>(input_alphabet.size())),
          gamma(states.size()) {}

    std::size_t size() const { return states.size(); }
    std::size_t register_count() const { return registers.size(); }

    void set_transition(StateId from, std::size_t symbol, StateId to, Substitution update) {
        delta[from][symbol] = AsstEdge{to, std::move(update)};
    }

    bool has_total_updates() const {
        for (const auto& row : delta)
            for (const auto& e : row)
                if (e && !is_total(e->update)) return false;
        return true;
    }

    /// Underlying DFA; its final states are dom(gamma).
    Dfa underlying() const {
        Dfa d(states, input_alphabet);
        d.initial = q0;
        for (StateId q = 0; q < size(); ++q) {
            if (gamma[q]) d.finals.insert(q);
            for (std::size_t s = 0; s < input_alphabet.size(); ++s)
                if (delta[q][s]) d.set(q, s, delta[q][s]->to);
        }
        return d;
    }

    /// The register every output expression reads, when there is one.
    std::optional<std::size_t> fixed_output_register() const {
        std::optional<std::size_t> reg;
        for (const auto& g : gamma) {
            if (!g) continue;
            if (reg && *reg != g->src) return std::nullopt;
            reg = g->src;
        }
        if (reg || registers.empty()) return reg;
        return std::size_t{0};
    }

    void validate() const {
        validate_names(states, "state");
        validate_names(registers, "register");
        validate_alphabet(input_alphabet);
        validate_alphabet(output_alphabet);
        if (states.empty()) throw InputError("aSST without states");
        if (q0 >= size()) throw InputError("initial state out of range");
        if (v0.size() != register_count()) throw InputError("initial valuation must assign every register");
        auto check_word = [&](const Word& w) {
            for (const auto& s : w)
                if (!symbol_index(output_alphabet, s)) throw InputError("output symbol '" + s + "' not in output alphabet");
        };
        auto check_expr = [&](const AppendExpr& e) {
            if (e.src >= register_count()) throw InputError("expression reads an unknown register");
            check_word(e.append);
        };
        for (const auto& w : v0) check_word(w);
        if (delta.size() != size() || gamma.size() != size()) throw InputError("table size mismatch");
        for (const auto& row : delta) {
            if (row.size() != input_alphabet.size()) throw InputError("table width mismatch");
            for (const auto& e : row) {
                if (!e) continue;
                if (e->to >= size()) throw InputError("transition target out of range");
                if (e->update.size() != register_count()) throw InputError("update size mismatch");
                for (const auto& u : e->update)
                    if (u) check_expr(*u);
            }
        }
        for (const auto& g : gamma)
            if (g) check_expr(*g);
    }

    bool operator==(const Asst&) const = default;
};

/// [[S]](w), or nullopt when the run is blocked, ends outside dom(gamma), or the
/// output register is undefined.
inline std::optional<Word> eval_asst(const Asst& s, const Word& w) {
    StateId q = s.q0;
    Valuation v(s.v0.begin(), s.v0.end());
    bool blocked = false;
    for (const auto& sym : w) {
        auto idx = require_symbol(s.input_alphabet, sym);
        if (blocked) continue;
        const auto& e = s.delta[q][idx];
        if (!e) {
            blocked = true;
            continue;
        }
        v = apply_update(v, e->update);
        q = e->to;
    }
    if (blocked || !s.gamma[q]) return std::nullopt;
    return apply_expr(v, *s.gamma[q]);
}

inline WordFunction as_function(const Asst& s) {
    auto keep = std::make_shared<const Asst>(s);
    return [keep](const Word& w) { return eval_asst(*keep, w); };
}

/// Rewrites the machine so that every output expression reads the same register.
/// Each final state gets a transposition of registers; updates are conjugated
/// accordingly. State and register counts are unchanged.
inline Asst normalize_output_register(const Asst& s) {
    const std::size_t k = s.register_count();
    if (k == 0) return s;
    std::vector<std::size_t> votes(k, 0);
    for (const auto& g : s.gamma)
        if (g) ++votes[g->src];
    const std::size_t out = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());

    // perm[q][x]: where original register x lives while in state q.
    std::vector<std::vector<std::size_t>> perm(s.size(), std::vector<std::size_t>(k));
    for (StateId q = 0; q < s.size(); ++q) {
        for (std::size_t x = 0; x < k; ++x) perm[q][x] = x;
        if (s.gamma[q] && s.gamma[q]->src != out) std::swap(perm[q][s.gamma[q]->src], perm[q][out]);
    }

    Asst r = s;
    for (std::size_t x = 0; x < k; ++x) r.v0[perm[s.q0][x]] = s.v0[x];
    for (StateId q = 0; q < s.size(); ++q) {
        if (s.gamma[q]) r.gamma[q] = AppendExpr{perm[q][s.gamma[q]->src], s.gamma[q]->append};
        for (std::size_t sym = 0; sym < s.input_alphabet.size(); ++sym) {
            const auto& e = s.delta[q][sym];
            if (!e) continue;
            Substitution upd(k);
            for (std::size_t x = 0; x < k; ++x)
                if (e->update[x]) upd[perm[e->to][x]] = AppendExpr{perm[q][e->update[x]->src], e->update[x]->append};
            r.delta[q][sym]->update = std::move(upd);
        }
    }
    return r;
}

/// A pair of states reading the same letter whose updates of one register read
/// from different sources.
struct FlowDisagreement {
    std::size_t reg;
    std::size_t symbol;
    StateId first;
    StateId second;
};

inline std::optional<FlowDisagreement> find_flow_disagreement(const Asst& s) {
    for (std::size_t sym = 0; sym < s.input_alphabet.size(); ++sym)
        for (std::size_t x = 0; x < s.register_count(); ++x) {
            std::optional<std::pair<StateId, std::size_t>> seen;
            for (StateId q = 0; q < s.size(); ++q) {
                const auto& e = s.delta[q][sym];
                if (!e || !e->update[x]) continue;
                if (!seen) seen = std::make_pair(q, e->update[x]->src);
                else if (seen->second != e->update[x]->src) return FlowDisagreement{x, sym, seen->first, q};
            }
        }
    return std::nullopt;
}

/// Register sources depend only on the letter read, never on the state.
inline bool has_independent_flows(const Asst& s) { return !find_flow_disagreement(s).has_value(); }

/// Vertex (state, register) of the flow graph.
using FlowVertex = std::pair<StateId, std::size_t>;

/// (q, Y) -> (delta_s(q, a), X) whenever delta_r(q, a)(X) = Y . w.
struct FlowEdge {
    FlowVertex from;
    std::size_t symbol;
    FlowVertex to;
    auto operator<=>(const FlowEdge&) const = default;
};

inline std::vector<FlowEdge> flow_graph(const Asst& s) {
    std::vector<FlowEdge> edges;
    for (StateId q = 0; q < s.size(); ++q)
        for (std::size_t sym = 0; sym < s.input_alphabet.size(); ++sym) {
            const auto& e = s.delta[q][sym];
            if (!e) continue;
            for (std::size_t x = 0; x < s.register_count(); ++x)
                if (e->update[x]) edges.push_back({{q, e->update[x]->src}, sym, {e->to, x}});
        }
    std::sort(edges.begin(), edges.end());
    return edges;
}

struct DomainCheck {
    bool domain_is_underlying_language = true;
    /// Least (state, register) pair, by names, that is live and left unvalued directly
    /// by a reachable transition. Every live undefined pair is fed by such a pair.
    std::optional<FlowVertex> witness;
};

/// Decides dom([[S]]) == L(underlying automaton) for machines with partial updates.
/// A pair (q, X) is live when X flows to an output register along some path from q,
/// and possibly undefined when some run reaching q leaves X unvalued. The domain is
/// strictly smaller iff some pair is both.
inline DomainCheck check_domain_is_underlying_language(const Asst& s) {
    const std::size_t k = s.register_count();
    auto id = [k](FlowVertex v) { return v.first * k + v.second; };
    const auto edges = flow_graph(s);
    const std::size_t n = s.size() * k;

    std::vector<std::vector<std::size_t>> succ(n), pred(n);
    for (const auto& e : edges) {
        succ[id(e.from)].push_back(id(e.to));
        pred[id(e.to)].push_back(id(e.from));
    }

    std::vector<bool> live(n, false);
    std::deque<std::size_t> todo;
    for (StateId q = 0; q < s.size(); ++q)
        if (s.gamma[q]) {
            live[id({q, s.gamma[q]->src})] = true;
            todo.push_back(id({q, s.gamma[q]->src}));
        }
    while (!todo.empty()) {
        auto v = todo.front();
        todo.pop_front();
        for (auto p : pred[v])
            if (!live[p]) {
                live[p] = true;
                todo.push_back(p);
            }
    }

    const auto reachable = reachable_states(s.underlying());
    std::vector<bool> undef(n, false), seed(n, false);
    for (StateId q = 0; q < s.size(); ++q) {
        if (!reachable[q]) continue;
        for (const auto& e : s.delta[q]) {
            if (!e) continue;
            for (std::size_t x = 0; x < k; ++x)
                if (!e->update[x] && !undef[id({e->to, x})]) {
                    undef[id({e->to, x})] = seed[id({e->to, x})] = true;
                    todo.push_back(id({e->to, x}));
                }
        }
    }
    while (!todo.empty()) {
        auto v = todo.front();
        todo.pop_front();
        for (auto t : succ[v])
            if (!undef[t]) {
                undef[t] = true;
                todo.push_back(t);
            }
    }

    DomainCheck result;
    for (StateId q = 0; q < s.size(); ++q)
        for (std::size_t x = 0; x < k; ++x) {
            if (!live[id({q, x})] || !undef[id({q, x})]) continue;
            result.domain_is_underlying_language = false;
            if (!seed[id({q, x})]) continue;
            auto key = [&](FlowVertex v) { return std::tie(s.states[v.first], s.registers[v.second]); };
            if (!result.witness || key({q, x}) < key(*result.witness)) result.witness = FlowVertex{q, x};
        }
    return result;
}

}  // namespace sstforge
