#pragma once

#include <algorithm>
#include <deque>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sstforge/asst.hpp"
#include "sstforge/bimachines.hpp"

namespace sstforge {

inline std::string describe(const Asst& s, const FlowDisagreement& d) {
    return "register '" + s.registers[d.reg] + "' reads different sources on '" + s.input_alphabet[d.symbol] +
           "' in states '" + s.states[d.first] + "' and '" + s.states[d.second] + "'";
}

/// aSST with independent flows and a fixed output register to a bimachine whose left
/// automaton is the underlying automaton and whose right automaton is the flow
/// automaton on registers.
inline Bimachine asst_iffo_to_bimachine(const Asst& s) {
    if (s.register_count() == 0) throw PreconditionError("aSST has no registers");
    if (!s.has_total_updates()) throw PreconditionError("aSST has partial updates");
    if (auto d = find_flow_disagreement(s)) throw PreconditionError("flows depend on states: " + describe(s, *d));
    auto out = s.fixed_output_register();
    if (!out) throw PreconditionError("aSST has no fixed output register");

    const std::size_t k = s.register_count();
    Bimachine b;
    b.left = s.underlying();
    b.output_alphabet = s.output_alphabet;
    b.right.backward = Dfa(s.registers, s.input_alphabet);
    b.right.backward.initial = *out;
    for (std::size_t x = 0; x < k; ++x) b.right.backward.finals.insert(x);
    for (StateId q = 0; q < s.size(); ++q)
        for (std::size_t sym = 0; sym < s.input_alphabet.size(); ++sym) {
            const auto& e = s.delta[q][sym];
            if (!e) continue;
            for (std::size_t x = 0; x < k; ++x) {
                b.right.backward.set(x, sym, e->update[x]->src);
                b.omega[{q, sym, x}] = e->update[x]->append;
            }
        }
    for (std::size_t x = 0; x < k; ++x) b.lambda[x] = s.v0[x];
    for (StateId q = 0; q < s.size(); ++q)
        if (s.gamma[q]) b.rho[q] = s.gamma[q]->append;
    b.left_recognizes_domain = true;
    return b;
}

/// Places where bimachine_to_asst_iffo had to make an arbitrary choice.
struct ConversionReport {
    std::vector<StateId> defaulted_registers;                           // v0 set to the empty word
    std::vector<std::tuple<StateId, std::size_t, StateId>> fallbacks;  // (l, symbol, r) given the identity update
    bool exact() const { return defaulted_registers.empty() && fallbacks.empty(); }
};

struct AsstWithReport {
    Asst machine;
    ConversionReport report;
};

/// Bimachine to aSST with independent flows: states are left states, registers are
/// right states, and r_f is the output register. The result agrees with the
/// bimachine on its domain and may be defined on more words.
inline AsstWithReport bimachine_to_asst_iffo(const Bimachine& b) {
    const auto& L = b.left;
    const auto& R = b.right;
    AsstWithReport res;
    Asst& s = res.machine;
    s = Asst(L.states, R.states(), L.alphabet, b.output_alphabet);
    s.q0 = L.initial;
    for (StateId r = 0; r < R.size(); ++r) {
        auto it = b.lambda.find(r);
        if (it != b.lambda.end()) s.v0[r] = it->second;
        else res.report.defaulted_registers.push_back(r);
    }
    for (StateId l = 0; l < L.size(); ++l)
        for (std::size_t sym = 0; sym < L.alphabet.size(); ++sym) {
            auto to = L.step(l, sym);
            if (!to) continue;
            Substitution upd(R.size());
            for (StateId r = 0; r < R.size(); ++r) {
                auto src = R.step(r, sym);
                auto w = b.omega.find({l, sym, r});
                if (src && w != b.omega.end()) {
                    upd[r] = AppendExpr{*src, w->second};
                } else {
                    upd[r] = AppendExpr{r, {}};
                    res.report.fallbacks.emplace_back(l, sym, r);
                }
            }
            s.set_transition(l, sym, *to, std::move(upd));
        }
    for (const auto& [l, w] : b.rho) s.gamma[l] = AppendExpr{R.final_state(), w};
    return res;
}

/// aSST with total updates and a fixed output register to an asynchronous bimachine
/// with |L| = |Q| and |R| = |X|.
inline AsyncBimachine asst_to_async_bimachine(const Asst& s) {
    if (s.register_count() == 0) throw PreconditionError("aSST has no registers");
    if (!s.has_total_updates()) throw PreconditionError("aSST has partial updates");
    auto out = s.fixed_output_register();
    if (!out) throw PreconditionError("aSST has no fixed output register; normalize it first");

    const std::size_t k = s.register_count();
    AsyncBimachine b;
    b.left = s.underlying();
    b.output_alphabet = s.output_alphabet;
    b.right.backward = Dfa(s.registers, pair_alphabet(b.left));
    b.right.backward.initial = *out;
    for (std::size_t x = 0; x < k; ++x) {
        b.right.backward.finals.insert(x);
        b.lambda[x] = s.v0[x];
    }
    for (StateId q = 0; q < s.size(); ++q)
        for (std::size_t sym = 0; sym < s.input_alphabet.size(); ++sym) {
            const auto& e = s.delta[q][sym];
            if (!e) continue;
            for (std::size_t x = 0; x < k; ++x) {
                b.right.backward.set(x, b.pair_symbol(q, sym), e->update[x]->src);
                b.omega[{q, sym, x}] = e->update[x]->append;
            }
        }
    for (StateId q = 0; q < s.size(); ++q)
        if (s.gamma[q]) b.rho[q] = s.gamma[q]->append;
    return b;
}

/// Inverse of asst_to_async_bimachine: delta_r(l, sigma)(r) = r' . omega(l, sigma, r)
/// with r' = (l, sigma) . r.
inline Asst async_bimachine_to_asst(const AsyncBimachine& b) {
    if (auto why = b.convention_violation()) throw StructuralError(*why);
    const auto& L = b.left;
    const auto& R = b.right;
    Asst s(L.states, R.states(), L.alphabet, b.output_alphabet);
    s.q0 = L.initial;
    for (StateId r = 0; r < R.size(); ++r) s.v0[r] = b.lambda.at(r);
    for (StateId l = 0; l < L.size(); ++l)
        for (std::size_t sym = 0; sym < L.alphabet.size(); ++sym) {
            auto to = L.step(l, sym);
            if (!to) continue;
            Substitution upd(R.size());
            for (StateId r = 0; r < R.size(); ++r)
                upd[r] = AppendExpr{*b.right_step(r, l, sym), b.omega.at({l, sym, r})};
            s.set_transition(l, sym, *to, std::move(upd));
        }
    for (const auto& [l, w] : b.rho) s.gamma[l] = AppendExpr{R.final_state(), w};
    return s;
}

/// Run expansion: an unambiguous transducer on pairs (state, register) that follows,
/// backwards from the output, the register whose content ends up in the output.
inline Fst asst_to_fst(const Asst& s) {
    const std::size_t k = s.register_count();
    Fst t;
    t.input_alphabet = s.input_alphabet;
    t.output_alphabet = s.output_alphabet;
    auto id = [k](StateId q, std::size_t x) { return q * k + x; };
    for (StateId q = 0; q < s.size(); ++q)
        for (std::size_t x = 0; x < k; ++x) t.states.push_back(s.states[q] + "/" + s.registers[x]);
    for (std::size_t x = 0; x < k; ++x) t.init[id(s.q0, x)] = s.v0[x];
    for (StateId q = 0; q < s.size(); ++q) {
        for (std::size_t sym = 0; sym < s.input_alphabet.size(); ++sym) {
            const auto& e = s.delta[q][sym];
            if (!e) continue;
            for (std::size_t x = 0; x < k; ++x)
                if (e->update[x]) t.trans[{id(q, e->update[x]->src), sym, id(e->to, x)}] = e->update[x]->append;
        }
        if (s.gamma[q]) t.final_out[id(q, s.gamma[q]->src)] = s.gamma[q]->append;
    }
    return t;
}

/// Equality up to renaming of states and registers. States are matched by a
/// breadth-first walk from the initial states, so every state of both machines
/// must be reachable; registers are matched by trying permutations.
inline bool isomorphic(const Asst& a, const Asst& b) {
    if (a.size() != b.size() || a.register_count() != b.register_count()) return false;
    if (a.input_alphabet.size() != b.input_alphabet.size()) return false;
    std::vector<std::size_t> sym;
    try {
        sym = alphabet_map(a.input_alphabet, b.input_alphabet);
    } catch (const InputError&) {
        return false;
    }
    std::vector<std::optional<StateId>> fwd(a.size()), bwd(b.size());
    fwd[a.q0] = b.q0;
    bwd[b.q0] = a.q0;
    std::deque<StateId> todo{a.q0};
    while (!todo.empty()) {
        StateId p = todo.front();
        todo.pop_front();
        StateId q = *fwd[p];
        if (a.gamma[p].has_value() != b.gamma[q].has_value()) return false;
        for (std::size_t s = 0; s < a.input_alphabet.size(); ++s) {
            const auto& ea = a.delta[p][s];
            const auto& eb = b.delta[q][sym[s]];
            if (ea.has_value() != eb.has_value()) return false;
            if (!ea) continue;
            if (!fwd[ea->to] && !bwd[eb->to]) {
                fwd[ea->to] = eb->to;
                bwd[eb->to] = ea->to;
                todo.push_back(ea->to);
            } else if (fwd[ea->to] != eb->to || bwd[eb->to] != ea->to) {
                return false;
            }
        }
    }
    if (std::any_of(fwd.begin(), fwd.end(), [](const auto& x) { return !x.has_value(); })) return false;

    const std::size_t k = a.register_count();
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    auto map_expr = [&](const std::optional<AppendExpr>& e) -> std::optional<AppendExpr> {
        if (!e) return std::nullopt;
        return AppendExpr{perm[e->src], e->append};
    };
    do {
        bool ok = true;
        for (std::size_t x = 0; x < k && ok; ++x) ok = a.v0[x] == b.v0[perm[x]];
        for (StateId p = 0; p < a.size() && ok; ++p) {
            ok = map_expr(a.gamma[p]) == b.gamma[*fwd[p]];
            for (std::size_t s = 0; s < a.input_alphabet.size() && ok; ++s) {
                const auto& ea = a.delta[p][s];
                if (!ea) continue;
                const auto& eb = b.delta[*fwd[p]][sym[s]];
                for (std::size_t x = 0; x < k && ok; ++x) ok = map_expr(ea->update[x]) == eb->update[perm[x]];
            }
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

}  // namespace sstforge
