#pragma once

// Exhaustive checks that share no code with the solvers they validate.

#include <functional>
#include <map>
#include <set>

#include "sstforge.hpp"

namespace sstforge::testing {

/// True iff the vertices can be colored with c colors, trying every assignment.
inline bool colorable(const Graph& g, std::size_t c) {
    const std::size_t n = g.size();
    if (n == 0) return true;
    if (c == 0) return false;
    std::vector<std::size_t> color(n, 0);
    while (true) {
        bool proper = true;
        for (auto [u, v] : g.edges) proper = proper && color[u] != color[v];
        if (proper) return true;
        std::size_t i = 0;
        while (i < n && ++color[i] == c) color[i++] = 0;
        if (i == n) return false;
    }
}

inline std::size_t chromatic_number(const Graph& g) {
    std::size_t c = 0;
    while (!colorable(g, c)) ++c;
    return c;
}

/// Least number of states of a total letter-to-letter sequential transducer agreeing
/// with t on dom(t). The search assigns transitions of the candidate while walking
/// the product with t, restricted to states of t that can still reach a final state.
inline std::size_t min_extension_states(const Fst& t) {
    const std::size_t n = t.size(), m = t.input_alphabet.size();
    std::vector<std::vector<std::optional<std::pair<StateId, Symbol>>>> step(n, std::vector<std::optional<std::pair<StateId, Symbol>>>(m));
    for (const auto& [e, w] : t.trans) step[e.from][e.symbol] = std::make_pair(e.to, w.at(0));
    std::vector<bool> useful(n, false);
    for (const auto& [q, w] : t.final_out) useful[q] = true;
    for (bool changed = true; changed;) {
        changed = false;
        for (StateId q = 0; q < n; ++q)
            for (std::size_t a = 0; a < m && !useful[q]; ++a)
                if (step[q][a] && useful[step[q][a]->first]) useful[q] = changed = true;
    }
    const StateId q0 = t.init.begin()->first;
    if (!useful[q0]) return 1;

    for (std::size_t k = 1;; ++k) {
        std::vector<std::vector<std::optional<std::pair<StateId, Symbol>>>> cand(k, std::vector<std::optional<std::pair<StateId, Symbol>>>(m));
        std::size_t used = 1;
        std::function<bool()> solve = [&]() -> bool {
            std::set<std::pair<StateId, StateId>> seen{{0, q0}};
            std::vector<std::pair<StateId, StateId>> todo{{0, q0}};
            while (!todo.empty()) {
                auto [x, q] = todo.back();
                todo.pop_back();
                for (std::size_t a = 0; a < m; ++a) {
                    if (!step[q][a] || !useful[step[q][a]->first]) continue;
                    const auto& [q2, out] = *step[q][a];
                    if (!cand[x][a]) {
                        for (StateId y = 0; y < std::min(used + 1, k); ++y) {
                            const bool fresh = y == used;
                            if (fresh) ++used;
                            cand[x][a] = std::make_pair(y, out);
                            if (solve()) return true;
                            if (fresh) --used;
                        }
                        cand[x][a].reset();
                        return false;
                    }
                    if (cand[x][a]->second != out) return false;
                    std::pair<StateId, StateId> next{cand[x][a]->first, q2};
                    if (seen.insert(next).second) todo.push_back(next);
                }
            }
            return true;
        };
        if (solve()) return k;
    }
}

/// Least number of states of a one-register aSST with total updates, initial
/// content and appends of length at most max_append, that equals f on every word of
/// length at most horizon. Returns nullopt if none has at most max_states states.
inline std::optional<std::size_t> min_single_register_states(const WordFunction& f, const Alphabet& sigma,
                                                             std::size_t max_states, std::size_t max_append,
                                                             std::size_t horizon) {
    const auto words = all_words(sigma, horizon);
    const auto appends = all_words(sigma, max_append);
    const std::size_t m = sigma.size();
    for (std::size_t s = 1; s <= max_states; ++s) {
        // Transition: unset, blocked, or (target, append index).
        struct Move {
            bool set = false;
            bool blocked = false;
            StateId to = 0;
            std::size_t append = 0;
        };
        struct Final {
            bool set = false;
            bool defined = false;
            std::size_t append = 0;
        };
        std::vector<std::vector<Move>> delta(s, std::vector<Move>(m));
        std::vector<Final> gamma(s);
        std::optional<std::size_t> v0;
        std::size_t used = 1;

        std::function<bool(std::size_t)> go = [&](std::size_t wi) -> bool {
            if (wi == words.size()) return true;
            if (!v0) {
                for (std::size_t i = 0; i < appends.size(); ++i) {
                    v0 = i;
                    if (go(wi)) return true;
                }
                v0.reset();
                return false;
            }
            const Word& w = words[wi];
            StateId q = 0;
            Word reg = appends[*v0];
            bool blocked = false;
            for (const auto& sym : w) {
                const std::size_t a = require_symbol(sigma, sym);
                Move& mv = delta[q][a];
                if (!mv.set) {
                    mv.set = true;
                    mv.blocked = true;
                    if (go(wi)) return true;
                    mv.blocked = false;
                    for (StateId y = 0; y < std::min(used + 1, s); ++y) {
                        const bool fresh = y == used;
                        if (fresh) ++used;
                        for (std::size_t i = 0; i < appends.size(); ++i) {
                            mv.to = y;
                            mv.append = i;
                            if (go(wi)) return true;
                        }
                        if (fresh) --used;
                    }
                    mv = Move{};
                    return false;
                }
                if (mv.blocked) {
                    blocked = true;
                    break;
                }
                append(reg, appends[mv.append]);
                q = mv.to;
            }
            if (!blocked && !gamma[q].set) {
                Final& g = gamma[q];
                g.set = true;
                g.defined = false;
                if (go(wi)) return true;
                g.defined = true;
                for (std::size_t i = 0; i < appends.size(); ++i) {
                    g.append = i;
                    if (go(wi)) return true;
                }
                g = Final{};
                return false;
            }
            std::optional<Word> out;
            if (!blocked && gamma[q].defined) out = concat(reg, appends[gamma[q].append]);
            if (out != f(w)) return false;
            return go(wi + 1);
        };
        if (go(0)) return s;
    }
    return std::nullopt;
}

/// dom([[s]]) == L(underlying) on every word of length at most max_len.
inline bool domain_matches_bounded(const Asst& s, std::size_t max_len) {
    const Dfa d = s.underlying();
    bool same = true;
    for_each_word(s.input_alphabet, max_len, [&](const Word& w) {
        same = eval_asst(s, w).has_value() == accepts(d, w);
        return same;
    });
    return same;
}

}  // namespace sstforge::testing
