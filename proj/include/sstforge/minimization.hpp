#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sstforge/asst.hpp"
#include "sstforge/bimachines.hpp"
#include "sstforge/refinement.hpp"

namespace sstforge {

/// Undirected graph without self-loops.
struct Graph {
    std::vector<std::string> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // u < v, sorted, unique

    std::size_t size() const { return vertices.size(); }

    void add_edge(std::size_t u, std::size_t v) {
        if (u == v) throw InputError("self-loop on vertex '" + vertices[u] + "'");
        if (u > v) std::swap(u, v);
        std::pair<std::size_t, std::size_t> e{u, v};
        auto it = std::lower_bound(edges.begin(), edges.end(), e);
        if (it == edges.end() || *it != e) edges.insert(it, e);
    }

    bool adjacent(std::size_t u, std::size_t v) const {
        if (u > v) std::swap(u, v);
        return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
    }

    void validate() const {
        validate_names(vertices, "vertex");
        for (auto [u, v] : edges) {
            if (u >= size() || v >= size()) throw InputError("edge endpoint out of range");
            if (u == v) throw InputError("self-loop on vertex '" + vertices[u] + "'");
        }
    }

    static Graph complete(std::size_t n) {
        Graph g;
        for (std::size_t i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) g.add_edge(i, j);
        return g;
    }

    static Graph cycle(std::size_t n) {
        Graph g;
        for (std::size_t i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
        for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
        return g;
    }

    static Graph path(std::size_t n) {
        Graph g;
        for (std::size_t i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
        for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
        return g;
    }

    bool operator==(const Graph&) const = default;
};

inline std::string unused_name(const std::vector<std::string>& taken, std::string name) {
    while (std::find(taken.begin(), taken.end(), name) != taken.end()) name += "'";
    return name;
}

/// Hardness instance: a single state reading vertices, registers V and S0, S_N, S_F.
/// Reading v sets S0 := v, v := S_F f and v' := S_N n for every edge {v, v'}; the
/// other registers become undefined. S0 is the output register. S_N and S_F start
/// with different contents so that no register can stand for both.
inline Asst coloring_to_asst(const Graph& g) {
    g.validate();
    if (g.size() == 0) throw InputError("graph without vertices");
    const std::size_t n = g.size();
    std::vector<std::string> regs = g.vertices;
    const std::size_t S0 = n, SN = n + 1, SF = n + 2;
    regs.push_back(unused_name(g.vertices, "S0"));
    regs.push_back(unused_name(g.vertices, "S_N"));
    regs.push_back(unused_name(g.vertices, "S_F"));
    Asst s({"q"}, regs, g.vertices, {"n", "f"});
    s.v0[SN] = {"n"};
    s.v0[SF] = {"f"};
    for (std::size_t v = 0; v < n; ++v) {
        Substitution upd(n + 3);
        upd[S0] = AppendExpr{v, {}};
        upd[v] = AppendExpr{SF, {"f"}};
        for (std::size_t u = 0; u < n; ++u)
            if (g.adjacent(u, v)) upd[u] = AppendExpr{SN, {"n"}};
        s.set_transition(0, v, 0, std::move(upd));
    }
    s.gamma[0] = AppendExpr{S0, {}};
    return s;
}

/// Mirrored right transducer of an aSST. It reads the run annotation of a word from
/// right to left, starting with (q_n, <end>), and follows the register that ends up in
/// the output: states are pairs (register, left state) plus a start state, and the
/// outputs are the appended words reversed.
struct MirroredRight {
    Fst transducer;
    std::vector<std::pair<StateId, std::size_t>> letters;  // (state, symbol) per letter; symbol npos for <end>
    static constexpr std::size_t end = static_cast<std::size_t>(-1);
};

inline MirroredRight mirrored_right_transducer(const Asst& s) {
    const std::size_t k = s.register_count();
    MirroredRight m;
    Fst& t = m.transducer;
    std::vector<std::vector<std::optional<std::size_t>>> letter(s.size(), std::vector<std::optional<std::size_t>>(s.input_alphabet.size()));
    std::vector<std::optional<std::size_t>> end_letter(s.size());
    for (StateId p = 0; p < s.size(); ++p)
        for (std::size_t a = 0; a < s.input_alphabet.size(); ++a)
            if (s.delta[p][a]) {
                letter[p][a] = t.input_alphabet.size();
                t.input_alphabet.push_back(pair_symbol_name(s.states[p], s.input_alphabet[a]));
                m.letters.emplace_back(p, a);
            }
    for (StateId q = 0; q < s.size(); ++q)
        if (s.gamma[q]) {
            end_letter[q] = t.input_alphabet.size();
            t.input_alphabet.push_back(pair_symbol_name(s.states[q], end_marker));
            m.letters.emplace_back(q, MirroredRight::end);
        }
    t.output_alphabet = s.output_alphabet;
    auto id = [k](std::size_t x, StateId q) { return 1 + q * k + x; };
    t.states.push_back(unused_name(s.states, "start"));
    for (StateId q = 0; q < s.size(); ++q)
        for (std::size_t x = 0; x < k; ++x) t.states.push_back(s.registers[x] + "@" + s.states[q]);
    t.init[0] = {};
    for (StateId q = 0; q < s.size(); ++q)
        if (s.gamma[q]) t.trans[{0, *end_letter[q], id(s.gamma[q]->src, q)}] = reversed(s.gamma[q]->append);
    for (StateId p = 0; p < s.size(); ++p)
        for (std::size_t a = 0; a < s.input_alphabet.size(); ++a) {
            const auto& e = s.delta[p][a];
            if (!e) continue;
            for (std::size_t x = 0; x < k; ++x)
                if (e->update[x])
                    t.trans[{id(x, e->to), *letter[p][a], id(e->update[x]->src, p)}] = reversed(e->update[x]->append);
        }
    for (std::size_t x = 0; x < k; ++x) t.final_out[id(x, s.q0)] = reversed(s.v0[x]);
    return m;
}

struct FaRegMinOptions {
    /// Longest word checked by the certifying oracle.
    std::size_t certify_len = 8;
    /// Cap on the number of words the oracle evaluates; certify_len shrinks to fit.
    std::size_t certify_budget = 20000;
};

struct FaRegMinResult {
    std::optional<Asst> machine;
    /// A negative answer is conclusive: the mirrored right transducer is
    /// letter-to-letter or every useful state past the start is final.
    bool exact = false;
    /// Word length up to which the returned machine was checked against the input.
    std::size_t certified_len = 0;
    std::optional<Word> counterexample;
};

inline std::size_t certification_length(std::size_t alphabet, const FaRegMinOptions& opt) {
    std::size_t len = 0, total = 1, layer = 1;
    while (len < opt.certify_len) {
        layer *= std::max<std::size_t>(alphabet, 1);
        if (total + layer > opt.certify_budget) break;
        total += layer;
        ++len;
    }
    return len;
}

/// Fixed-underlying-automaton register minimization: an aSST with total updates, at
/// most k registers and the same underlying automaton that agrees with s on dom(s).
/// Solved as a minimal refinement of the compatibility relation of the mirrored
/// right transducer; solutions are re-checked with the bounded oracle.
inline FaRegMinResult fa_reg_min(const Asst& s, std::size_t k, const FaRegMinOptions& opt = {}) {
    s.validate();
    if (k == 0) throw InputError("k must be at least 1");
    FaRegMinResult res;
    const auto mr = mirrored_right_transducer(s);
    const Fst& P = mr.transducer;
    const auto c = sequential_compat(P);

    bool prefix_closed = true;
    for (StateId p = 0; p < c.pc.size(); ++p)
        if (c.useful[p] && c.original[p] && *c.original[p] != 0 && !c.pc.base.is_final(p)) prefix_closed = false;
    res.exact = P.is_letter_to_letter() || prefix_closed;

    auto found = find_refinement(c.pc, k);
    if (!found) return res;
    const auto& [B, reached] = *found;

    FstEvaluator ev(P);
    // Output of a useful member of R(b) on a letter, if any.
    auto member_output = [&](StateId b, std::size_t letter) -> std::optional<Word> {
        std::optional<Word> out;
        for_each_member(reached[b], [&](StateId p) {
            auto o = c.original[p];
            if (out || !o || !c.useful[p]) return;
            auto st = ev.step(*o, letter);
            if (st && c.useful[*c.pc.base.step(p, letter)]) out = *st->second;
        });
        return out;
    };

    const std::size_t m = B.size();
    std::vector<std::string> regs;
    for (std::size_t b = 0; b < std::max(m, k); ++b) regs.push_back("R" + std::to_string(b));
    Asst r(s.states, regs, s.input_alphabet, s.output_alphabet);
    r.q0 = s.q0;
    for (StateId b = 0; b < m; ++b)
        for_each_member(reached[b], [&](StateId p) {
            auto o = c.original[p];
            if (!o || !c.useful[p]) return;
            auto it = P.final_out.find(*o);
            if (it != P.final_out.end()) r.v0[b] = reversed(it->second);
        });
    for (std::size_t letter = 0; letter < mr.letters.size(); ++letter) {
        auto [p, a] = mr.letters[letter];
        if (a == MirroredRight::end) {
            StateId to = *B.step(B.initial, letter);
            r.gamma[p] = AppendExpr{to, reversed(member_output(B.initial, letter).value_or(Word{}))};
            continue;
        }
        Substitution upd = identity_substitution(regs.size());
        for (StateId b = 0; b < m; ++b)
            upd[b] = AppendExpr{*B.step(b, letter), reversed(member_output(b, letter).value_or(Word{}))};
        r.set_transition(p, a, s.delta[p][a]->to, std::move(upd));
    }

    res.certified_len = certification_length(s.input_alphabet.size(), opt);
    res.counterexample =
        first_disagreement(as_function(s), as_function(r), s.input_alphabet, res.certified_len, AgreementMode::ExtendsFirst);
    if (!res.counterexample) res.machine = std::move(r);
    return res;
}

/// Least k for which fa_reg_min succeeds, searching k = 1, 2, ...
inline std::size_t fa_reg_min_value(const Asst& s, const FaRegMinOptions& opt = {}) {
    for (std::size_t k = 1;; ++k) {
        if (fa_reg_min(s, k, opt).machine) return k;
        if (k > s.register_count() + 1) throw StructuralError("no solution up to the input register count");
    }
}

/// Two-register machine for f(u sigma) = sigma u on words of length n + 1. The first
/// transition writes a in X_a and b in X_b; both registers then copy the input and the
/// last letter picks the register to output.
inline Asst tradeoff_example(std::size_t n, const Alphabet& sigma = {"a", "b"}) {
    if (n == 0) throw InputError("n must be at least 1");
    std::vector<std::string> states;
    for (std::size_t i = 0; i <= n; ++i) states.push_back("p" + std::to_string(i));
    std::vector<std::string> regs;
    for (const auto& s : sigma) {
        states.push_back("f_" + s);
        regs.push_back("X_" + s);
    }
    const std::size_t m = sigma.size();
    Asst s(states, regs, sigma, sigma);
    for (std::size_t a = 0; a < m; ++a) {
        Substitution first(m), copy(m);
        for (std::size_t x = 0; x < m; ++x) {
            first[x] = AppendExpr{x, {sigma[x], sigma[a]}};
            copy[x] = AppendExpr{x, {sigma[a]}};
        }
        s.set_transition(0, a, 1, first);
        for (std::size_t i = 1; i < n; ++i) s.set_transition(i, a, i + 1, copy);
        s.set_transition(n, a, n + 1 + a, identity_substitution(m));
    }
    for (std::size_t x = 0; x < m; ++x) s.gamma[n + 1 + x] = AppendExpr{x, {}};
    return s;
}

/// Closed form of the function realized by tradeoff_example(n).
inline WordFunction tradeoff_function(std::size_t n) {
    return [n](const Word& w) -> std::optional<Word> {
        if (w.size() != n + 1) return std::nullopt;
        Word out{w.back()};
        out.insert(out.end(), w.begin(), w.end() - 1);
        return out;
    };
}

}  // namespace sstforge
