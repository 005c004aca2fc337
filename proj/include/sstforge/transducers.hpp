#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "sstforge/automata.hpp"

namespace sstforge {

/// Finite-state transducer (Q, i, o, f) with partial output functions. The
/// underlying automaton is (Q, dom i, dom o, dom f).
struct Fst {
    std::vector<std::string> states;
    Alphabet input_alphabet;
    Alphabet output_alphabet;
    std::map<StateId, Word> init;
    std::map<Transition, Word> trans;
    std::map<StateId, Word> final_out;

    std::size_t size() const { return states.size(); }

    Nfa underlying() const {
        Nfa n;
        n.states = states;
        n.alphabet = input_alphabet;
        for (const auto& [q, w] : init) n.initials.insert(q);
        for (const auto& [q, w] : final_out) n.finals.insert(q);
        for (const auto& [t, w] : trans) n.add_transition(t.from, t.symbol, t.to);
        return n;
    }

    bool is_sequential() const { return is_deterministic(underlying()); }
    bool is_cosequential() const { return is_codeterministic(underlying()); }

    /// True iff every transition output has length exactly one.
    bool is_letter_to_letter() const {
        for (const auto& [t, w] : trans)
            if (w.size() != 1) return false;
        return true;
    }

    void validate() const {
        underlying().validate();
        validate_alphabet(output_alphabet);
        auto check = [&](const Word& w) {
            for (const auto& s : w)
                if (!symbol_index(output_alphabet, s)) throw InputError("output symbol '" + s + "' not in output alphabet");
        };
        for (const auto& [q, w] : init) check(w);
        for (const auto& [t, w] : trans) check(w);
        for (const auto& [q, w] : final_out) check(w);
    }

    bool operator==(const Fst&) const = default;
};

/// Precomputed adjacency for repeated evaluation of one transducer.
class FstEvaluator {
public:
    explicit FstEvaluator(const Fst& t, std::size_t run_cap = 100000)
        : t_(&t), run_cap_(run_cap), out_(t.size(), std::vector<std::vector<Edge>>(t.input_alphabet.size())) {
        for (const auto& [tr, w] : t.trans) out_[tr.from][tr.symbol].push_back({tr.to, &w});
    }

    /// Outputs of all accepting runs on w.
    std::set<Word> eval(const Word& w) const {
        std::map<StateId, std::set<Word>> frontier;
        for (const auto& [q, o] : t_->init) frontier[q].insert(o);
        for (const auto& s : w) {
            auto sym = require_symbol(t_->input_alphabet, s);
            std::map<StateId, std::set<Word>> next;
            std::size_t total = 0;
            for (const auto& [q, outs] : frontier)
                for (const auto& e : out_[q][sym])
                    for (const auto& o : outs) {
                        if (next[e.to].insert(concat(o, *e.out)).second) ++total;
                        if (total > run_cap_) throw ResourceError("transducer evaluation exceeded run cap");
                    }
            frontier = std::move(next);
            if (frontier.empty()) break;
        }
        std::set<Word> result;
        for (const auto& [q, outs] : frontier) {
            auto f = t_->final_out.find(q);
            if (f == t_->final_out.end()) continue;
            for (const auto& o : outs) result.insert(concat(o, f->second));
        }
        return result;
    }

    /// Single-valued evaluation; throws PreconditionError when w has two outputs.
    std::optional<Word> eval_function(const Word& w) const {
        auto outs = eval(w);
        if (outs.empty()) return std::nullopt;
        if (outs.size() > 1) throw PreconditionError("transducer is not functional on '" + to_string(w) + "'");
        return *outs.begin();
    }

    /// Unique transition from (q, symbol) of a sequential transducer.
    std::optional<std::pair<StateId, const Word*>> step(StateId q, std::size_t symbol) const {
        const auto& edges = out_[q][symbol];
        if (edges.empty()) return std::nullopt;
        return std::make_pair(edges.front().to, edges.front().out);
    }

private:
    struct Edge {
        StateId to;
        const Word* out;
    };
    const Fst* t_;
    std::size_t run_cap_;
    std::vector<std::vector<std::vector<Edge>>> out_;
};

inline std::set<Word> eval_fst(const Fst& t, const Word& w) { return FstEvaluator(t).eval(w); }

/// q |- w: output accumulated along the unique run of a sequential transducer from q.
inline std::optional<Word> production(const Fst& t, StateId q, const Word& w) {
    if (!t.is_sequential()) throw PreconditionError("production requires a sequential transducer");
    FstEvaluator ev(t);
    Word out;
    for (const auto& s : w) {
        auto st = ev.step(q, require_symbol(t.input_alphabet, s));
        if (!st) return std::nullopt;
        append(out, *st->second);
        q = st->first;
    }
    return out;
}

/// Shortest input of length <= max_len with two distinct outputs, if any.
inline std::optional<Word> non_functional_witness(const Fst& t, std::size_t max_len) {
    FstEvaluator ev(t);
    std::optional<Word> witness;
    for_each_word(t.input_alphabet, max_len, [&](const Word& w) {
        if (ev.eval(w).size() > 1) {
            witness = w;
            return false;
        }
        return true;
    });
    return witness;
}

inline WordFunction as_function(const Fst& t) {
    auto keep = std::make_shared<const Fst>(t);
    auto ev = std::make_shared<const FstEvaluator>(*keep);
    return [keep, ev](const Word& w) { return ev->eval_function(w); };
}

/// Bounded equivalence oracle. Returns the shortest word of length <= max_len on
/// which the transducers disagree. With ExtendsFirst only dom(t1) is compared.
/// Throws PreconditionError when either side is not functional within the bound.
inline std::optional<Word> check_equal_on_domain_bounded(const Fst& t1, const Fst& t2, std::size_t max_len,
                                                         AgreementMode mode = AgreementMode::Equal) {
    for (const auto* t : {&t1, &t2})
        if (auto w = non_functional_witness(*t, max_len))
            throw PreconditionError("transducer is not functional, witness '" + to_string(*w) + "'");
    return first_disagreement(as_function(t1), as_function(t2), t1.input_alphabet, max_len, mode);
}

/// One-state identity transducer over the alphabet.
inline Fst identity_fst(const Alphabet& alphabet) {
    Fst t;
    t.states = {"q"};
    t.input_alphabet = alphabet;
    t.output_alphabet = alphabet;
    t.init[0] = {};
    t.final_out[0] = {};
    for (std::size_t s = 0; s < alphabet.size(); ++s) t.trans[{0, s, 0}] = {alphabet[s]};
    return t;
}

}  // namespace sstforge
