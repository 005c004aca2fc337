#pragma once

#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sstforge/transducers.hpp"

namespace sstforge {

/// Set of base states, one bit per state. Bases are limited to 64 states.
using StateSet = std::uint64_t;

inline constexpr StateSet bit(StateId q) { return StateSet{1} << q; }

template <typename Fn>
void for_each_member(StateSet s, Fn&& fn) {
    while (s) {
        fn(static_cast<StateId>(std::countr_zero(s)));
        s &= s - 1;
    }
}

/// Reflexive, symmetric, transition-closed relation on the states of a complete DFA.
struct Precongruence {
    Dfa base;
    std::vector<StateSet> compat;  // compat[p] has bit q iff p ~ q

    std::size_t size() const { return base.size(); }
    bool compatible(StateId p, StateId q) const { return (compat[p] >> q) & 1U; }

    bool is_clique(StateSet s) const {
        bool ok = true;
        for_each_member(s, [&](StateId p) { ok = ok && (s & ~compat[p]) == 0; });
        return ok;
    }

    /// p . symbol for every p in s.
    StateSet image(StateSet s, std::size_t symbol) const {
        StateSet out = 0;
        for_each_member(s, [&](StateId p) { out |= bit(*base.step(p, symbol)); });
        return out;
    }

    /// Unordered incompatible pairs (p < q).
    std::vector<std::pair<StateId, StateId>> incompatible_pairs() const {
        std::vector<std::pair<StateId, StateId>> out;
        for (StateId p = 0; p < size(); ++p)
            for (StateId q = p + 1; q < size(); ++q)
                if (!compatible(p, q)) out.emplace_back(p, q);
        return out;
    }

    /// Compatible pairs (p < q), the form used in files.
    std::vector<std::pair<StateId, StateId>> compatible_pairs() const {
        std::vector<std::pair<StateId, StateId>> out;
        for (StateId p = 0; p < size(); ++p)
            for (StateId q = p + 1; q < size(); ++q)
                if (compatible(p, q)) out.emplace_back(p, q);
        return out;
    }

    bool operator==(const Precongruence&) const = default;
};

struct PrecongruenceViolation {
    StateId p;
    StateId q;
    std::size_t symbol;
};

/// First (p, q, symbol) with p ~ q but p.symbol !~ q.symbol.
inline std::optional<PrecongruenceViolation> find_precongruence_violation(const Dfa& base,
                                                                           const std::vector<StateSet>& compat) {
    for (StateId p = 0; p < base.size(); ++p)
        for (StateId q = p + 1; q < base.size(); ++q) {
            if (!((compat[p] >> q) & 1U)) continue;
            for (std::size_t s = 0; s < base.alphabet.size(); ++s)
                if (!((compat[*base.step(p, s)] >> *base.step(q, s)) & 1U)) return PrecongruenceViolation{p, q, s};
        }
    return std::nullopt;
}

/// Builds the relation generated by `pairs` (reflexive and symmetric closure) and
/// checks transition closure. Throws InputError naming the first violation.
inline Precongruence make_precongruence(Dfa base, const std::vector<std::pair<StateId, StateId>>& pairs) {
    base.validate();
    if (!base.is_complete()) throw InputError("precongruence base automaton must be complete");
    if (base.size() > 64) throw InputError("precongruence base automaton has more than 64 states");
    Precongruence pc;
    pc.compat.assign(base.size(), 0);
    for (StateId p = 0; p < base.size(); ++p) pc.compat[p] |= bit(p);
    for (auto [p, q] : pairs) {
        if (p >= base.size() || q >= base.size()) throw InputError("compatible pair out of range");
        pc.compat[p] |= bit(q);
        pc.compat[q] |= bit(p);
    }
    if (auto v = find_precongruence_violation(base, pc.compat))
        throw InputError("relation is not transition-closed: " + base.states[v->p] + " ~ " + base.states[v->q] +
                         " but not after '" + base.alphabet[v->symbol] + "'");
    pc.base = std::move(base);
    return pc;
}

/// Identity relation on a complete DFA.
inline Precongruence identity_precongruence(const Dfa& base) { return make_precongruence(base, {}); }

/// Calls fn on every clique that contains `required`, each exactly once. The
/// required set must itself be a clique.
template <typename Fn>
bool for_each_clique_containing(const Precongruence& pc, StateSet required, Fn&& fn) {
    StateSet candidates = (pc.size() == 64) ? ~StateSet{0} : (bit(pc.size()) - 1);
    for_each_member(required, [&](StateId p) { candidates &= pc.compat[p]; });
    candidates &= ~required;
    std::function<bool(StateSet, StateSet)> grow = [&](StateSet current, StateSet cand) {
        if (!fn(current)) return false;
        while (cand) {
            StateId p = static_cast<StateId>(std::countr_zero(cand));
            cand &= cand - 1;
            if (!grow(current | bit(p), cand & pc.compat[p])) return false;
        }
        return true;
    };
    return grow(required, candidates);
}

/// Every nonempty clique, each once, grouped by least member.
inline std::vector<StateSet> all_cliques(const Precongruence& pc) {
    std::vector<StateSet> out;
    std::function<void(StateSet, StateSet)> grow = [&](StateSet current, StateSet cand) {
        out.push_back(current);
        while (cand) {
            StateId p = static_cast<StateId>(std::countr_zero(cand));
            cand &= cand - 1;
            grow(current | bit(p), cand & pc.compat[p]);
        }
    };
    for (StateId p = 0; p < pc.size(); ++p) grow(bit(p), pc.compat[p] & ~((bit(p) << 1) - 1));
    return out;
}

inline std::string clique_name(const Precongruence& pc, StateSet c) {
    std::string out = "{";
    bool first = true;
    for_each_member(c, [&](StateId p) {
        if (!first) out += ',';
        out += pc.base.states[p];
        first = false;
    });
    return out + "}";
}

/// Subset expansion: cliques as states, cliques containing q0 as initial states,
/// (P, s, Q) whenever P . s is included in Q, all states final. Exponential; the
/// clique count is capped.
inline Nfa subset_expansion(const Precongruence& pc, std::size_t max_cliques = 4096) {
    auto cliques = all_cliques(pc);
    if (cliques.size() > max_cliques) throw ResourceError("subset expansion exceeds the clique cap");
    Nfa e;
    e.alphabet = pc.base.alphabet;
    for (std::size_t i = 0; i < cliques.size(); ++i) {
        e.states.push_back(clique_name(pc, cliques[i]));
        e.finals.insert(i);
        if (cliques[i] & bit(pc.base.initial)) e.initials.insert(i);
    }
    for (std::size_t i = 0; i < cliques.size(); ++i)
        for (std::size_t s = 0; s < e.alphabet.size(); ++s) {
            StateSet img = pc.image(cliques[i], s);
            for (std::size_t j = 0; j < cliques.size(); ++j)
                if ((img & ~cliques[j]) == 0) e.transitions.push_back({i, s, j});
        }
    std::sort(e.transitions.begin(), e.transitions.end());
    return e;
}

/// A complete DFA together with the clique attached to each state.
struct LabeledDfa {
    Dfa dfa;
    std::vector<StateSet> labels;
};

/// Enumerates the complete deterministic subautomata of the subset expansion with at
/// most k states, numbered in breadth-first order from the initial clique. Stops when
/// fn returns false.
template <typename Fn>
void for_each_finer_dfa(const Precongruence& pc, std::size_t k, Fn&& fn) {
    if (k == 0 || pc.size() == 0) return;
    const std::size_t m = pc.base.alphabet.size();
    std::vector<StateSet> labels;
    std::vector<std::vector<std::size_t>> delta;
    bool stop = false;

    std::function<void(std::size_t)> go = [&](std::size_t pos) {
        if (stop) return;
        const std::size_t i = m == 0 ? labels.size() : pos / m;
        if (i >= labels.size()) {
            LabeledDfa out;
            out.dfa = Dfa(std::vector<std::string>(labels.size()), pc.base.alphabet);
            for (std::size_t j = 0; j < labels.size(); ++j) {
                out.dfa.states[j] = clique_name(pc, labels[j]);
                out.dfa.finals.insert(j);
                for (std::size_t s = 0; s < m; ++s) out.dfa.set(j, s, delta[j][s]);
            }
            out.labels = labels;
            if (!fn(static_cast<const LabeledDfa&>(out))) stop = true;
            return;
        }
        const std::size_t s = pos % m;
        const StateSet img = pc.image(labels[i], s);
        for (std::size_t j = 0; j < labels.size() && !stop; ++j)
            if ((img & ~labels[j]) == 0) {
                delta[i][s] = j;
                go(pos + 1);
            }
        if (labels.size() < k && !stop) {
            for_each_clique_containing(pc, img, [&](StateSet c) {
                if (std::find(labels.begin(), labels.end(), c) != labels.end()) return true;
                delta[i][s] = labels.size();
                labels.push_back(c);
                delta.emplace_back(m);
                go(pos + 1);
                labels.pop_back();
                delta.pop_back();
                return !stop;
            });
        }
    };

    for_each_clique_containing(pc, bit(pc.base.initial), [&](StateSet c) {
        labels = {c};
        delta.assign(1, std::vector<std::size_t>(m));
        go(0);
        return !stop;
    });
}

inline std::vector<LabeledDfa> enumerate_finer_dfas(const Precongruence& pc, std::size_t k,
                                                    std::size_t limit = 100000) {
    std::vector<LabeledDfa> out;
    for_each_finer_dfa(pc, k, [&](const LabeledDfa& d) {
        out.push_back(d);
        return out.size() < limit;
    });
    return out;
}

/// Reached sets R(b) = { q0 . u : b0 . u = b } of a complete DFA b over the base
/// alphabet. Only states reachable in b get a nonempty set.
inline std::vector<StateSet> reached_sets(const Precongruence& pc, const Dfa& b) {
    auto sym = alphabet_map(b.alphabet, pc.base.alphabet);
    std::vector<StateSet> r(b.size(), 0);
    std::deque<std::pair<StateId, StateId>> todo{{b.initial, pc.base.initial}};
    r[b.initial] = bit(pc.base.initial);
    while (!todo.empty()) {
        auto [x, p] = todo.front();
        todo.pop_front();
        for (std::size_t s = 0; s < b.alphabet.size(); ++s) {
            StateId y = *b.step(x, s);
            StateId q = *pc.base.step(p, sym[s]);
            if (!(r[y] & bit(q))) {
                r[y] |= bit(q);
                todo.emplace_back(y, q);
            }
        }
    }
    return r;
}

/// u ~ v whenever b0 . u = b0 . v, i.e. every reached set is a clique.
inline bool is_finer_than(const Dfa& b, const Precongruence& pc) {
    if (!b.is_complete()) throw PreconditionError("refinement candidates must be complete");
    for (auto s : reached_sets(pc, b))
        if (!pc.is_clique(s)) return false;
    return true;
}

/// Reachable part of a DFA renumbered in breadth-first order, states named B0, B1, ...
/// and all final. Two DFAs are equal up to renaming iff their canonical forms are equal.
inline Dfa canonical_form(const Dfa& d) {
    std::vector<std::optional<std::size_t>> num(d.size());
    std::vector<StateId> order{d.initial};
    num[d.initial] = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t a = 0; a < d.alphabet.size(); ++a)
            if (auto to = d.step(order[i], a); to && !num[*to]) {
                num[*to] = order.size();
                order.push_back(*to);
            }
    Dfa out(std::vector<std::string>(order.size()), d.alphabet);
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.states[i] = "B" + std::to_string(i);
        out.finals.insert(i);
        for (std::size_t a = 0; a < d.alphabet.size(); ++a)
            if (auto to = d.step(order[i], a)) out.set(i, a, *num[*to]);
    }
    return out;
}

namespace detail {

/// Backtracking over complete DFAs with at most k states, numbered in order of
/// creation. Each state carries the part of its reached set forced so far; a branch
/// is cut as soon as one of them stops being a clique.
///
/// States compatible with everything and closed under transitions ("don't care")
/// never constrain a solution. A transition whose image holds only such states is
/// left open and decided at the end: if its image is still don't-care it goes to the
/// initial state, otherwise it is branched on like any other transition.
class RefinementSearch {
public:
    using Table = std::vector<std::vector<std::optional<std::size_t>>>;
    using Callback = std::function<bool(const Dfa&)>;

    RefinementSearch(const Precongruence& pc, std::size_t k) : pc_(pc), k_(k), m_(pc.base.alphabet.size()) {
        const StateSet all = pc.size() == 64 ? ~StateSet{0} : bit(pc.size()) - 1;
        dont_care_ = 0;
        for (StateId p = 0; p < pc.size(); ++p)
            if (pc.compat[p] == all) dont_care_ |= bit(p);
        for (bool changed = true; changed;) {
            changed = false;
            for_each_member(dont_care_, [&](StateId p) {
                for (std::size_t a = 0; a < m_; ++a)
                    if (!(dont_care_ & bit(*pc.base.step(p, a)))) {
                        dont_care_ &= ~bit(p);
                        changed = true;
                        return;
                    }
            });
        }
    }

    void run(Callback fn) {
        if (k_ == 0) return;
        reached_ = {bit(pc_.base.initial)};
        delta_.assign(1, std::vector<std::optional<std::size_t>>(m_));
        stop_ = false;
        go(fn);
    }

private:
    bool add(std::size_t j, StateSet s) {
        std::deque<std::pair<std::size_t, StateSet>> todo{{j, s}};
        while (!todo.empty()) {
            auto [x, more] = todo.front();
            todo.pop_front();
            if ((more & ~reached_[x]) == 0) continue;
            reached_[x] |= more;
            if (!pc_.is_clique(reached_[x])) return false;
            for (std::size_t a = 0; a < m_; ++a)
                if (delta_[x][a]) todo.emplace_back(*delta_[x][a], pc_.image(reached_[x], a));
        }
        return true;
    }

    /// Next transition to decide: the first undecided one, else the first deferred one
    /// whose image is no longer don't-care.
    std::optional<std::pair<std::size_t, std::size_t>> next(bool& all_done) const {
        all_done = false;
        for (std::size_t i = 0; i < reached_.size(); ++i)
            for (std::size_t a = 0; a < m_; ++a)
                if (!delta_[i][a] && !deferred_.count({i, a})) return std::make_pair(i, a);
        for (auto [i, a] : deferred_)
            if (pc_.image(reached_[i], a) & ~dont_care_) return std::make_pair(i, a);
        all_done = true;
        return std::nullopt;
    }

    void emit(Callback& fn) {
        Dfa d(std::vector<std::string>(reached_.size()), pc_.base.alphabet);
        for (std::size_t j = 0; j < reached_.size(); ++j)
            for (std::size_t a = 0; a < m_; ++a) d.set(j, a, delta_[j][a].value_or(0));
        if (!fn(canonical_form(d))) stop_ = true;
    }

    void go(Callback& fn) {
        if (stop_) return;
        bool done = false;
        auto pick = next(done);
        if (done) {
            emit(fn);
            return;
        }
        auto [i, a] = *pick;
        const StateSet img = pc_.image(reached_[i], a);
        const bool was_deferred = deferred_.erase({i, a}) > 0;
        if (!was_deferred && (img & ~dont_care_) == 0) {
            deferred_.insert({i, a});
            go(fn);
            deferred_.erase({i, a});
            return;
        }
        const auto saved = reached_;
        for (std::size_t j = 0; j < reached_.size() && !stop_; ++j) {
            delta_[i][a] = j;
            if (add(j, img)) go(fn);
            reached_ = saved;
        }
        if (reached_.size() < k_ && !stop_) {
            const std::size_t j = reached_.size();
            reached_.push_back(0);
            delta_.emplace_back(m_);
            delta_[i][a] = j;
            if (add(j, img)) go(fn);
            delta_.pop_back();
            reached_ = saved;
        }
        delta_[i][a].reset();
        if (was_deferred) deferred_.insert({i, a});
    }

    const Precongruence& pc_;
    std::size_t k_;
    std::size_t m_;
    StateSet dont_care_ = 0;
    std::vector<StateSet> reached_;
    Table delta_;
    std::set<std::pair<std::size_t, std::size_t>> deferred_;
    bool stop_ = false;
};

}  // namespace detail

struct RefinementResult {
    std::size_t k_min = 0;
    std::vector<Dfa> witnesses;                  // minimal solutions, distinct up to renaming
    std::vector<std::vector<StateSet>> reached;  // reached sets, per witness and state
    bool truncated = false;                      // more witnesses exist than were kept
};

/// Some complete DFA with at most k states finer than pc, with its reached sets.
inline std::optional<std::pair<Dfa, std::vector<StateSet>>> find_refinement(const Precongruence& pc, std::size_t k) {
    std::optional<std::pair<Dfa, std::vector<StateSet>>> out;
    detail::RefinementSearch(pc, k).run([&](const Dfa& d) {
        out.emplace(d, reached_sets(pc, d));
        return false;
    });
    return out;
}

/// Least k admitting a DFA finer than pc, and the minimal solutions. Transitions
/// that can only ever carry don't-care states are sent to the initial state, so
/// solutions differing only there are reported once.
inline RefinementResult minimal_refinement(const Precongruence& pc, std::size_t max_witnesses = 1000) {
    RefinementResult res;
    const auto reachable = reachable_states(pc.base);
    const auto bound = static_cast<std::size_t>(std::count(reachable.begin(), reachable.end(), true));
    for (std::size_t k = 1; k <= bound; ++k) {
        std::set<std::vector<std::vector<std::optional<StateId>>>> seen;
        detail::RefinementSearch(pc, k).run([&](const Dfa& d) {
            if (!seen.insert(d.delta).second) return true;
            if (res.witnesses.size() >= max_witnesses) {
                res.truncated = true;
                return false;
            }
            res.witnesses.push_back(d);
            res.reached.push_back(reached_sets(pc, d));
            return true;
        });
        if (!res.witnesses.empty()) {
            res.k_min = k;
            return res;
        }
    }
    throw StructuralError("no refinement found up to the number of reachable states");
}

/// Limits for exhaustive searches.
struct SearchGuard {
    std::size_t max_states = 4;
    std::size_t max_alphabet = 3;
};

/// Exhaustive oracle: the first complete DFA, in order of size and then transition
/// table, with at most k states that is finer than pc.
inline std::optional<Dfa> brute_force_refinement(const Precongruence& pc, std::size_t k, SearchGuard guard = {}) {
    const std::size_t m = pc.base.alphabet.size();
    if (k > guard.max_states || m > guard.max_alphabet)
        throw ResourceError("brute-force refinement limited to " + std::to_string(guard.max_states) + " states and " +
                            std::to_string(guard.max_alphabet) + " letters");
    for (std::size_t n = 1; n <= k; ++n) {
        Dfa d(std::vector<std::string>(n), pc.base.alphabet);
        for (std::size_t j = 0; j < n; ++j) {
            d.states[j] = "B" + std::to_string(j);
            d.finals.insert(j);
        }
        std::vector<std::size_t> table(n * m, 0);
        while (true) {
            for (std::size_t c = 0; c < table.size(); ++c) d.set(c / m, c % m, table[c]);
            if (is_finer_than(d, pc)) return d;
            std::size_t c = 0;
            while (c < table.size() && ++table[c] == n) table[c++] = 0;
            if (c == table.size()) break;
        }
    }
    return std::nullopt;
}

/// Compatibility analysis of a sequential transducer.
struct SequentialCompat {
    Precongruence pc;                          // over the accessible part, completed with a sink
    std::vector<std::optional<StateId>> base_of;  // transducer state -> base state
    std::vector<std::optional<StateId>> original;  // base state -> transducer state (none for the sink)
    std::vector<bool> useful;                   // accessible and co-accessible
};

/// p ~ q iff p |- w = q |- w and the final outputs agree wherever both sides are
/// defined and useful. States that cannot reach a final state are compatible with
/// everything. Computed as a greatest fixpoint.
inline SequentialCompat sequential_compat(const Fst& t) {
    if (!t.is_sequential()) throw PreconditionError("transducer is not sequential");
    const Dfa full = Dfa::from_nfa(t.underlying());
    const auto reach = reachable_states(full);

    SequentialCompat res;
    res.base_of.assign(t.size(), std::nullopt);
    std::vector<std::string> names;
    for (StateId q = 0; q < t.size(); ++q)
        if (reach[q]) {
            res.base_of[q] = names.size();
            res.original.push_back(q);
            names.push_back(t.states[q]);
        }
    const std::size_t m = t.input_alphabet.size();
    Dfa base(names, t.input_alphabet);
    base.initial = *res.base_of[full.initial];
    for (StateId q = 0; q < t.size(); ++q) {
        if (!reach[q]) continue;
        if (full.is_final(q)) base.finals.insert(*res.base_of[q]);
        for (std::size_t a = 0; a < m; ++a)
            if (auto to = full.step(q, a)) base.set(*res.base_of[q], a, *res.base_of[*to]);
    }
    const std::size_t n = base.size();
    base = complete_with_sink(std::move(base));
    if (base.size() > n) res.original.push_back(std::nullopt);
    if (base.size() > 64) throw PreconditionError("sequential transducer too large for compatibility analysis");

    // Co-accessibility on the completed base.
    res.useful.assign(base.size(), false);
    for (auto f : base.finals) res.useful[f] = true;
    for (bool changed = true; changed;) {
        changed = false;
        for (StateId p = 0; p < base.size(); ++p)
            for (std::size_t a = 0; a < m && !res.useful[p]; ++a)
                if (res.useful[*base.step(p, a)]) res.useful[p] = changed = true;
    }

    FstEvaluator ev(t);
    auto out = [&](StateId p, std::size_t a) -> const Word* {
        auto o = res.original[p];
        if (!o) return nullptr;
        auto st = ev.step(*o, a);
        return st ? st->second : nullptr;
    };
    auto final_out = [&](StateId p) -> const Word* {
        auto o = res.original[p];
        if (!o) return nullptr;
        auto it = t.final_out.find(*o);
        return it == t.final_out.end() ? nullptr : &it->second;
    };

    const std::size_t N = base.size();
    std::vector<std::vector<bool>> rel(N, std::vector<bool>(N, true));
    auto live_step = [&](StateId p, std::size_t a) {
        auto o = res.original[p];
        return o && full.step(*o, a) && res.useful[*base.step(p, a)];
    };
    for (StateId p = 0; p < N; ++p)
        for (StateId q = p + 1; q < N; ++q) {
            if (!res.useful[p] || !res.useful[q]) continue;
            bool ok = true;
            const Word* fp = final_out(p);
            const Word* fq = final_out(q);
            if (fp && fq && *fp != *fq) ok = false;
            for (std::size_t a = 0; a < m && ok; ++a)
                if (live_step(p, a) && live_step(q, a) && *out(p, a) != *out(q, a)) ok = false;
            rel[p][q] = rel[q][p] = ok;
        }
    for (bool changed = true; changed;) {
        changed = false;
        for (StateId p = 0; p < N; ++p)
            for (StateId q = p + 1; q < N; ++q) {
                if (!rel[p][q]) continue;
                for (std::size_t a = 0; a < m; ++a)
                    if (live_step(p, a) && live_step(q, a) && !rel[*base.step(p, a)][*base.step(q, a)]) {
                        rel[p][q] = rel[q][p] = false;
                        changed = true;
                        break;
                    }
            }
    }
    std::vector<std::pair<StateId, StateId>> pairs;
    for (StateId p = 0; p < N; ++p)
        for (StateId q = p + 1; q < N; ++q)
            if (rel[p][q]) pairs.emplace_back(p, q);
    res.pc = make_precongruence(std::move(base), pairs);
    return res;
}

/// Compatibility relation of a sequential letter-to-letter transducer.
inline Precongruence compat_letter_to_letter(const Fst& t) {
    if (!t.is_letter_to_letter()) throw PreconditionError("transducer is not letter-to-letter");
    return sequential_compat(t).pc;
}

/// True iff every accessible, co-accessible state is final.
inline bool has_prefix_closed_domain(const Fst& t) {
    auto c = sequential_compat(t);
    for (StateId p = 0; p < c.pc.size(); ++p)
        if (c.useful[p] && c.original[p] && !c.pc.base.is_final(p)) return false;
    return true;
}

struct RefinementInstance {
    Precongruence pc;
    std::size_t k = 0;
};

/// Extension of a sequential transducer with at most k states as a minimal refinement
/// instance. Applies to letter-to-letter transducers and to prefix-closed domains.
inline RefinementInstance extension_to_refinement(const Fst& t, std::size_t k) {
    if (!t.is_sequential()) throw PreconditionError("transducer is not sequential");
    if (!t.is_letter_to_letter() && !has_prefix_closed_domain(t))
        throw PreconditionError("transducer is neither letter-to-letter nor has a prefix-closed domain");
    return {sequential_compat(t).pc, k};
}

inline Symbol fresh_letter(const Precongruence& pc, StateId p, StateId q) {
    return "s[" + pc.base.states[p] + "|" + pc.base.states[q] + "]";
}

/// Letter-to-letter sequential transducer whose compatibility relation is pc: base
/// letters copy themselves, and every incompatible pair {p, q} gets a fresh letter
/// read by self-loops on p and q that output the state names.
inline Fst refinement_to_extension(const Precongruence& pc) {
    Fst t;
    t.states = pc.base.states;
    t.input_alphabet = pc.base.alphabet;
    t.output_alphabet = pc.base.alphabet;
    const auto incompatible = pc.incompatible_pairs();
    for (auto [p, q] : incompatible) {
        Symbol s = fresh_letter(pc, p, q);
        while (symbol_index(t.input_alphabet, s)) s += "'";
        t.input_alphabet.push_back(s);
    }
    std::vector<Symbol> tag(pc.size());
    for (StateId p = 0; p < pc.size(); ++p) {
        tag[p] = "q:" + pc.base.states[p];
        while (symbol_index(pc.base.alphabet, tag[p])) tag[p] += "'";
    }
    std::vector<bool> tagged(pc.size(), false);
    for (auto [p, q] : incompatible) tagged[p] = tagged[q] = true;
    for (StateId p = 0; p < pc.size(); ++p)
        if (tagged[p]) t.output_alphabet.push_back(tag[p]);

    t.init[pc.base.initial] = {};
    const std::size_t m = pc.base.alphabet.size();
    for (StateId p = 0; p < pc.size(); ++p) {
        t.final_out[p] = {};
        for (std::size_t a = 0; a < m; ++a) t.trans[{p, a, *pc.base.step(p, a)}] = {pc.base.alphabet[a]};
    }
    for (std::size_t i = 0; i < incompatible.size(); ++i) {
        auto [p, q] = incompatible[i];
        t.trans[{p, m + i, p}] = {tag[p]};
        t.trans[{q, m + i, q}] = {tag[q]};
    }
    return t;
}

/// Total sequential transducer on the states of b agreeing with t on dom(t). Outputs
/// are copied from the transducer states reached together with each state of b;
/// missing outputs default to the letter itself when it is an output symbol, else to
/// the empty word. Throws PreconditionError with two words when b is not finer.
inline Fst build_extended_transducer(const Fst& t, const Dfa& b) {
    if (!b.is_complete()) throw PreconditionError("extension automaton must be complete");
    const auto c = sequential_compat(t);
    const auto& pc = c.pc;
    const auto sym = alphabet_map(b.alphabet, pc.base.alphabet);
    const std::size_t m = b.alphabet.size();

    // Product walk with a witness word for each pair.
    std::map<std::pair<StateId, StateId>, Word> word_to;
    std::vector<StateSet> reached(b.size(), 0);
    std::deque<std::pair<StateId, StateId>> todo{{b.initial, pc.base.initial}};
    word_to[{b.initial, pc.base.initial}] = {};
    reached[b.initial] = bit(pc.base.initial);
    while (!todo.empty()) {
        auto [x, p] = todo.front();
        todo.pop_front();
        for (std::size_t a = 0; a < m; ++a) {
            std::pair<StateId, StateId> next{*b.step(x, a), *pc.base.step(p, sym[a])};
            if (word_to.count(next)) continue;
            word_to[next] = concat(word_to[{x, p}], {b.alphabet[a]});
            reached[next.first] |= bit(next.second);
            todo.push_back(next);
        }
    }
    for (StateId x = 0; x < b.size(); ++x)
        for_each_member(reached[x], [&](StateId p) {
            for_each_member(reached[x], [&](StateId q) {
                if (pc.compatible(p, q)) return;
                throw PreconditionError("automaton is not finer than the compatibility relation: '" +
                                        to_string(word_to[{x, p}]) + "' and '" + to_string(word_to[{x, q}]) +
                                        "' reach the same state");
            });
        });

    FstEvaluator ev(t);
    Fst e;
    e.states = b.states;
    e.input_alphabet = b.alphabet;
    e.output_alphabet = t.output_alphabet;
    const StateId q0 = *c.original[pc.base.initial];
    e.init[b.initial] = t.init.at(q0);
    for (StateId x = 0; x < b.size(); ++x) {
        Word fin;
        for_each_member(reached[x], [&](StateId p) {
            auto o = c.original[p];
            if (!o || !c.useful[p]) return;
            auto it = t.final_out.find(*o);
            if (it != t.final_out.end()) fin = it->second;
        });
        e.final_out[x] = fin;
        for (std::size_t a = 0; a < m; ++a) {
            std::optional<Word> out;
            for_each_member(reached[x], [&](StateId p) {
                auto o = c.original[p];
                if (out || !o || !c.useful[p]) return;
                auto st = ev.step(*o, sym[a]);
                if (st && c.useful[*pc.base.step(p, sym[a])]) out = *st->second;
            });
            if (!out) out = symbol_index(t.output_alphabet, b.alphabet[a]) ? Word{b.alphabet[a]} : Word{};
            e.trans[{x, a, *b.step(x, a)}] = *out;
        }
    }
    return e;
}

}  // namespace sstforge
