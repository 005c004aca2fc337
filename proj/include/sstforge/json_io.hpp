#pragma once

// JSON machine files and Graphviz output.

#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"
#include "sstforge/bimachines.hpp"
#include "sstforge/congruences.hpp"
#include "sstforge/minimization.hpp"
#include "sstforge/refinement.hpp"

namespace sstforge {

using json = nlohmann::ordered_json;

using Machine = std::variant<Dfa, Nfa, Fst, Asst, Bimachine, AsyncBimachine, Precongruence, Graph>;

inline const char* kind_name(const Machine& m) {
    static constexpr const char* names[] = {"dfa",       "nfa",             "fst",           "asst",
                                            "bimachine", "async-bimachine", "precongruence", "graph"};
    return names[m.index()];
}

namespace detail {

template <class T>
T field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("field '") + key + "' has the wrong type");
    }
}

inline const json& object_field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline json name_map(const std::vector<std::string>& names, const std::map<StateId, Word>& m) {
    json out = json::object();
    for (const auto& [q, w] : m) out[names[q]] = w;
    return out;
}

inline std::map<StateId, Word> parse_name_map(const json& j, const std::vector<std::string>& names, const char* what) {
    if (!j.is_object()) throw InputError(std::string("'") + what + "' must be an object");
    std::map<StateId, Word> out;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_array()) throw InputError(std::string("'") + what + "' values must be symbol lists");
        out[index_of(names, k)] = v.get<Word>();
    }
    return out;
}

inline json expr_json(const Asst& s, const AppendExpr& e) {
    return {{"src", s.registers[e.src]}, {"append", e.append}};
}

inline AppendExpr parse_expr(const json& j, const std::vector<std::string>& registers) {
    return AppendExpr{index_of(registers, field<std::string>(j, "src"), "register"), field<Word>(j, "append")};
}

}  // namespace detail

inline json to_json(const Nfa& a) {
    json t = json::array();
    for (const auto& tr : a.transitions)
        t.push_back({{"from", a.states[tr.from]}, {"symbol", a.alphabet[tr.symbol]}, {"to", a.states[tr.to]}});
    json init = json::array(), fin = json::array();
    for (auto q : a.initials) init.push_back(a.states[q]);
    for (auto q : a.finals) fin.push_back(a.states[q]);
    return {{"states", a.states}, {"alphabet", a.alphabet}, {"initials", init}, {"finals", fin}, {"transitions", t}};
}

inline Nfa nfa_from_json(const json& j) {
    Nfa a;
    a.states = detail::field<std::vector<std::string>>(j, "states");
    a.alphabet = detail::field<Alphabet>(j, "alphabet");
    validate_names(a.states, "state");
    validate_alphabet(a.alphabet);
    for (const auto& q : detail::field<std::vector<std::string>>(j, "initials")) a.initials.insert(index_of(a.states, q));
    for (const auto& q : detail::field<std::vector<std::string>>(j, "finals")) a.finals.insert(index_of(a.states, q));
    for (const auto& t : detail::object_field(j, "transitions"))
        a.add_transition(index_of(a.states, detail::field<std::string>(t, "from")),
                         index_of(a.alphabet, detail::field<std::string>(t, "symbol"), "symbol"),
                         index_of(a.states, detail::field<std::string>(t, "to")));
    a.validate();
    return a;
}

inline json to_json(const Dfa& a) {
    json n = to_json(a.to_nfa());
    return {{"states", n["states"]},
            {"alphabet", n["alphabet"]},
            {"initial", a.states[a.initial]},
            {"finals", n["finals"]},
            {"transitions", n["transitions"]}};
}

inline Dfa dfa_from_json(const json& j) {
    json copy = j;
    copy["initials"] = json::array({detail::field<std::string>(j, "initial")});
    Dfa d = Dfa::from_nfa(nfa_from_json(copy));
    d.validate();
    return d;
}

inline json to_json(const Fst& t) {
    json tr = json::array();
    for (const auto& [e, w] : t.trans)
        tr.push_back({{"from", t.states[e.from]}, {"symbol", t.input_alphabet[e.symbol]}, {"to", t.states[e.to]}, {"out", w}});
    return {{"states", t.states},
            {"input_alphabet", t.input_alphabet},
            {"output_alphabet", t.output_alphabet},
            {"init", detail::name_map(t.states, t.init)},
            {"trans", tr},
            {"final", detail::name_map(t.states, t.final_out)}};
}

inline Fst fst_from_json(const json& j) {
    Fst t;
    t.states = detail::field<std::vector<std::string>>(j, "states");
    t.input_alphabet = detail::field<Alphabet>(j, "input_alphabet");
    t.output_alphabet = detail::field<Alphabet>(j, "output_alphabet");
    validate_names(t.states, "state");
    t.init = detail::parse_name_map(detail::object_field(j, "init"), t.states, "init");
    t.final_out = detail::parse_name_map(detail::object_field(j, "final"), t.states, "final");
    for (const auto& e : detail::object_field(j, "trans")) {
        Transition key{index_of(t.states, detail::field<std::string>(e, "from")),
                       index_of(t.input_alphabet, detail::field<std::string>(e, "symbol"), "symbol"),
                       index_of(t.states, detail::field<std::string>(e, "to"))};
        if (!t.trans.emplace(key, detail::field<Word>(e, "out")).second) throw InputError("duplicate transition");
    }
    t.validate();
    return t;
}

inline json to_json(const Asst& s) {
    json delta = json::array();
    for (StateId q = 0; q < s.size(); ++q)
        for (std::size_t a = 0; a < s.input_alphabet.size(); ++a) {
            const auto& e = s.delta[q][a];
            if (!e) continue;
            json upd = json::object();
            for (std::size_t x = 0; x < s.register_count(); ++x)
                if (e->update[x]) upd[s.registers[x]] = detail::expr_json(s, *e->update[x]);
            delta.push_back({{"from", s.states[q]}, {"symbol", s.input_alphabet[a]}, {"to", s.states[e->to]}, {"update", upd}});
        }
    json v0 = json::object(), gamma = json::object();
    for (std::size_t x = 0; x < s.register_count(); ++x) v0[s.registers[x]] = s.v0[x];
    for (StateId q = 0; q < s.size(); ++q)
        if (s.gamma[q]) gamma[s.states[q]] = detail::expr_json(s, *s.gamma[q]);
    return {{"states", s.states},
            {"registers", s.registers},
            {"input_alphabet", s.input_alphabet},
            {"output_alphabet", s.output_alphabet},
            {"q0", s.states[s.q0]},
            {"v0", v0},
            {"delta", delta},
            {"gamma", gamma}};
}

inline Asst asst_from_json(const json& j) {
    Asst s(detail::field<std::vector<std::string>>(j, "states"), detail::field<std::vector<std::string>>(j, "registers"),
           detail::field<Alphabet>(j, "input_alphabet"), detail::field<Alphabet>(j, "output_alphabet"));
    validate_names(s.states, "state");
    validate_names(s.registers, "register");
    s.q0 = index_of(s.states, detail::field<std::string>(j, "q0"));
    const auto& v0 = detail::object_field(j, "v0");
    if (!v0.is_object()) throw InputError("'v0' must be an object");
    for (const auto& [x, w] : v0.items()) s.v0[index_of(s.registers, x, "register")] = w.get<Word>();
    for (const auto& e : detail::object_field(j, "delta")) {
        StateId from = index_of(s.states, detail::field<std::string>(e, "from"));
        std::size_t a = index_of(s.input_alphabet, detail::field<std::string>(e, "symbol"), "symbol");
        if (s.delta[from][a]) throw InputError("duplicate transition from '" + s.states[from] + "'");
        Substitution upd(s.register_count());
        if (e.contains("update"))
            for (const auto& [x, ex] : e.at("update").items())
                upd[index_of(s.registers, x, "register")] = detail::parse_expr(ex, s.registers);
        s.set_transition(from, a, index_of(s.states, detail::field<std::string>(e, "to")), std::move(upd));
    }
    const auto& gamma = detail::object_field(j, "gamma");
    if (!gamma.is_object()) throw InputError("'gamma' must be an object");
    for (const auto& [q, ex] : gamma.items()) s.gamma[index_of(s.states, q)] = detail::parse_expr(ex, s.registers);
    s.validate();
    return s;
}

inline json to_json(const Bimachine& b) {
    json omega = json::array();
    for (const auto& [key, w] : b.omega) {
        auto [l, a, r] = key;
        omega.push_back({{"l", b.left.states[l]}, {"symbol", b.left.alphabet[a]}, {"r", b.right.states()[r]}, {"out", w}});
    }
    return {{"left", to_json(b.left)},
            {"right", to_json(b.right.to_nfa())},
            {"output_alphabet", b.output_alphabet},
            {"lambda", detail::name_map(b.right.states(), b.lambda)},
            {"omega", omega},
            {"rho", detail::name_map(b.left.states, b.rho)},
            {"left_recognizes_domain", b.left_recognizes_domain},
            {"right_recognizes_domain", b.right_recognizes_domain}};
}

inline Bimachine bimachine_from_json(const json& j) {
    Bimachine b;
    b.left = dfa_from_json(detail::object_field(j, "left"));
    b.right = CoDfa::from_nfa(nfa_from_json(detail::object_field(j, "right")));
    b.output_alphabet = detail::field<Alphabet>(j, "output_alphabet");
    b.lambda = detail::parse_name_map(detail::object_field(j, "lambda"), b.right.states(), "lambda");
    b.rho = detail::parse_name_map(detail::object_field(j, "rho"), b.left.states, "rho");
    for (const auto& e : detail::object_field(j, "omega")) {
        OmegaKey key{index_of(b.left.states, detail::field<std::string>(e, "l")),
                     index_of(b.left.alphabet, detail::field<std::string>(e, "symbol"), "symbol"),
                     index_of(b.right.states(), detail::field<std::string>(e, "r"))};
        b.omega[key] = detail::field<Word>(e, "out");
    }
    b.left_recognizes_domain = j.value("left_recognizes_domain", false);
    b.right_recognizes_domain = j.value("right_recognizes_domain", false);
    b.validate();
    return b;
}

namespace detail {

inline json pair_json(const Dfa& left, StateId l, std::size_t a) {
    return {{"l", left.states[l]}, {"sigma", left.alphabet[a]}};
}

/// Accepts {l, sigma} objects and "(l,sigma)" strings.
inline std::pair<StateId, std::size_t> parse_pair(const json& j, const Dfa& left) {
    if (j.is_object())
        return {index_of(left.states, field<std::string>(j, "l")),
                index_of(left.alphabet, field<std::string>(j, "sigma"), "symbol")};
    if (j.is_string()) {
        const auto names = pair_alphabet(left);
        auto idx = index_of(names, j.get<std::string>(), "pair symbol");
        return {idx / left.alphabet.size(), idx % left.alphabet.size()};
    }
    throw InputError("pair symbol must be an object {l, sigma}");
}

}  // namespace detail

inline json to_json(const AsyncBimachine& b) {
    const auto& L = b.left;
    const std::size_t m = L.alphabet.size();
    json right = to_json(b.right.to_nfa());
    right.erase("alphabet");
    for (auto& t : right["transitions"]) {
        auto idx = index_of(pair_alphabet(L), t["symbol"].get<std::string>());
        t["symbol"] = detail::pair_json(L, idx / m, idx % m);
    }
    json omega = json::array();
    for (const auto& [key, w] : b.omega) {
        auto [l, a, r] = key;
        omega.push_back({{"symbol", detail::pair_json(L, l, a)}, {"r", b.right.states()[r]}, {"out", w}});
    }
    return {{"left", to_json(L)},
            {"right", right},
            {"output_alphabet", b.output_alphabet},
            {"lambda", detail::name_map(b.right.states(), b.lambda)},
            {"omega", omega},
            {"rho", detail::name_map(L.states, b.rho)}};
}

inline AsyncBimachine async_bimachine_from_json(const json& j) {
    AsyncBimachine b;
    b.left = dfa_from_json(detail::object_field(j, "left"));
    const auto pairs = pair_alphabet(b.left);
    json right = detail::object_field(j, "right");
    right["alphabet"] = pairs;
    if (right.contains("transitions"))
        for (auto& t : right["transitions"]) {
            auto [l, a] = detail::parse_pair(detail::object_field(t, "symbol"), b.left);
            t["symbol"] = pairs[b.pair_symbol(l, a)];
        }
    b.right = CoDfa::from_nfa(nfa_from_json(right));
    b.output_alphabet = detail::field<Alphabet>(j, "output_alphabet");
    b.lambda = detail::parse_name_map(detail::object_field(j, "lambda"), b.right.states(), "lambda");
    b.rho = detail::parse_name_map(detail::object_field(j, "rho"), b.left.states, "rho");
    for (const auto& e : detail::object_field(j, "omega")) {
        auto [l, a] = detail::parse_pair(detail::object_field(e, "symbol"), b.left);
        b.omega[{l, a, index_of(b.right.states(), detail::field<std::string>(e, "r"))}] = detail::field<Word>(e, "out");
    }
    b.validate();
    return b;
}

inline json to_json(const Precongruence& pc) {
    json pairs = json::array();
    for (auto [p, q] : pc.compatible_pairs()) pairs.push_back({pc.base.states[p], pc.base.states[q]});
    return {{"dfa", to_json(pc.base)}, {"compatible_pairs", pairs}};
}

inline Precongruence precongruence_from_json(const json& j) {
    Dfa base = dfa_from_json(detail::object_field(j, "dfa"));
    std::vector<std::pair<StateId, StateId>> pairs;
    for (const auto& p : detail::object_field(j, "compatible_pairs")) {
        if (!p.is_array() || p.size() != 2) throw InputError("compatible pairs must have two states");
        pairs.emplace_back(index_of(base.states, p[0].get<std::string>()), index_of(base.states, p[1].get<std::string>()));
    }
    return make_precongruence(std::move(base), pairs);
}

inline json to_json(const Graph& g) {
    json edges = json::array();
    for (auto [u, v] : g.edges) edges.push_back({g.vertices[u], g.vertices[v]});
    return {{"vertices", g.vertices}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
    Graph g;
    g.vertices = detail::field<std::vector<std::string>>(j, "vertices");
    validate_names(g.vertices, "vertex");
    for (const auto& e : detail::object_field(j, "edges")) {
        if (!e.is_array() || e.size() != 2) throw InputError("edges must have two vertices");
        g.add_edge(index_of(g.vertices, e[0].get<std::string>(), "vertex"),
                   index_of(g.vertices, e[1].get<std::string>(), "vertex"));
    }
    return g;
}

/// Words are rendered as space-separated strings.
inline json to_json(const BoundedPartition& p) {
    json classes = json::array(), seps = json::array();
    for (const auto& c : p.classes) {
        json members = json::array();
        for (const auto& w : c.members) members.push_back(to_string(w));
        classes.push_back({{"representative", to_string(c.members[0])}, {"members", members}, {"growing", c.growing}});
    }
    for (const auto& s : p.separations)
        seps.push_back({{"classes", {s.first, s.second}},
                        {"context", to_string(s.context)},
                        {"reason", s.by_domain ? "domain" : "distance"},
                        {"distance", s.distance}});
    return {{"horizon", p.horizon}, {"threshold", p.threshold}, {"exact", p.exact}, {"classes", classes}, {"separations", seps}};
}

inline json machine_file(const Machine& m) {
    json payload = std::visit([](const auto& x) { return to_json(x); }, m);
    return {{"kind", kind_name(m)}, {"version", "1"}, {"payload", payload}};
}

inline Machine parse_machine_file(const json& j) {
    const auto kind = detail::field<std::string>(j, "kind");
    const auto version = detail::field<std::string>(j, "version");
    if (version != "1") throw InputError("unsupported version '" + version + "'");
    const json& p = detail::object_field(j, "payload");
    try {
        if (kind == "dfa") return dfa_from_json(p);
        if (kind == "nfa") return nfa_from_json(p);
        if (kind == "fst") return fst_from_json(p);
        if (kind == "asst") return asst_from_json(p);
        if (kind == "bimachine") return bimachine_from_json(p);
        if (kind == "async-bimachine") return async_bimachine_from_json(p);
        if (kind == "precongruence") return precongruence_from_json(p);
        if (kind == "graph") return graph_from_json(p);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed ") + kind + " payload: " + e.what());
    }
    throw InputError("unknown kind '" + kind + "'");
}

inline Machine parse_machine_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
    return parse_machine_file(j);
}

// Graphviz ---------------------------------------------------------------

namespace detail {

inline std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

inline std::string word_label(const Word& w) { return w.empty() ? "ε" : to_string(w); }

inline void dot_states(std::ostringstream& os, const std::vector<std::string>& states, const std::set<StateId>& initials,
                       const std::set<StateId>& finals) {
    for (StateId q = 0; q < states.size(); ++q) {
        os << "  " << quoted(states[q]) << " [shape=" << (finals.count(q) ? "doublecircle" : "circle") << "];\n";
        if (initials.count(q)) {
            os << "  " << quoted("__init_" + states[q]) << " [shape=point];\n";
            os << "  " << quoted("__init_" + states[q]) << " -> " << quoted(states[q]) << ";\n";
        }
    }
}

inline std::string dot_nfa(const Nfa& a, const std::string& name) {
    std::ostringstream os;
    os << "digraph " << quoted(name) << " {\n  rankdir=LR;\n";
    dot_states(os, a.states, a.initials, a.finals);
    for (const auto& t : a.transitions)
        os << "  " << quoted(a.states[t.from]) << " -> " << quoted(a.states[t.to])
           << " [label=" << quoted(a.alphabet[t.symbol]) << "];\n";
    os << "}\n";
    return os.str();
}

}  // namespace detail

inline std::string to_dot(const Nfa& a) { return detail::dot_nfa(a, "nfa"); }
inline std::string to_dot(const Dfa& a) { return detail::dot_nfa(a.to_nfa(), "dfa"); }

inline std::string to_dot(const Fst& t) {
    std::ostringstream os;
    os << "digraph \"fst\" {\n  rankdir=LR;\n";
    std::set<StateId> init, fin;
    for (const auto& [q, w] : t.init) init.insert(q);
    for (const auto& [q, w] : t.final_out) fin.insert(q);
    detail::dot_states(os, t.states, init, fin);
    for (const auto& [e, w] : t.trans)
        os << "  " << detail::quoted(t.states[e.from]) << " -> " << detail::quoted(t.states[e.to])
           << " [label=" << detail::quoted(t.input_alphabet[e.symbol] + " / " + detail::word_label(w)) << "];\n";
    os << "}\n";
    return os.str();
}

inline std::string to_dot(const Asst& s) {
    auto expr = [&](const AppendExpr& e) {
        return s.registers[e.src] + (e.append.empty() ? "" : " " + to_string(e.append));
    };
    std::ostringstream os;
    os << "digraph \"asst\" {\n  rankdir=LR;\n";
    std::set<StateId> fin;
    for (StateId q = 0; q < s.size(); ++q)
        if (s.gamma[q]) fin.insert(q);
    detail::dot_states(os, s.states, {s.q0}, fin);
    for (StateId q = 0; q < s.size(); ++q)
        for (std::size_t a = 0; a < s.input_alphabet.size(); ++a) {
            const auto& e = s.delta[q][a];
            if (!e) continue;
            std::string label = s.input_alphabet[a];
            for (std::size_t x = 0; x < s.register_count(); ++x)
                if (e->update[x]) label += "\\n" + s.registers[x] + " := " + expr(*e->update[x]);
            os << "  " << detail::quoted(s.states[q]) << " -> " << detail::quoted(s.states[e->to])
               << " [label=\"" << label << "\"];\n";
        }
    os << "}\n";
    return os.str();
}

inline std::string to_dot(const Bimachine& b) {
    return detail::dot_nfa(b.left.to_nfa(), "left") + detail::dot_nfa(b.right.to_nfa(), "right");
}

inline std::string to_dot(const AsyncBimachine& b) {
    return detail::dot_nfa(b.left.to_nfa(), "left") + detail::dot_nfa(b.right.to_nfa(), "right");
}

inline std::string to_dot(const Precongruence& pc) {
    std::string out = detail::dot_nfa(pc.base.to_nfa(), "precongruence");
    out.pop_back();
    out.pop_back();
    std::ostringstream os;
    for (auto [p, q] : pc.compatible_pairs())
        os << "  " << detail::quoted(pc.base.states[p]) << " -> " << detail::quoted(pc.base.states[q])
           << " [dir=none, style=dashed];\n";
    return out + "\n" + os.str() + "}\n";
}

inline std::string to_dot(const Graph& g) {
    std::ostringstream os;
    os << "graph \"graph\" {\n";
    for (const auto& v : g.vertices) os << "  " << detail::quoted(v) << ";\n";
    for (auto [u, v] : g.edges) os << "  " << detail::quoted(g.vertices[u]) << " -- " << detail::quoted(g.vertices[v]) << ";\n";
    os << "}\n";
    return os.str();
}

inline std::string machine_dot(const Machine& m) {
    return std::visit([](const auto& x) { return to_dot(x); }, m);
}

}  // namespace sstforge
