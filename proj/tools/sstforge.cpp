#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sstforge.hpp"

using namespace sstforge;

namespace {

enum Exit { ok = 0, negative = 1, input_error = 2, domain_miss = 3, unsupported = 4, resource = 5 };

struct UnsupportedConversion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::size_t guard_limit() {
    const char* env = std::getenv("SSTFORGE_GUARD");
    if (!env || !*env) return 20000;
    try {
        return std::stoul(env);
    } catch (const std::exception&) {
        throw InputError("SSTFORGE_GUARD must be a non-negative integer");
    }
}

std::string read_input(const std::string& path) {
    std::ostringstream buf;
    if (path == "-") {
        buf << std::cin.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open '" + path + "'");
        buf << in.rdbuf();
    }
    return buf.str();
}

Machine load(const std::string& path) { return parse_machine_text(read_input(path)); }

template <class T>
const T& expect(const Machine& m, const char* what) {
    if (auto p = std::get_if<T>(&m)) return *p;
    throw InputError(std::string("expected ") + what + ", got " + kind_name(m));
}

struct Evaluable {
    WordFunction fn;
    Alphabet input;
    Alphabet output;
};

Evaluable evaluable(const Machine& m) {
    if (auto s = std::get_if<Asst>(&m)) return {as_function(*s), s->input_alphabet, s->output_alphabet};
    if (auto b = std::get_if<Bimachine>(&m)) return {as_function(*b), b->left.alphabet, b->output_alphabet};
    if (auto b = std::get_if<AsyncBimachine>(&m)) return {as_function(*b), b->left.alphabet, b->output_alphabet};
    if (auto t = std::get_if<Fst>(&m)) {
        auto ev = std::make_shared<FstEvaluator>(*t);
        WordFunction fn = [ev](const Word& w) -> std::optional<Word> {
            auto outs = ev->eval(w);
            if (outs.size() > 1) throw InputError("transducer has several outputs on '" + to_string(w) + "'");
            if (outs.empty()) return std::nullopt;
            return *outs.begin();
        };
        return {fn, t->input_alphabet, t->output_alphabet};
    }
    throw InputError(std::string("cannot evaluate a ") + kind_name(m));
}

int cmd_eval(const std::string& file, const std::string& word) {
    const Machine m = load(file);
    const Word w = parse_word(word);
    if (auto d = std::get_if<Dfa>(&m)) {
        for (const auto& s : w) require_symbol(d->alphabet, s);
        if (accepts(*d, w)) return std::cout << "accept\n", ok;
        return std::cout << "DOMAIN-MISS\n", domain_miss;
    }
    const auto e = evaluable(m);
    for (const auto& s : w) require_symbol(e.input, s);
    auto out = e.fn(w);
    if (!out) return std::cout << "DOMAIN-MISS\n", domain_miss;
    std::cout << to_string(*out) << "\n";
    return ok;
}

std::string sizes(const Machine& m) {
    std::ostringstream os;
    os << kind_name(m) << " ";
    if (auto s = std::get_if<Asst>(&m)) os << s->size() << " states / " << s->register_count() << " registers";
    else if (auto b = std::get_if<Bimachine>(&m)) os << b->left.size() << " left / " << b->right.size() << " right";
    else if (auto a = std::get_if<AsyncBimachine>(&m)) os << a->left.size() << " left / " << a->right.size() << " right";
    else if (auto t = std::get_if<Fst>(&m)) os << t->size() << " states";
    else if (auto d = std::get_if<Dfa>(&m)) os << d->size() << " states";
    else if (auto n = std::get_if<Nfa>(&m)) os << n->size() << " states";
    else if (auto p = std::get_if<Precongruence>(&m)) os << p->size() << " states";
    else if (auto g = std::get_if<Graph>(&m)) os << g->size() << " vertices";
    return os.str();
}

Machine convert(const Machine& m, const std::string& to) {
    const std::string from = kind_name(m);
    if (auto s = std::get_if<Asst>(&m)) {
        if (to == "async-bimachine") return asst_to_async_bimachine(*s);
        if (to == "bimachine") return asst_iffo_to_bimachine(*s);
        if (to == "fst") return asst_to_fst(*s);
    } else if (auto b = std::get_if<Bimachine>(&m)) {
        if (to == "asst") {
            auto res = bimachine_to_asst_iffo(*b);
            for (auto r : res.report.defaulted_registers)
                std::cerr << "note: lambda undefined on '" << b->right.states()[r] << "', register starts empty\n";
            for (auto [l, a, r] : res.report.fallbacks)
                std::cerr << "note: identity update for (" << b->left.states[l] << ", " << b->left.alphabet[a] << ", "
                          << b->right.states()[r] << ")\n";
            return res.machine;
        }
    } else if (auto a = std::get_if<AsyncBimachine>(&m)) {
        if (to == "asst") return async_bimachine_to_asst(*a);
    } else if (auto d = std::get_if<Dfa>(&m)) {
        if (to == "nfa") return d->to_nfa();
    } else if (auto n = std::get_if<Nfa>(&m)) {
        if (to == "dfa") return Dfa::from_nfa(*n);
    } else if (auto t = std::get_if<Fst>(&m)) {
        if (to == "precongruence") return sequential_compat(*t).pc;
    } else if (auto p = std::get_if<Precongruence>(&m)) {
        if (to == "fst") return refinement_to_extension(*p);
    } else if (auto g = std::get_if<Graph>(&m)) {
        if (to == "asst") return coloring_to_asst(*g);
    }
    throw UnsupportedConversion("no conversion from " + from + " to " + to);
}

int cmd_convert(const std::string& file, const std::string& to) {
    const Machine m = load(file);
    Machine out;
    try {
        out = convert(m, to);
    } catch (const PreconditionError& e) {
        throw UnsupportedConversion(e.what());
    } catch (const StructuralError& e) {
        throw UnsupportedConversion(e.what());
    }
    std::cerr << sizes(m) << " -> " << sizes(out) << "\n";
    std::cout << machine_file(out).dump(2) << "\n";
    return ok;
}

int verdict(bool value, const json& witness) {
    std::cout << (value ? "true" : "false") << "\n";
    if (!witness.is_null()) std::cout << witness.dump() << "\n";
    return value ? ok : negative;
}

int check_precongruence(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
    if (j.value("kind", "") != "precongruence") throw InputError("expected a precongruence file");
    const json& p = j.at("payload");
    Dfa base = dfa_from_json(p.at("dfa"));
    if (!base.is_complete()) return verdict(false, {{"reason", "base automaton is not complete"}});
    std::vector<StateSet> compat(base.size());
    for (StateId q = 0; q < base.size(); ++q) compat[q] = bit(q);
    for (const auto& pair : p.at("compatible_pairs")) {
        auto a = index_of(base.states, pair.at(0).get<std::string>());
        auto b = index_of(base.states, pair.at(1).get<std::string>());
        compat[a] |= bit(b);
        compat[b] |= bit(a);
    }
    if (auto v = find_precongruence_violation(base, compat))
        return verdict(false, {{"p", base.states[v->p]}, {"q", base.states[v->q]}, {"symbol", base.alphabet[v->symbol]}});
    return verdict(true, nullptr);
}

int cmd_check(const std::string& file, const std::string& predicate) {
    const std::string text = read_input(file);
    if (predicate == "precongruence") return check_precongruence(text);
    const Machine m = parse_machine_text(text);
    if (predicate == "iffo") {
        const auto& s = expect<Asst>(m, "asst");
        if (auto d = find_flow_disagreement(s))
            return verdict(false, {{"register", s.registers[d->reg]},
                                   {"symbol", s.input_alphabet[d->symbol]},
                                   {"states", {s.states[d->first], s.states[d->second]}}});
        if (!s.fixed_output_register()) return verdict(false, {{"reason", "no fixed output register"}});
        return verdict(true, nullptr);
    }
    if (predicate == "total-domain") {
        const auto& s = expect<Asst>(m, "asst");
        auto res = check_domain_is_underlying_language(s);
        if (res.domain_is_underlying_language) return verdict(true, nullptr);
        json w = nullptr;
        if (res.witness) w = {{"state", s.states[res.witness->first]}, {"register", s.registers[res.witness->second]}};
        return verdict(false, w);
    }
    if (predicate.rfind("functional:", 0) == 0) {
        std::size_t n = 0;
        try {
            n = std::stoul(predicate.substr(11));
        } catch (const std::exception&) {
            throw InputError("functional:N needs a length bound");
        }
        auto w = non_functional_witness(expect<Fst>(m, "fst"), n);
        if (w) return verdict(false, {{"word", *w}});
        return verdict(true, nullptr);
    }
    throw InputError("unknown predicate '" + predicate + "'");
}

int cmd_minrefine(const std::string& file, std::optional<std::size_t> k) {
    const Machine m = load(file);
    const auto& pc = expect<Precongruence>(m, "precongruence");
    if (k) {
        auto found = find_refinement(pc, *k);
        if (!found) return std::cout << "NONE\n", negative;
        std::cout << machine_file(found->first).dump() << "\n";
        return ok;
    }
    auto res = minimal_refinement(pc, guard_limit());
    std::cout << "k_min " << res.k_min << "\n";
    for (const auto& d : res.witnesses) std::cout << machine_file(d).dump() << "\n";
    if (res.truncated) std::cerr << "witness list truncated at " << res.witnesses.size() << "\n";
    return ok;
}

int cmd_faregmin(const std::string& file, std::size_t k) {
    const Machine m = load(file);
    const auto& s = expect<Asst>(m, "asst");
    FaRegMinOptions opt;
    opt.certify_budget = guard_limit();
    auto res = fa_reg_min(s, k, opt);
    if (!res.machine) {
        if (res.counterexample) std::cerr << "candidate failed on '" << to_string(*res.counterexample) << "'\n";
        return std::cout << "NONE\n", negative;
    }
    if (res.exact) std::cerr << "solution is exact\n";
    else std::cerr << "solution checked on words up to length " << res.certified_len << "\n";
    std::cout << machine_file(*res.machine).dump(2) << "\n";
    return ok;
}

int cmd_coloring(const std::string& file) {
    const Machine m = load(file);
    const auto& g = expect<Graph>(m, "graph");
    std::cout << machine_file(coloring_to_asst(g)).dump(2) << "\n";
    return ok;
}

int cmd_congruence(const std::string& file, const std::string& side, std::size_t W, std::optional<std::size_t> D) {
    const Machine m = load(file);
    const auto e = evaluable(m);
    std::size_t words = 0, layer = 1;
    for (std::size_t i = 0; i <= W; ++i, layer *= e.input.size()) {
        words += layer;
        if (words > guard_limit()) throw ResourceError("too many words below the horizon; raise SSTFORGE_GUARD");
    }
    FunctionOracle f(file, e.input, e.output, e.fn);
    const std::size_t d = D.value_or(2 * W);
    BoundedPartition p;
    if (side == "left") p = left_syntactic_classes(f, W, d);
    else if (side == "right") p = right_syntactic_classes(f, W, d);
    else throw InputError("side must be left or right");
    std::cout << "classes " << p.size() << "\n" << to_json(p).dump(2) << "\n";
    return ok;
}

int cmd_dot(const std::string& file) {
    std::cout << machine_dot(load(file));
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming string transducers, bimachines and register minimization"};
    app.require_subcommand(1);
    int code = ok;

    std::string file, word, to, predicate, side = "left";
    std::optional<std::size_t> k, D;
    std::size_t k_req = 0, W = 4;

    auto* eval = app.add_subcommand("eval", "Evaluate a machine on a word (space-separated symbols)");
    eval->add_option("file", file, "Machine file, - for stdin")->required();
    eval->add_option("word", word, "Input word")->required();
    eval->callback([&] { code = cmd_eval(file, word); });

    auto* conv = app.add_subcommand("convert", "Convert between machine kinds");
    conv->add_option("file", file)->required();
    conv->add_option("--to", to, "Target kind")->required();
    conv->callback([&] { code = cmd_convert(file, to); });

    auto* check = app.add_subcommand("check", "Check a predicate");
    check->add_option("file", file)->required();
    check->add_option("--predicate", predicate, "iffo | total-domain | precongruence | functional:N")->required();
    check->callback([&] { code = cmd_check(file, predicate); });

    auto* minref = app.add_subcommand("minrefine", "Minimal DFA refining a precongruence");
    minref->add_option("file", file)->required();
    minref->add_option("--k", k, "Only look for a solution with at most k states");
    minref->callback([&] { code = cmd_minrefine(file, k); });

    auto* frm = app.add_subcommand("faregmin", "Register minimization with the state set fixed");
    frm->add_option("file", file)->required();
    frm->add_option("--k", k_req, "Register budget")->required();
    frm->callback([&] { code = cmd_faregmin(file, k_req); });

    auto* col = app.add_subcommand("coloring", "aSST whose register minimum encodes graph coloring");
    col->add_option("file", file)->required();
    col->callback([&] { code = cmd_coloring(file); });

    auto* cong = app.add_subcommand("congruence", "Bounded left or right syntactic congruence");
    cong->add_option("file", file)->required();
    cong->add_option("--side", side)->check(CLI::IsMember({"left", "right"}));
    cong->add_option("--W", W, "Horizon")->check(CLI::PositiveNumber);
    cong->add_option("--D", D, "Distance threshold (default 2W)")->check(CLI::PositiveNumber);
    cong->callback([&] { code = cmd_congruence(file, side, W, D); });

    auto* dot = app.add_subcommand("dot", "Graphviz output");
    dot->add_option("file", file)->required();
    dot->callback([&] { code = cmd_dot(file); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return input_error;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return input_error;
    } catch (const UnsupportedConversion& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unsupported;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unsupported;
    } catch (const StructuralError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unsupported;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return resource;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed file: " << e.what() << "\n";
        return input_error;
    }
    return code;
}
