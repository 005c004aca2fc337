#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sstforge {

/// Raised for malformed input: unknown symbols, bad files, schema violations.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An operation was called on a machine outside its supported class.
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A machine violates a structural convention (missing transition, bad shape).
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An exhaustive search would exceed its configured budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Symbol = std::string;
using Word = std::vector<Symbol>;
using Alphabet = std::vector<Symbol>;

inline Word concat(Word u, const Word& v) {
    u.insert(u.end(), v.begin(), v.end());
    return u;
}

inline void append(Word& u, const Word& v) { u.insert(u.end(), v.begin(), v.end()); }

inline Word reversed(Word w) {
    std::reverse(w.begin(), w.end());
    return w;
}

/// Longest common prefix.
inline Word lcp(const Word& u, const Word& v) {
    auto [iu, iv] = std::mismatch(u.begin(), u.end(), v.begin(), v.end());
    return Word(u.begin(), iu);
}

/// Longest common suffix.
inline Word lcs(const Word& u, const Word& v) {
    auto [iu, iv] = std::mismatch(u.rbegin(), u.rend(), v.rbegin(), v.rend());
    return Word(iu.base(), u.end());
}

/// Prefix distance |u| + |v| - 2|u ^ v|.
inline std::size_t dist(const Word& u, const Word& v) {
    return u.size() + v.size() - 2 * lcp(u, v).size();
}

/// Suffix distance, used by the right syntactic congruence.
inline std::size_t dist_suffix(const Word& u, const Word& v) {
    return u.size() + v.size() - 2 * lcs(u, v).size();
}

/// Space-separated rendering; the empty word renders as "".
inline std::string to_string(const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ' ';
        out += w[i];
    }
    return out;
}

/// Parses whitespace-separated symbol tokens.
inline Word parse_word(const std::string& text) {
    std::istringstream in(text);
    Word w;
    for (std::string tok; in >> tok;) w.push_back(tok);
    return w;
}

/// Word made of single-character symbols, e.g. chars("aab") = [a, a, b].
inline Word chars(const std::string& text) {
    Word w;
    for (char c : text) w.emplace_back(1, c);
    return w;
}

inline std::optional<std::size_t> symbol_index(const Alphabet& alphabet, const Symbol& s) {
    auto it = std::find(alphabet.begin(), alphabet.end(), s);
    if (it == alphabet.end()) return std::nullopt;
    return static_cast<std::size_t>(it - alphabet.begin());
}

inline std::size_t require_symbol(const Alphabet& alphabet, const Symbol& s) {
    auto idx = symbol_index(alphabet, s);
    if (!idx) throw InputError("unknown symbol '" + s + "'");
    return *idx;
}

inline void validate_alphabet(const Alphabet& alphabet) {
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        const auto& s = alphabet[i];
        if (s.empty()) throw InputError("empty symbol in alphabet");
        if (std::any_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
            throw InputError("symbol '" + s + "' contains whitespace");
        if (std::find(alphabet.begin(), alphabet.begin() + static_cast<std::ptrdiff_t>(i), s) !=
            alphabet.begin() + static_cast<std::ptrdiff_t>(i))
            throw InputError("duplicate symbol '" + s + "'");
    }
}

/// Calls fn on every word over the alphabet of length <= max_len, in shortlex order.
/// Stops early when fn returns false.
template <typename Fn>
void for_each_word(const Alphabet& alphabet, std::size_t max_len, Fn&& fn) {
    std::vector<std::size_t> digits;
    Word w;
    for (std::size_t len = 0; len <= max_len; ++len) {
        digits.assign(len, 0);
        w.assign(len, Symbol{});
        if (len > 0 && alphabet.empty()) return;
        while (true) {
            for (std::size_t i = 0; i < len; ++i) w[i] = alphabet[digits[i]];
            if (!fn(static_cast<const Word&>(w))) return;
            bool exhausted = true;
            for (std::size_t pos = len; pos-- > 0;) {
                if (++digits[pos] < alphabet.size()) {
                    exhausted = false;
                    break;
                }
                digits[pos] = 0;
            }
            if (exhausted) break;
        }
    }
}

inline std::vector<Word> all_words(const Alphabet& alphabet, std::size_t max_len) {
    std::vector<Word> out;
    for_each_word(alphabet, max_len, [&](const Word& w) {
        out.push_back(w);
        return true;
    });
    return out;
}

using WordFunction = std::function<std::optional<Word>(const Word&)>;

enum class AgreementMode {
    /// The second function must extend the first: agree wherever the first is defined.
    ExtendsFirst,
    /// Equal as partial functions: same domain, same values.
    Equal,
};

/// Shortest word (shortlex) of length <= max_len on which the two functions disagree.
inline std::optional<Word> first_disagreement(const WordFunction& f1, const WordFunction& f2,
                                              const Alphabet& alphabet, std::size_t max_len,
                                              AgreementMode mode = AgreementMode::Equal) {
    std::optional<Word> witness;
    for_each_word(alphabet, max_len, [&](const Word& w) {
        auto a = f1(w);
        if (!a && mode == AgreementMode::ExtendsFirst) return true;
        auto b = f2(w);
        if (a != b) {
            witness = w;
            return false;
        }
        return true;
    });
    return witness;
}

}  // namespace sstforge
