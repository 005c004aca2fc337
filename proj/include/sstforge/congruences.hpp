#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sstforge/words.hpp"

namespace sstforge {

/// A word function with its alphabets. Evaluations are memoized; the cache is
/// shared between copies and guarded, so one oracle may be queried from several threads.
class FunctionOracle {
public:
    FunctionOracle(std::string name, Alphabet input, Alphabet output, WordFunction eval)
        : name_(std::move(name)), input_(std::move(input)), output_(std::move(output)),
          eval_(std::move(eval)), cache_(std::make_shared<Cache>()) {}

    std::optional<Word> operator()(const Word& w) const {
        {
            std::lock_guard lock(cache_->mutex);
            auto it = cache_->values.find(w);
            if (it != cache_->values.end()) return it->second;
        }
        auto out = eval_(w);
        std::lock_guard lock(cache_->mutex);
        cache_->values.emplace(w, out);
        return out;
    }

    const std::string& name() const { return name_; }
    const Alphabet& input_alphabet() const { return input_; }
    const Alphabet& output_alphabet() const { return output_; }

private:
    struct Cache {
        std::mutex mutex;
        std::map<Word, std::optional<Word>> values;
    };
    std::string name_;
    Alphabet input_;
    Alphabet output_;
    WordFunction eval_;
    std::shared_ptr<Cache> cache_;
};

/// Why two class representatives were kept apart.
struct Separation {
    std::size_t first = 0;   // class indices
    std::size_t second = 0;
    Word context;            // the test word that separates them
    bool by_domain = false;  // one side defined, the other not
    std::size_t distance = 0;
};

struct PartitionClass {
    std::vector<Word> members;  // members[0] is the representative
    /// Some member's distance to the representative still grows at the horizon, so
    /// the merge may be an artifact of the bound.
    bool growing = false;
};

/// Partition of the words of length at most the horizon.
struct BoundedPartition {
    std::size_t horizon = 0;
    std::size_t threshold = 0;
    std::vector<PartitionClass> classes;
    std::vector<Separation> separations;
    /// False when merges are only known to hold up to the horizon.
    bool exact = false;

    std::size_t size() const { return classes.size(); }

    std::optional<std::size_t> class_of(const Word& w) const {
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (std::find(classes[i].members.begin(), classes[i].members.end(), w) != classes[i].members.end()) return i;
        return std::nullopt;
    }
};

enum class Side { left, right };

namespace detail {

struct Comparison {
    std::optional<Separation> separation;
    std::vector<std::size_t> profile;  // largest distance per context length
};

/// Compares u and v in every context of length at most W, placed before them for the
/// left congruence and after them for the right one.
inline Comparison compare_in_contexts(const FunctionOracle& f, Side side, const Word& u, const Word& v,
                                      const std::vector<Word>& contexts, std::size_t W, std::size_t D) {
    Comparison c;
    c.profile.assign(W + 1, 0);
    for (const auto& w : contexts) {
        auto fu = side == Side::left ? f(concat(w, u)) : f(concat(u, w));
        auto fv = side == Side::left ? f(concat(w, v)) : f(concat(v, w));
        if (fu.has_value() != fv.has_value()) {
            c.separation = Separation{0, 0, w, true, 0};
            return c;
        }
        if (!fu) continue;
        const std::size_t d = side == Side::left ? dist(*fu, *fv) : dist_suffix(*fu, *fv);
        c.profile[w.size()] = std::max(c.profile[w.size()], d);
        if (d > D) {
            c.separation = Separation{0, 0, w, false, d};
            return c;
        }
    }
    return c;
}

inline BoundedPartition syntactic_classes(const FunctionOracle& f, Side side, std::size_t W, std::size_t D) {
    if (W == 0 || D == 0) throw InputError("horizon and threshold must be positive");
    const auto words = all_words(f.input_alphabet(), W);
    BoundedPartition p;
    p.horizon = W;
    p.threshold = D;
    for (const auto& u : words) {
        bool placed = false;
        for (auto& cls : p.classes) {
            auto c = compare_in_contexts(f, side, cls.members[0], u, words, W, D);
            if (c.separation) continue;
            cls.members.push_back(u);
            if (W >= 1 && c.profile[W] > c.profile[W - 1]) cls.growing = true;
            placed = true;
            break;
        }
        if (!placed) p.classes.push_back(PartitionClass{{u}, false});
    }
    for (std::size_t i = 0; i < p.classes.size(); ++i)
        for (std::size_t j = i + 1; j < p.classes.size(); ++j) {
            auto c = compare_in_contexts(f, side, p.classes[i].members[0], p.classes[j].members[0], words, W, D);
            if (c.separation) {
                c.separation->first = i;
                c.separation->second = j;
                p.separations.push_back(*c.separation);
            }
        }
    return p;
}

}  // namespace detail

/// Bounded left syntactic congruence: u and v are merged when, for every w of
/// length at most W, wu and wv are both in the domain or both outside it, and
/// f(wu), f(wv) are within prefix distance D. Each word joins the first class whose
/// representative it matches.
inline BoundedPartition left_syntactic_classes(const FunctionOracle& f, std::size_t W, std::size_t D) {
    return detail::syntactic_classes(f, Side::left, W, D);
}

/// Mirror of left_syntactic_classes: contexts follow the words and outputs are
/// compared by suffix distance.
inline BoundedPartition right_syntactic_classes(const FunctionOracle& f, std::size_t W, std::size_t D) {
    return detail::syntactic_classes(f, Side::right, W, D);
}

using MembershipOracle = std::function<bool(const Word&)>;

/// Words of length at most W grouped by membership of uw for all |w| <= W.
inline BoundedPartition myhill_nerode_classes(const MembershipOracle& L, const Alphabet& alphabet, std::size_t W) {
    const auto words = all_words(alphabet, W);
    BoundedPartition p;
    p.horizon = W;
    std::map<std::vector<bool>, std::size_t> by_signature;
    std::vector<std::vector<bool>> signatures;
    for (const auto& u : words) {
        std::vector<bool> sig;
        sig.reserve(words.size());
        for (const auto& w : words) sig.push_back(L(concat(u, w)));
        auto [it, fresh] = by_signature.emplace(sig, p.classes.size());
        if (fresh) {
            p.classes.push_back(PartitionClass{{u}, false});
            signatures.push_back(std::move(sig));
        } else {
            p.classes[it->second].members.push_back(u);
        }
    }
    for (std::size_t i = 0; i < p.classes.size(); ++i)
        for (std::size_t j = i + 1; j < p.classes.size(); ++j)
            for (std::size_t c = 0; c < words.size(); ++c)
                if (signatures[i][c] != signatures[j][c]) {
                    p.separations.push_back(Separation{i, j, words[c], true, 0});
                    break;
                }
    return p;
}

}  // namespace sstforge
