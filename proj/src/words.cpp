#include "ncfps/words.hpp"

#include <algorithm>
#include <limits>

#include "ncfps/linalg.hpp"

namespace ncfps {

Word concat(const Word& w, const Word& v) {
    Word out;
    out.reserve(w.size() + v.size());
    out.insert(out.end(), w.begin(), w.end());
    out.insert(out.end(), v.begin(), v.end());
    return out;
}

Word transpose(const Word& w) { return Word(w.rbegin(), w.rend()); }

bool GradedLess::operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

std::size_t count_words(int n_letters, int max_len) {
    constexpr std::size_t cap = std::numeric_limits<std::size_t>::max();
    std::size_t total = 0, level = 1;
    for (int k = 0; k <= max_len; ++k) {
        if (total > cap - level) return cap;
        total += level;
        if (k < max_len && level > cap / static_cast<std::size_t>(n_letters)) return cap;
        level *= static_cast<std::size_t>(n_letters);
    }
    return total;
}

std::vector<Word> enumerate(int n_letters, int max_len) {
    if (n_letters < 1 || max_len < 0) throw UsageError("enumerate: need N >= 1 and max_len >= 0");
    std::vector<Word> out;
    out.reserve(count_words(n_letters, max_len));
    out.push_back({});
    std::size_t level_begin = 0;
    for (int len = 1; len <= max_len; ++len) {
        const std::size_t level_end = out.size();
        // Children of a graded-sorted level, appended in parent order, stay sorted.
        for (std::size_t i = level_begin; i < level_end; ++i)
            for (int g = 1; g <= n_letters; ++g) {
                Word w = out[i];
                w.push_back(g);
                out.push_back(std::move(w));
            }
        level_begin = level_end;
    }
    return out;
}

bool valid_word(const Word& w, int n_letters) {
    return std::all_of(w.begin(), w.end(), [&](int g) { return g >= 1 && g <= n_letters; });
}

std::string to_string(const Word& w) {
    if (w.empty()) return "e";
    std::string s;
    for (int g : w) s += "g" + std::to_string(g);
    return s;
}

}  // namespace ncfps
