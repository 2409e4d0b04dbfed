#pragma once

#include <string>
#include <vector>

namespace ncfps {

// Word over generators g_1..g_N, stored as 1-based letters. Empty = identity.
using Word = std::vector<int>;

Word concat(const Word& w, const Word& v);
Word transpose(const Word& w);

// Graded lexicographic: shorter words first, then letter by letter.
struct GradedLess {
    bool operator()(const Word& a, const Word& b) const;
};

// All words of length <= max_len in graded lex order.
std::vector<Word> enumerate(int n_letters, int max_len);

// Number of words of length <= max_len, saturating at SIZE_MAX.
std::size_t count_words(int n_letters, int max_len);

bool valid_word(const Word& w, int n_letters);

// "e" for the empty word, otherwise "g1g2..."
std::string to_string(const Word& w);

}  // namespace ncfps
