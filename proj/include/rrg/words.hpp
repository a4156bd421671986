#pragma once

// Cyclically reduced words over {pi_1^{+-1}, ..., pi_d^{+-1}} modulo rotation
// and inversion, with the statistics |w|, h(w), c(w) and the doubling /
// halving moves that drive the cycle dynamics.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rrg/rational.hpp"

namespace rrg {

inline constexpr int kMaxGenerators = 120;

// pi_g or pi_g^{-1}. Letters are totally ordered as
// pi_1 < pi_1^{-1} < pi_2 < pi_2^{-1} < ...
class Letter {
public:
    constexpr Letter() = default;
    Letter(int generator, bool inverted);

    static constexpr Letter from_code(std::uint8_t code) {
        Letter l;
        l.code_ = code;
        return l;
    }

    int generator() const { return code_ / 2 + 1; }
    bool inverted() const { return (code_ & 1U) != 0; }
    std::uint8_t code() const { return code_; }
    // Zero-based permutation index.
    int label() const { return code_ / 2; }

    Letter inverse() const { return from_code(code_ ^ 1U); }

    auto operator<=>(const Letter&) const = default;

private:
    std::uint8_t code_ = 0;
};

using Word = std::vector<Letter>;

bool is_cyclically_reduced(std::span<const Letter> word);

Word inverse_word(std::span<const Letter> word);

// "1 2' 1" is pi_1 pi_2^{-1} pi_1. Throws std::invalid_argument on bad syntax.
Word parse_word(std::string_view text);
std::string format_word(std::span<const Letter> word);

struct WordStats {
    int length = 0;
    int h = 0;
    int c = 0;
};

// Throws std::invalid_argument unless the word is nonempty and cyclically reduced.
WordStats word_stats(std::span<const Letter> word);

// An element of W_k / D_{2k}, stored as the lexicographically least member of
// its rotation/inversion orbit.
class WordClass {
public:
    WordClass() = default;

    const Word& word() const { return canonical_; }
    int length() const { return static_cast<int>(canonical_.size()); }
    int h() const { return h_; }
    int c() const { return c_; }
    int orbit_size() const { return 2 * length() / h_; }
    // Largest generator index that occurs.
    int max_generator() const;
    // e_i = number of pi_i^{+-1} letters, for i = 1..d (index 0 unused).
    std::vector<int> letter_counts(int d) const;

    std::string str() const { return format_word(canonical_); }

    // Shorter words first, then lexicographic.
    std::strong_ordering operator<=>(const WordClass& other) const;
    bool operator==(const WordClass& other) const { return canonical_ == other.canonical_; }

private:
    friend WordClass canonicalize(std::span<const Letter> word);

    Word canonical_;
    int h_ = 0;
    int c_ = 0;
};

WordClass canonicalize(std::span<const Letter> word);

// Every member of the dihedral orbit of w, deduplicated and sorted.
std::vector<Word> orbit(std::span<const Letter> word);

// Doubles the letter at 1-based `position` of the canonical representative.
// Throws std::out_of_range when position is not in [1, |w|].
WordClass double_letter(const WordClass& w, int position);

// All |w| doublings, in position order (with multiplicity).
std::vector<WordClass> doublings(const WordClass& w);

using WordMultiset = std::map<WordClass, int>;

// One entry per pair of cyclically adjacent equal letters; total multiplicity c(w).
WordMultiset halvings(const WordClass& w);

struct EnumerationLimits {
    // Upper bound on log((2d)^k), the size of the backtracking tree.
    double max_log_words = 21.0;
};

// Every class of W_k / D_{2k} over d generators, sorted.
// Throws rrg::BudgetExceeded when k*log(2d) exceeds the limit.
std::vector<WordClass> enumerate_classes(int d, int k, const EnumerationLimits& limits = {});

// Number of cyclically reduced words of length k; a(d, 0) = 0.
// Throws std::overflow_error instead of wrapping.
std::uint64_t a_count(int d, int k);

Rational mu_weight(const WordClass& w);
// (a(d,k) - a(d,k-1)) / 2
Rational mu_k(int d, int k);
// mu_{d+1}(k) - mu_d(k)
Rational nu_rate(int d, int k);

// Exact checks of the combinatorial identities the limit process rests on.
struct IdentityCheck {
    std::string name;
    int k = 0;
    bool passed = true;
    std::string detail;
};

struct IdentityReport {
    int d = 0;
    int max_length = 0;
    std::vector<IdentityCheck> checks;

    bool all_passed() const;
};

IdentityReport verify_word_identities(int d, int max_length, const EnumerationLimits& limits = {});

}  // namespace rrg

template <>
struct std::hash<rrg::WordClass> {
    std::size_t operator()(const rrg::WordClass& w) const noexcept;
};
