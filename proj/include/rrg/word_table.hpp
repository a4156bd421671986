#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rrg/words.hpp"

namespace rrg {

// Dense index over W'_L = all classes of length 1..L for a fixed d, with the
// doubling transitions precomputed. Indices are ordered by (length, word).
class WordTable {
public:
    static constexpr std::int32_t kBeyond = -1;

    WordTable(int d, int max_length, const EnumerationLimits& limits = {});

    int d() const { return d_; }
    int max_length() const { return max_length_; }
    std::size_t size() const { return classes_.size(); }

    const WordClass& word(std::size_t index) const { return classes_[index]; }
    int length(std::size_t index) const { return classes_[index].length(); }

    std::optional<std::size_t> find(const WordClass& w) const;

    // Target of doubling the i-th letter (0-based) for each position; kBeyond
    // when the result would be longer than max_length.
    std::span<const std::int32_t> doubling_targets(std::size_t index) const;

    // Half-open index range [first, last) of classes with the given length.
    std::pair<std::size_t, std::size_t> length_range(int k) const;

private:
    int d_;
    int max_length_;
    std::vector<WordClass> classes_;
    std::vector<std::size_t> length_begin_;
    std::vector<std::int32_t> doubling_flat_;
    std::vector<std::size_t> doubling_offset_;
};

}  // namespace rrg
