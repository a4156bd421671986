#include "rrg/word_table.hpp"

#include <algorithm>
#include <stdexcept>

namespace rrg {

WordTable::WordTable(int d, int max_length, const EnumerationLimits& limits) : d_(d), max_length_(max_length) {
    if (d < 1 || max_length < 0) {
        throw std::invalid_argument("WordTable requires d >= 1 and max_length >= 0");
    }
    length_begin_.assign(static_cast<std::size_t>(max_length) + 2, 0);
    for (int k = 1; k <= max_length; ++k) {
        length_begin_[static_cast<std::size_t>(k)] = classes_.size();
        auto level = enumerate_classes(d, k, limits);
        classes_.insert(classes_.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
    }
    length_begin_[static_cast<std::size_t>(max_length) + 1] = classes_.size();
    length_begin_[0] = 0;

    doubling_offset_.reserve(classes_.size() + 1);
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        doubling_offset_.push_back(doubling_flat_.size());
        const WordClass& w = classes_[i];
        for (int pos = 1; pos <= w.length(); ++pos) {
            if (w.length() + 1 > max_length) {
                doubling_flat_.push_back(kBeyond);
                continue;
            }
            const auto target = find(double_letter(w, pos));
            doubling_flat_.push_back(static_cast<std::int32_t>(*target));
        }
    }
    doubling_offset_.push_back(doubling_flat_.size());
}

std::optional<std::size_t> WordTable::find(const WordClass& w) const {
    if (w.length() < 1 || w.length() > max_length_) {
        return std::nullopt;
    }
    const auto [first, last] = length_range(w.length());
    const auto begin = classes_.begin() + static_cast<std::ptrdiff_t>(first);
    const auto end = classes_.begin() + static_cast<std::ptrdiff_t>(last);
    const auto it = std::lower_bound(begin, end, w);
    if (it == end || *it != w) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - classes_.begin());
}

std::span<const std::int32_t> WordTable::doubling_targets(std::size_t index) const {
    const std::size_t from = doubling_offset_[index];
    const std::size_t to = doubling_offset_[index + 1];
    return {doubling_flat_.data() + from, to - from};
}

std::pair<std::size_t, std::size_t> WordTable::length_range(int k) const {
    if (k < 1 || k > max_length_) {
        return {classes_.size(), classes_.size()};
    }
    return {length_begin_[static_cast<std::size_t>(k)], length_begin_[static_cast<std::size_t>(k) + 1]};
}

}  // namespace rrg
