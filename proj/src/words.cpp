#include "rrg/words.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rrg/errors.hpp"

namespace rrg {

Letter::Letter(int generator, bool inverted) {
    if (generator < 1 || generator > kMaxGenerators) {
        throw std::invalid_argument("letter generator out of range: " + std::to_string(generator));
    }
    code_ = static_cast<std::uint8_t>(2 * (generator - 1) + (inverted ? 1 : 0));
}

bool is_cyclically_reduced(std::span<const Letter> word) {
    const std::size_t k = word.size();
    if (k == 0) {
        return false;
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (word[(i + 1) % k] == word[i].inverse()) {
            return false;
        }
    }
    return true;
}

Word inverse_word(std::span<const Letter> word) {
    Word out(word.rbegin(), word.rend());
    for (auto& l : out) {
        l = l.inverse();
    }
    return out;
}

Word parse_word(std::string_view text) {
    Word out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == ' ' || text[i] == '\t' || text[i] == ',') {
            ++i;
            continue;
        }
        int gen = 0;
        auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), gen);
        if (ec != std::errc{} || ptr == text.data() + i) {
            throw std::invalid_argument("bad word syntax near '" + std::string(text.substr(i)) + "'");
        }
        i = static_cast<std::size_t>(ptr - text.data());
        bool inv = false;
        if (i < text.size() && text[i] == '\'') {
            inv = true;
            ++i;
        }
        out.emplace_back(gen, inv);
    }
    if (out.empty()) {
        throw std::invalid_argument("empty word");
    }
    return out;
}

std::string format_word(std::span<const Letter> word) {
    std::string s;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i > 0) {
            s += ' ';
        }
        s += std::to_string(word[i].generator());
        if (word[i].inverted()) {
            s += '\'';
        }
    }
    return s;
}

namespace {

// Offset of the lexicographically least rotation, O(k^2).
std::size_t least_rotation(std::span<const Letter> w) {
    const std::size_t k = w.size();
    std::size_t best = 0;
    for (std::size_t r = 1; r < k; ++r) {
        for (std::size_t i = 0; i < k; ++i) {
            const Letter a = w[(r + i) % k];
            const Letter b = w[(best + i) % k];
            if (a != b) {
                if (a < b) {
                    best = r;
                }
                break;
            }
        }
    }
    return best;
}

Word rotated(std::span<const Letter> w, std::size_t offset) {
    Word out;
    out.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        out.push_back(w[(offset + i) % w.size()]);
    }
    return out;
}

int period_power(std::span<const Letter> w) {
    const std::size_t k = w.size();
    for (std::size_t p = 1; p <= k; ++p) {
        if (k % p != 0) {
            continue;
        }
        bool periodic = true;
        for (std::size_t i = 0; i + p < k && periodic; ++i) {
            periodic = w[i] == w[i + p];
        }
        if (periodic) {
            return static_cast<int>(k / p);
        }
    }
    return 1;
}

int double_letter_pairs(std::span<const Letter> w) {
    const std::size_t k = w.size();
    if (k < 2) {
        return 0;
    }
    int c = 0;
    for (std::size_t i = 0; i < k; ++i) {
        c += w[i] == w[(i + 1) % k] ? 1 : 0;
    }
    return c;
}

void require_reduced(std::span<const Letter> word) {
    if (!is_cyclically_reduced(word)) {
        throw std::invalid_argument("word is not cyclically reduced: " + format_word(word));
    }
}

}  // namespace

WordStats word_stats(std::span<const Letter> word) {
    require_reduced(word);
    return {static_cast<int>(word.size()), period_power(word), double_letter_pairs(word)};
}

WordClass canonicalize(std::span<const Letter> word) {
    require_reduced(word);
    Word forward = rotated(word, least_rotation(word));
    const Word inv = inverse_word(word);
    Word backward = rotated(inv, least_rotation(inv));

    WordClass out;
    out.canonical_ = std::min(forward, backward);
    out.h_ = period_power(out.canonical_);
    out.c_ = double_letter_pairs(out.canonical_);
    return out;
}

int WordClass::max_generator() const {
    int g = 0;
    for (const auto& l : canonical_) {
        g = std::max(g, l.generator());
    }
    return g;
}

std::vector<int> WordClass::letter_counts(int d) const {
    std::vector<int> e(static_cast<std::size_t>(d) + 1, 0);
    for (const auto& l : canonical_) {
        if (l.generator() > d) {
            throw std::invalid_argument("word uses generator beyond d");
        }
        ++e[static_cast<std::size_t>(l.generator())];
    }
    return e;
}

std::strong_ordering WordClass::operator<=>(const WordClass& other) const {
    if (auto cmp = canonical_.size() <=> other.canonical_.size(); cmp != 0) {
        return cmp;
    }
    return std::lexicographical_compare_three_way(canonical_.begin(), canonical_.end(),
                                                  other.canonical_.begin(), other.canonical_.end());
}

std::vector<Word> orbit(std::span<const Letter> word) {
    require_reduced(word);
    std::set<Word> seen;
    const Word inv = inverse_word(word);
    for (std::size_t r = 0; r < word.size(); ++r) {
        seen.insert(rotated(word, r));
        seen.insert(rotated(inv, r));
    }
    return {seen.begin(), seen.end()};
}

WordClass double_letter(const WordClass& w, int position) {
    if (position < 1 || position > w.length()) {
        throw std::out_of_range("doubling position " + std::to_string(position) + " outside [1, " +
                                std::to_string(w.length()) + "]");
    }
    Word grown = w.word();
    const auto at = grown.begin() + position;
    grown.insert(at, grown[static_cast<std::size_t>(position - 1)]);
    return canonicalize(grown);
}

std::vector<WordClass> doublings(const WordClass& w) {
    std::vector<WordClass> out;
    out.reserve(static_cast<std::size_t>(w.length()));
    for (int i = 1; i <= w.length(); ++i) {
        out.push_back(double_letter(w, i));
    }
    return out;
}

WordMultiset halvings(const WordClass& w) {
    WordMultiset out;
    const Word& letters = w.word();
    const std::size_t k = letters.size();
    if (k < 2) {
        return out;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t next = (i + 1) % k;
        if (letters[i] != letters[next]) {
            continue;
        }
        Word shrunk;
        shrunk.reserve(k - 1);
        for (std::size_t j = 0; j < k; ++j) {
            if (j != next) {
                shrunk.push_back(letters[j]);
            }
        }
        ++out[canonicalize(shrunk)];
    }
    return out;
}

std::vector<WordClass> enumerate_classes(int d, int k, const EnumerationLimits& limits) {
    if (d < 1 || d > kMaxGenerators || k < 1) {
        throw std::invalid_argument("enumerate_classes requires d >= 1 and k >= 1");
    }
    if (static_cast<double>(k) * std::log(2.0 * d) > limits.max_log_words) {
        throw BudgetExceeded("word enumeration for d=" + std::to_string(d) + ", k=" + std::to_string(k) +
                             " exceeds the configured budget");
    }

    std::vector<WordClass> out;
    Word prefix(static_cast<std::size_t>(k));
    const int alphabet = 2 * d;

    // The canonical representative starts with the least letter occurring in
    // the word or its inverse, so every later letter (and its inverse) must be
    // no smaller than the first.
    std::function<void(std::size_t)> extend = [&](std::size_t pos) {
        if (pos == prefix.size()) {
            if (prefix.back().inverse() == prefix.front()) {
                return;
            }
            WordClass cls = canonicalize(prefix);
            if (cls.word() == prefix) {
                out.push_back(std::move(cls));
            }
            return;
        }
        for (int code = 0; code < alphabet; ++code) {
            const Letter l = Letter::from_code(static_cast<std::uint8_t>(code));
            if (pos > 0) {
                if (l < prefix[0] || l.inverse() < prefix[0] || l == prefix[pos - 1].inverse()) {
                    continue;
                }
            }
            prefix[pos] = l;
            extend(pos + 1);
        }
    };
    extend(0);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw std::overflow_error("a(d,k) overflows 64 bits");
    }
    return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw std::overflow_error("a(d,k) overflows 64 bits");
    }
    return r;
}

}  // namespace

std::uint64_t a_count(int d, int k) {
    if (d < 1 || k < 0) {
        throw std::invalid_argument("a_count requires d >= 1 and k >= 0");
    }
    if (k == 0) {
        return 0;
    }
    const auto base = static_cast<std::uint64_t>(2 * d - 1);
    std::uint64_t power = 1;
    for (int i = 0; i < k; ++i) {
        power = checked_mul(power, base);
    }
    if (k % 2 == 0) {
        return checked_add(power, static_cast<std::uint64_t>(2 * d)) - 1;
    }
    return checked_add(power, 1);
}

Rational mu_weight(const WordClass& w) {
    return Rational(w.length() - w.c(), w.h());
}

Rational mu_k(int d, int k) {
    if (k < 1) {
        throw std::invalid_argument("mu_k requires k >= 1");
    }
    Rational diff(boost::multiprecision::cpp_int(a_count(d, k)));
    diff -= Rational(boost::multiprecision::cpp_int(a_count(d, k - 1)));
    return diff / 2;
}

Rational nu_rate(int d, int k) {
    return mu_k(d + 1, k) - mu_k(d, k);
}

bool IdentityReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
}

IdentityReport verify_word_identities(int d, int max_length, const EnumerationLimits& limits) {
    IdentityReport report;
    report.d = d;
    report.max_length = max_length;

    std::vector<WordClass> previous;
    for (int k = 1; k <= max_length; ++k) {
        const std::vector<WordClass> classes = enumerate_classes(d, k, limits);

        // Orbit sizes and total word count.
        {
            IdentityCheck check{"orbit_size", k, true, {}};
            std::uint64_t total = 0;
            for (const auto& w : classes) {
                const auto size = orbit(w.word()).size();
                total += size;
                if (static_cast<int>(size) != w.orbit_size()) {
                    check.passed = false;
                    check.detail = "orbit of " + w.str() + " has " + std::to_string(size) + " elements";
                    break;
                }
            }
            if (check.passed && total != a_count(d, k)) {
                check.passed = false;
                check.detail = "orbits cover " + std::to_string(total) + " words, a(d,k) = " +
                               std::to_string(a_count(d, k));
            }
            report.checks.push_back(std::move(check));
        }

        // a/h(u) = b/h(w) for every adjacent pair.
        if (k >= 2) {
            IdentityCheck check{"double_halve_ratio", k, true, {}};
            std::map<std::pair<WordClass, WordClass>, std::pair<int, int>> ab;
            for (const auto& u : previous) {
                for (const auto& w : doublings(u)) {
                    ++ab[{u, w}].first;
                }
            }
            for (const auto& w : classes) {
                for (const auto& [u, b] : halvings(w)) {
                    ab[{u, w}].second += b;
                }
            }
            for (const auto& [pair, counts] : ab) {
                const auto& [u, w] = pair;
                if (counts.first * w.h() != counts.second * u.h()) {
                    check.passed = false;
                    check.detail = "u=" + u.str() + " w=" + w.str() + " a=" + std::to_string(counts.first) +
                                   " b=" + std::to_string(counts.second);
                    break;
                }
            }
            report.checks.push_back(std::move(check));
        }

        // sum_u sum_i q_{u^(i)} / h(u) = sum_w c(w)/h(w) q_w
        {
            IdentityCheck check{"doubling_vector", k, true, {}};
            std::map<WordClass, Rational> lhs;
            for (const auto& u : previous) {
                for (const auto& w : doublings(u)) {
                    lhs[w] += Rational(1, u.h());
                }
            }
            for (const auto& w : classes) {
                const Rational rhs(w.c(), w.h());
                const auto it = lhs.find(w);
                const Rational got = it == lhs.end() ? Rational(0) : it->second;
                if (got != rhs) {
                    check.passed = false;
                    check.detail = "coefficient of " + w.str() + " is " + got.str() + ", expected " + rhs.str();
                    break;
                }
            }
            if (lhs.size() > classes.size()) {
                check.passed = false;
                check.detail = "doublings produced words outside the enumerated classes";
            }
            report.checks.push_back(std::move(check));
        }

        // Immigration rates and stationary means.
        {
            Rational mu_sum = 0;
            Rational inv_h_sum = 0;
            for (const auto& w : classes) {
                mu_sum += mu_weight(w);
                inv_h_sum += Rational(1, w.h());
            }
            IdentityCheck rate{"immigration_rate_sum", k, mu_sum == mu_k(d, k), {}};
            if (!rate.passed) {
                rate.detail = "sum mu(w) = " + mu_sum.str() + ", expected " + mu_k(d, k).str();
            }
            report.checks.push_back(std::move(rate));

            const Rational expected_mean(boost::multiprecision::cpp_int(a_count(d, k)), 2 * k);
            IdentityCheck mean{"stationary_mean_sum", k, inv_h_sum == expected_mean, {}};
            if (!mean.passed) {
                mean.detail = "sum 1/h(w) = " + inv_h_sum.str() + ", expected " + expected_mean.str();
            }
            report.checks.push_back(std::move(mean));
        }

        previous = classes;
    }
    return report;
}

}  // namespace rrg

std::size_t std::hash<rrg::WordClass>::operator()(const rrg::WordClass& w) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (const auto& l : w.word()) {
        h ^= l.code();
        h *= 1099511628211ULL;
    }
    return h;
}
