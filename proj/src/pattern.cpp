#include "loopsim/pattern.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace loopsim {

int pattern_total(const Pattern& pattern) {
    return std::accumulate(pattern.begin(), pattern.end(), 0);
}

bool is_collision_free(const Pattern& pattern) {
    return std::all_of(pattern.begin(), pattern.end(), [](int c) { return c == 0 || c == 1; });
}

std::string pattern_string(const Pattern& pattern) {
    std::string out;
    out.reserve(pattern.size());
    for (int c : pattern) {
        if (c < 0 || c > 9) throw std::invalid_argument("pattern_string: occupation out of range");
        out.push_back(static_cast<char>('0' + c));
    }
    return out;
}

Pattern pattern_from_string(const std::string& text) {
    Pattern out;
    out.reserve(text.size());
    for (char c : text) {
        if (c < '0' || c > '9') throw std::invalid_argument("pattern_from_string: bad digit");
        out.push_back(c - '0');
    }
    return out;
}

Pattern pattern_from_bins(int modes, const std::vector<int>& bins) {
    if (modes <= 0) throw std::invalid_argument("pattern_from_bins: modes must be positive");
    Pattern out(modes, 0);
    for (int b : bins) {
        if (b < 1 || b > modes) throw std::invalid_argument("pattern_from_bins: bin out of range");
        out[b - 1] += 1;
    }
    return out;
}

std::vector<int> occupied_bins(const Pattern& pattern) {
    std::vector<int> bins;
    for (size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] > 0) bins.push_back(static_cast<int>(i) + 1);
    }
    return bins;
}

uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<uint64_t>(n - k + i) / static_cast<uint64_t>(i);
    }
    return result;
}

std::vector<Pattern> collision_free_outcomes(int modes, int photons) {
    if (photons < 0 || photons > modes) {
        throw std::invalid_argument("collision_free_outcomes: need 0 <= n <= m");
    }
    std::vector<Pattern> out;
    out.reserve(binomial(modes, photons));
    if (photons == 0) {
        out.emplace_back(modes, 0);
        return out;
    }
    // combinations of occupied positions in lexicographic order
    std::vector<int> pos(photons);
    std::iota(pos.begin(), pos.end(), 0);
    for (;;) {
        Pattern p(modes, 0);
        for (int i : pos) p[i] = 1;
        out.push_back(std::move(p));
        int i = photons - 1;
        while (i >= 0 && pos[i] == modes - photons + i) --i;
        if (i < 0) break;
        ++pos[i];
        for (int j = i + 1; j < photons; ++j) pos[j] = pos[j - 1] + 1;
    }
    return out;
}

namespace {

void fill_outcomes(int bin, int remaining, Pattern& current, std::vector<Pattern>& out) {
    const int modes = static_cast<int>(current.size());
    if (bin == modes - 1) {
        current[bin] = remaining;
        out.push_back(current);
        return;
    }
    for (int c = remaining; c >= 0; --c) {
        current[bin] = c;
        fill_outcomes(bin + 1, remaining - c, current, out);
    }
}

}  // namespace

std::vector<Pattern> full_outcomes(int modes, int photons) {
    if (modes <= 0 || photons < 0) {
        throw std::invalid_argument("full_outcomes: need m >= 1 and n >= 0");
    }
    std::vector<Pattern> out;
    out.reserve(binomial(modes + photons - 1, photons));
    Pattern current(modes, 0);
    fill_outcomes(0, photons, current, out);
    return out;
}

}  // namespace loopsim
