#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace loopsim {

// Photon occupation numbers per time-bin mode, index 0 = first bin.
using Pattern = std::vector<int>;

int pattern_total(const Pattern& pattern);
bool is_collision_free(const Pattern& pattern);

// Digit string, one character per mode ("0101..."). Occupations above 9
// never occur for the photon numbers handled here.
std::string pattern_string(const Pattern& pattern);
Pattern pattern_from_string(const std::string& text);

// Pattern with single photons at the given 1-indexed bins.
Pattern pattern_from_bins(int modes, const std::vector<int>& bins);
std::vector<int> occupied_bins(const Pattern& pattern);

// All C(m, n) single-occupancy patterns of n photons in m modes, ordered
// with photons packed into the lowest bins first: (1,1,0,0), (1,0,1,0), ...
std::vector<Pattern> collision_free_outcomes(int modes, int photons);

// All occupation patterns of n photons in m modes, same ordering rule:
// (n,0,...,0) first, (0,...,0,n) last.
std::vector<Pattern> full_outcomes(int modes, int photons);

uint64_t binomial(int n, int k);

}  // namespace loopsim
