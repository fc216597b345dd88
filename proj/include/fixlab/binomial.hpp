#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "fixlab/error.hpp"

namespace fixlab {

inline constexpr int kMaxBinomialN = 64;

/// Exact C(n, r) for 0 <= n <= 64; zero when r < 0 or r > n.
inline std::int64_t binomial(int n, int r) {
    if (n < 0 || n > kMaxBinomialN)
        throw DomainError("binomial coefficients are exact only for 0 <= n <= 64, got " + std::to_string(n));
    if (r < 0 || r > n)
        return 0;
    static const auto table = [] {
        std::array<std::array<std::int64_t, kMaxBinomialN + 1>, kMaxBinomialN + 1> t{};
        for (int i = 0; i <= kMaxBinomialN; ++i) {
            t[i][0] = t[i][i] = 1;
            for (int j = 1; j < i; ++j)
                t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
        }
        return t;
    }();
    return table[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)];
}

} // namespace fixlab
