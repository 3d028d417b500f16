#include "verbatim/kernels/levenshtein.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace verbatim::kernels {

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    if (b.size() > a.size()) std::swap(a, b);
    const std::size_t m = b.size();
    std::vector<std::uint32_t> row(m + 1);
    for (std::size_t j = 0; j <= m; ++j) row[j] = static_cast<std::uint32_t>(j);
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uint32_t diag = row[0];
        row[0] = static_cast<std::uint32_t>(i + 1);
        const char32_t ai = a[i];
        for (std::size_t j = 0; j < m; ++j) {
            const std::uint32_t up = row[j + 1];
            const std::uint32_t sub = diag + (ai != b[j]);
            row[j + 1] = std::min({up + 1, row[j] + 1, sub});
            diag = up;
        }
    }
    return row[m];
}

}  // namespace verbatim::kernels
