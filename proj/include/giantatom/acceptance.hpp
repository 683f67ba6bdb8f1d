// acceptance.hpp: End-to-end regression gate: criteria 1 to 10 with pinned tolerances

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace giantatom::acceptance {

struct CriterionResult {
    int id{0};
    std::string title;
    bool passed{false};
    std::string detail;   // measured values next to their targets
    double seconds{0.0};
};

struct Options {
    int optimizer_restarts{20};
    std::uint64_t seed{20240101};
    std::vector<int> only; // empty runs every criterion
};

inline constexpr int kCriterionCount = 10;

std::string title(int id);

// Runs the selected criteria in order. The callback sees each result as soon as it is known.
std::vector<CriterionResult> run(const Options& options,
                                 const std::function<void(const CriterionResult&)>& on_result = {});

// One line per criterion: "[PASS] 3  sweep minima  (12.1 s)  measured ...".
std::string format_line(const CriterionResult& result);

} // namespace giantatom::acceptance
