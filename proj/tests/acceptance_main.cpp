#include <cstdlib>
#include <iostream>

#include "giantatom/acceptance.hpp"

int main()
{
    using namespace giantatom::acceptance;
    const auto results = run(Options{}, [](const CriterionResult& r) { std::cout << format_line(r) << std::endl; });
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
