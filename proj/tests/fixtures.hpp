#pragma once

// Small hand-checked graphs shared by the tests and the acceptance runner.

#include <string_view>

namespace fixtures {

// Two wefts over two warps in plain weave: four crossings, eight terminals.
inline constexpr std::string_view kH1 =
    "TG1 4\n"
    "-1 10 -1 4\n"
    "3 -1 -1 12\n"
    "-1 14 1 -1\n"
    "7 -1 9 -1\n";

// Four crossings where one weft turns back into the fabric.
inline constexpr std::string_view kH2 =
    "TG1 4\n"
    "10 4 6 12\n"
    "1 14 2 8\n"
    "7 -1 0 -1\n"
    "3 -1 5 -1\n";

}  // namespace fixtures
