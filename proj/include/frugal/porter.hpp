#pragma once

#include <string>
#include <string_view>

namespace frugal {

// Porter suffix-stripping stemmer (the five-step 1980 procedure, following the
// author's reference implementation, including its published bli/logi
// revisions). Input is expected lowercase alphabetic; words of length <= 2 are
// returned unchanged.
std::string porter_stem(std::string_view token);

}  // namespace frugal
