#pragma once

#include <string>
#include <string_view>

namespace hierindex {

/// Porter (1980) suffix stripper, following the reference C implementation
/// (including its "bli" and "logi" step-2 rules). Input must be lowercase
/// ASCII letters; words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace hierindex
