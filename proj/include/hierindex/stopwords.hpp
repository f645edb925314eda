#pragma once

#include <filesystem>
#include <set>
#include <string>

namespace hierindex {

using StopwordSet = std::set<std::string, std::less<>>;

/// Built-in English stopword list.
const StopwordSet& default_stopwords();

/// One word per line; blank lines and lines starting with '#' are ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);

}  // namespace hierindex
