#pragma once

// Small builders shared by the test files.

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cmforge/corpus.hpp"

namespace helpers {

inline std::vector<cmforge::ParallelPair> pairs(const std::vector<std::pair<std::string, std::string>>& lines,
                                                const char* src = "en", const char* tgt = "hi")
{
    std::string text;
    for (const auto& [s, t] : lines) text += s + "\t" + t + "\n";
    std::istringstream in(text);
    return cmforge::parse_parallel(in, cmforge::LanguageTag(src), cmforge::LanguageTag(tgt));
}

inline cmforge::ParallelPair pair(const std::string& s, const std::string& t, const char* src = "en",
                                  const char* tgt = "hi")
{
    return pairs({{s, t}}, src, tgt).front();
}

inline std::vector<cmforge::AnnotatedSentence> annotations(const std::string& conll, const char* lang = "en")
{
    std::istringstream in(conll);
    return cmforge::parse_annotations(in, cmforge::LanguageTag(lang));
}

inline std::vector<std::string> ws(const std::string& s) { return cmforge::detail::split_ws(s); }

}  // namespace helpers
