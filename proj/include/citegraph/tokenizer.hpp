#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace citegraph {

/// Splits text into maximal runs of ASCII letters and digits. Bytes >= 0x80
/// are treated as word characters so UTF-8 words are not torn apart.
/// No stemming, no stopwords.
struct Tokenizer {
    bool lowercase = true;

    [[nodiscard]] std::vector<std::string> tokenize(std::string_view text) const;

    /// Sorted, deduplicated tokens.
    [[nodiscard]] std::vector<std::string> unique_terms(std::string_view text) const;

    bool operator==(const Tokenizer&) const = default;
};

}  // namespace citegraph
