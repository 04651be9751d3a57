#include "citegraph/tokenizer.hpp"

#include <algorithm>

namespace citegraph {

namespace {

bool is_word_byte(unsigned char c)
{
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const
{
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        std::size_t start = i;
        while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        if (i > start) {
            std::string token(text.substr(start, i - start));
            if (lowercase) {
                for (auto& c : token) {
                    if (c >= 'A' && c <= 'Z') {
                        c = static_cast<char>(c - 'A' + 'a');
                    }
                }
            }
            tokens.push_back(std::move(token));
        }
    }
    return tokens;
}

std::vector<std::string> Tokenizer::unique_terms(std::string_view text) const
{
    auto tokens = tokenize(text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

}  // namespace citegraph
