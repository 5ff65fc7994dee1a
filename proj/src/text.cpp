#include "typevec/text.hpp"

#include <cctype>

namespace typevec {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            out.push_back(word);
            word.clear();
        }
    };
    for (char ch : text) {
        const auto uc = static_cast<unsigned char>(ch);
        if (uc >= 0x80) {
            word.push_back(ch);
        } else if (std::isalnum(uc)) {
            word.push_back(static_cast<char>(std::tolower(uc)));
        } else if (std::isspace(uc)) {
            flush();
        } else {
            // Punctuation: its own token.
            flush();
            out.emplace_back(1, ch);
        }
    }
    flush();
    return out;
}

bool contains_phrase(std::span<const std::string> tokens,
                     std::span<const std::string> phrase) {
    if (phrase.empty()) return true;
    if (phrase.size() > tokens.size()) return false;
    for (std::size_t start = 0; start + phrase.size() <= tokens.size(); ++start) {
        bool hit = true;
        for (std::size_t k = 0; k < phrase.size(); ++k) {
            if (tokens[start + k] != phrase[k]) {
                hit = false;
                break;
            }
        }
        if (hit) return true;
    }
    return false;
}

std::string join_tokens(std::span<const std::string> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

}  // namespace typevec
