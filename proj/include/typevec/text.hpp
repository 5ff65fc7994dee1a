#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace typevec {

// Shared tokenizer: lowercase, split on whitespace and punctuation boundaries.
// ASCII letters and digits accumulate into word tokens; each punctuation
// character becomes its own single-char token; whitespace only separates.
// Bytes >= 0x80 are kept inside word tokens so UTF-8 sequences stay intact.
// Datasets, the typing model, and the rule engine must all agree on this.
std::vector<std::string> tokenize(std::string_view text);

// True iff `phrase` occurs as a contiguous subsequence of `tokens`.
// Both sides are expected to be outputs of tokenize(), so matching is
// effectively case-insensitive.
bool contains_phrase(std::span<const std::string> tokens,
                     std::span<const std::string> phrase);

// Joins tokens with single spaces (display / report helper).
std::string join_tokens(std::span<const std::string> tokens);

}  // namespace typevec
