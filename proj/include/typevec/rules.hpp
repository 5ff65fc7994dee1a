#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "typevec/corpus.hpp"
#include "typevec/typer.hpp"

namespace typevec {

// Declarative debugging rule: when the conditions match a (mention, context)
// pair, the named type probabilities are overwritten with 1 or 0.
struct Rule {
    std::vector<std::vector<std::string>> context_contains;  // tokenized phrases
    std::optional<std::vector<std::string>> mention_equals;  // tokenized mention
    std::vector<std::string> set_one;   // type names, deduplicated
    std::vector<std::string> set_zero;
};

struct RuleSet {
    std::vector<Rule> rules;  // file order

    std::size_t size() const { return rules.size(); }
};

// JSON Lines, one rule per line:
// {"context_contains":[...],"mention_equals":string|null,"set_one":[...],"set_zero":[...]}
// Rules must carry at least one condition and one action; a type listed in
// both action lists is a parse error.
RuleSet parse_rules(const std::string& path);

// True iff every context_contains phrase occurs as a contiguous token
// subsequence of `context` and mention_equals (when present) equals
// `mention` token-for-token. Tokenization is shared with the corpus module,
// which makes matching case-insensitive.
bool rule_matches(const Rule& rule, std::span<const std::string> mention,
                  std::span<const std::string> context);

// Rule with its action type names resolved to vocabulary positions.
// Unresolvable names become warnings and are skipped.
struct CompiledRule {
    Rule rule;
    std::vector<std::size_t> one_indices;
    std::vector<std::size_t> zero_indices;
};

struct CompiledRuleSet {
    std::vector<CompiledRule> rules;
    std::vector<std::string> warnings;
    std::uint64_t vocab_id = 0;
    std::size_t vocab_size = 0;

    std::size_t size() const { return rules.size(); }
};

CompiledRuleSet compile_rules(const RuleSet& ruleset, const TypeVocabulary& vocab);

// Applies every matching rule in order: probabilities at set_one positions
// become 1.0, at set_zero positions 0.0; everything else is bit-identical.
// The input vector is not mutated. Idempotent for fixed inputs.
TypeVector apply_rules(const TypeVector& t, const CompiledRuleSet& ruleset,
                       std::span<const std::string> mention,
                       std::span<const std::string> context);

}  // namespace typevec
