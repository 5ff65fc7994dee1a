#include "typevec/rules.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "typevec/errors.hpp"
#include "typevec/text.hpp"

namespace typevec {

using nlohmann::json;

namespace {

std::vector<std::string> dedupe(const std::vector<std::string>& names) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& n : names) {
        if (seen.insert(n).second) out.push_back(n);
    }
    return out;
}

}  // namespace

RuleSet parse_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open rule file: " + path);

    RuleSet ruleset;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": malformed JSON: " + e.what());
        }
        if (!record.is_object())
            throw data_error(path + ":" + std::to_string(lineno) + ": not an object");

        Rule rule;
        if (record.contains("context_contains")) {
            if (!record["context_contains"].is_array())
                throw data_error(path + ":" + std::to_string(lineno) +
                                 ": context_contains must be an array of strings");
            for (const auto& jp : record["context_contains"]) {
                if (!jp.is_string())
                    throw data_error(path + ":" + std::to_string(lineno) +
                                     ": context_contains must be an array of strings");
                auto phrase = tokenize(jp.get<std::string>());
                if (phrase.empty())
                    throw data_error(path + ":" + std::to_string(lineno) +
                                     ": empty context phrase");
                rule.context_contains.push_back(std::move(phrase));
            }
        }
        if (record.contains("mention_equals") && !record["mention_equals"].is_null()) {
            if (!record["mention_equals"].is_string())
                throw data_error(path + ":" + std::to_string(lineno) +
                                 ": mention_equals must be a string or null");
            auto mention = tokenize(record["mention_equals"].get<std::string>());
            if (mention.empty())
                throw data_error(path + ":" + std::to_string(lineno) +
                                 ": mention_equals must contain at least one token");
            rule.mention_equals = std::move(mention);
        }
        if (rule.context_contains.empty() && !rule.mention_equals) {
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": rule has no condition");
        }

        auto read_names = [&](const char* field) {
            std::vector<std::string> names;
            if (!record.contains(field)) return names;
            if (!record[field].is_array())
                throw data_error(path + ":" + std::to_string(lineno) + ": " + field +
                                 " must be an array of strings");
            for (const auto& jn : record[field]) {
                if (!jn.is_string())
                    throw data_error(path + ":" + std::to_string(lineno) + ": " + field +
                                     " must be an array of strings");
                names.push_back(jn.get<std::string>());
            }
            return names;
        };
        rule.set_one = dedupe(read_names("set_one"));
        rule.set_zero = dedupe(read_names("set_zero"));
        if (rule.set_one.empty() && rule.set_zero.empty()) {
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": rule has no action");
        }
        std::unordered_set<std::string> ones(rule.set_one.begin(), rule.set_one.end());
        for (const auto& n : rule.set_zero) {
            if (ones.count(n)) {
                throw data_error(path + ":" + std::to_string(lineno) + ": type '" + n +
                                 "' appears in both set_one and set_zero");
            }
        }
        ruleset.rules.push_back(std::move(rule));
    }
    return ruleset;
}

bool rule_matches(const Rule& rule, std::span<const std::string> mention,
                  std::span<const std::string> context) {
    if (rule.mention_equals) {
        const auto& want = *rule.mention_equals;
        if (want.size() != mention.size()) return false;
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (want[i] != mention[i]) return false;
        }
    }
    for (const auto& phrase : rule.context_contains) {
        if (!contains_phrase(context, phrase)) return false;
    }
    return true;
}

CompiledRuleSet compile_rules(const RuleSet& ruleset, const TypeVocabulary& vocab) {
    CompiledRuleSet compiled;
    compiled.vocab_id = vocab.id;
    compiled.vocab_size = vocab.size();
    compiled.rules.reserve(ruleset.rules.size());
    for (std::size_t r = 0; r < ruleset.rules.size(); ++r) {
        const Rule& rule = ruleset.rules[r];
        CompiledRule c;
        c.rule = rule;
        auto resolve = [&](const std::vector<std::string>& names,
                           std::vector<std::size_t>& out) {
            for (const auto& name : names) {
                if (auto pos = vocab.find(name)) {
                    out.push_back(*pos);
                } else {
                    compiled.warnings.push_back("rule " + std::to_string(r + 1) +
                                                ": unknown type '" + name +
                                                "' (skipped)");
                }
            }
        };
        resolve(rule.set_one, c.one_indices);
        resolve(rule.set_zero, c.zero_indices);
        compiled.rules.push_back(std::move(c));
    }
    return compiled;
}

TypeVector apply_rules(const TypeVector& t, const CompiledRuleSet& ruleset,
                       std::span<const std::string> mention,
                       std::span<const std::string> context) {
    if (t.size() != ruleset.vocab_size || t.vocab_id != ruleset.vocab_id) {
        throw data_error("apply_rules: vector does not match the rule set's vocabulary");
    }
    TypeVector out = t;
    for (const auto& c : ruleset.rules) {
        if (!rule_matches(c.rule, mention, context)) continue;
        for (std::size_t idx : c.one_indices) out.probs[idx] = 1.0;
        for (std::size_t idx : c.zero_indices) out.probs[idx] = 0.0;
    }
    return out;
}

}  // namespace typevec
