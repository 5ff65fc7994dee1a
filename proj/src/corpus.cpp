#include "typevec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "typevec/errors.hpp"
#include "typevec/hash.hpp"
#include "typevec/rng.hpp"

namespace typevec {

using nlohmann::json;

void TypeVocabulary::rebuild() {
    index.clear();
    index.reserve(types.size());
    std::uint64_t h = kFnvOffset;
    for (std::size_t i = 0; i < types.size(); ++i) {
        index.emplace(types[i], i);
        h = fnv1a64(types[i], h);
        h = fnv1a64("\0", 1, h);
        h = fnv1a64_u64(static_cast<std::uint64_t>(counts[i]), h);
    }
    id = h;
}

std::size_t GoldTypeVector::popcount() const {
    std::size_t n = 0;
    for (auto b : indicator) n += b != 0;
    return n;
}

namespace {

// Trims context to at most `window` tokens on each side of the mention's
// first occurrence; falls back to the first 2*window tokens.
std::vector<std::string> apply_window(const std::vector<std::string>& mention,
                                      const std::vector<std::string>& context,
                                      std::size_t window) {
    std::size_t pos = context.size();
    if (!mention.empty() && mention.size() <= context.size()) {
        for (std::size_t i = 0; i + mention.size() <= context.size(); ++i) {
            bool hit = true;
            for (std::size_t k = 0; k < mention.size(); ++k) {
                if (context[i + k] != mention[k]) {
                    hit = false;
                    break;
                }
            }
            if (hit) {
                pos = i;
                break;
            }
        }
    }
    std::size_t lo = 0, hi = context.size();
    if (pos < context.size()) {
        lo = pos > window ? pos - window : 0;
        hi = std::min(context.size(), pos + mention.size() + window);
    } else {
        hi = std::min(context.size(), 2 * window);
    }
    return {context.begin() + static_cast<std::ptrdiff_t>(lo),
            context.begin() + static_cast<std::ptrdiff_t>(hi)};
}

const json& require_field(const json& record, const char* name,
                          const std::string& path, std::size_t line) {
    auto it = record.find(name);
    if (it == record.end()) {
        throw data_error(path + ":" + std::to_string(line) + ": missing field '" +
                         name + "'");
    }
    return *it;
}

}  // namespace

std::vector<TypingExample> load_typing_dataset(const std::string& path,
                                               std::optional<std::size_t> limit,
                                               std::size_t window) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open typing dataset: " + path);

    std::vector<TypingExample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (limit && out.size() >= *limit) break;
        if (line.empty()) continue;

        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": malformed JSON: " + e.what());
        }
        if (!record.is_object()) {
            throw data_error(path + ":" + std::to_string(lineno) + ": not an object");
        }

        const json& jmention = require_field(record, "mention", path, lineno);
        const json& jcontext = require_field(record, "context", path, lineno);
        const json& jtypes = require_field(record, "types", path, lineno);
        if (!jmention.is_string())
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": field 'mention' must be a string");
        if (!jcontext.is_string())
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": field 'context' must be a string");
        if (!jtypes.is_array())
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": field 'types' must be an array of strings");

        TypingExample ex;
        ex.mention = tokenize(jmention.get<std::string>());
        ex.context = tokenize(jcontext.get<std::string>());
        if (ex.mention.empty()) {
            throw data_error(path + ":" + std::to_string(lineno) + ": empty mention");
        }

        std::unordered_set<std::string> seen;
        for (const auto& jt : jtypes) {
            if (!jt.is_string())
                throw data_error(path + ":" + std::to_string(lineno) +
                                 ": field 'types' must be an array of strings");
            auto name = jt.get<std::string>();
            if (seen.insert(name).second) ex.gold_types.push_back(std::move(name));
        }

        if (window > 0) ex.context = apply_window(ex.mention, ex.context, window);
        out.push_back(std::move(ex));
    }
    return out;
}

TypeVocabulary build_type_vocabulary(const std::vector<TypingExample>& examples,
                                     std::size_t max_types) {
    if (examples.empty()) throw data_error("cannot build vocabulary from zero examples");
    if (max_types == 0) throw data_error("max_types must be at least 1");

    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& ex : examples) {
        for (const auto& t : ex.gold_types) ++counts[t];
    }

    std::vector<std::pair<std::string, std::int64_t>> entries(counts.begin(), counts.end());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (entries.size() > max_types) entries.resize(max_types);

    TypeVocabulary vocab;
    vocab.types.reserve(entries.size());
    vocab.counts.reserve(entries.size());
    for (auto& [name, count] : entries) {
        vocab.types.push_back(std::move(name));
        vocab.counts.push_back(count);
    }
    vocab.rebuild();
    return vocab;
}

GoldTypeVector encode_gold_types(const TypingExample& example,
                                 const TypeVocabulary& vocab, CoverageStats* stats) {
    GoldTypeVector gold;
    gold.indicator.assign(vocab.size(), 0);
    for (const auto& name : example.gold_types) {
        if (stats) ++stats->gold_total;
        if (auto pos = vocab.find(name)) {
            gold.indicator[*pos] = 1;
            if (stats) ++stats->gold_in_vocab;
        }
    }
    return gold;
}

DatasetSplit split_dataset(const std::vector<TypingExample>& examples,
                           double dev_fraction, std::uint64_t seed) {
    if (examples.size() < 2) throw data_error("split needs at least 2 examples");
    if (!(dev_fraction > 0.0 && dev_fraction < 1.0))
        throw data_error("dev_fraction must be in (0, 1)");

    const std::size_t n = examples.size();
    auto want = static_cast<std::size_t>(
        std::llround(dev_fraction * static_cast<double>(n)));
    const std::size_t dev_count = std::clamp<std::size_t>(want, 1, n - 1);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::uint8_t> is_dev(n, 0);
    for (std::size_t i = 0; i < dev_count; ++i) is_dev[order[i]] = 1;

    DatasetSplit split;
    split.train.reserve(n - dev_count);
    split.dev.reserve(dev_count);
    for (std::size_t i = 0; i < n; ++i) {
        (is_dev[i] ? split.dev : split.train).push_back(examples[i]);
    }
    return split;
}

TrainableFilter filter_trainable(const std::vector<TypingExample>& examples,
                                 const TypeVocabulary& vocab) {
    TrainableFilter result;
    for (const auto& ex : examples) {
        bool any = false;
        for (const auto& t : ex.gold_types) {
            if (vocab.find(t)) {
                any = true;
                break;
            }
        }
        if (any) {
            result.kept.push_back(ex);
        } else {
            ++result.dropped;
        }
    }
    return result;
}

void save_vocabulary(const TypeVocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write vocabulary file: " + path);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        json row = {{"type", vocab.types[i]}, {"count", vocab.counts[i]}};
        out << row.dump() << '\n';
    }
    if (!out) throw data_error("failed writing vocabulary file: " + path);
}

TypeVocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open vocabulary file: " + path);
    TypeVocabulary vocab;
    std::string line;
    std::size_t lineno = 0;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": malformed JSON: " + e.what());
        }
        const json& jtype = require_field(row, "type", path, lineno);
        const json& jcount = require_field(row, "count", path, lineno);
        if (!jtype.is_string() || !jcount.is_number_integer())
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": expected {\"type\": string, \"count\": int}");
        auto name = jtype.get<std::string>();
        if (!seen.insert(name).second)
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": duplicate type '" + name + "'");
        auto count = jcount.get<std::int64_t>();
        if (count < 1)
            throw data_error(path + ":" + std::to_string(lineno) + ": count must be >= 1");
        vocab.types.push_back(std::move(name));
        vocab.counts.push_back(count);
    }
    vocab.rebuild();
    return vocab;
}

}  // namespace typevec
