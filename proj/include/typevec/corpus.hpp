#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "typevec/text.hpp"

namespace typevec {

// One labeled typing record: mention span m, context s, gold type names.
struct TypingExample {
    std::vector<std::string> mention;
    std::vector<std::string> context;
    std::vector<std::string> gold_types;  // deduplicated, file order
};

// Ordered type inventory. Ordering is descending count with lexicographic
// tie-break, so rebuilding from the same examples is byte-identical.
struct TypeVocabulary {
    std::vector<std::string> types;
    std::vector<std::int64_t> counts;
    std::unordered_map<std::string, std::size_t> index;
    std::uint64_t id = 0;  // content hash; kernels use it to detect mismatched vectors

    std::size_t size() const { return types.size(); }

    // Position of `name`, or nullopt when out of vocabulary.
    std::optional<std::size_t> find(const std::string& name) const {
        auto it = index.find(name);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }

    // Recomputes index and content hash from types/counts.
    void rebuild();
};

// Indicator over a vocabulary: bit j set iff vocab.types[j] is a gold type.
struct GoldTypeVector {
    std::vector<std::uint8_t> indicator;

    std::size_t size() const { return indicator.size(); }
    std::size_t popcount() const;
};

// Gold-label coverage bookkeeping accumulated by encode_gold_types.
struct CoverageStats {
    std::size_t gold_total = 0;     // gold type tokens seen
    std::size_t gold_in_vocab = 0;  // of those, in vocabulary

    double coverage() const {
        return gold_total == 0 ? 1.0 : static_cast<double>(gold_in_vocab) /
                                           static_cast<double>(gold_total);
    }
};

// Reads JSON Lines records {"mention","context","types"}. Records with
// missing or ill-typed fields raise data_error naming the line. `limit`
// keeps the first N records. `window`, when nonzero, trims the context to at
// most `window` tokens on either side of the mention's first occurrence
// (description-style ingestion); contexts without the mention are truncated
// to the first 2*window tokens.
std::vector<TypingExample> load_typing_dataset(
    const std::string& path,
    std::optional<std::size_t> limit = std::nullopt,
    std::size_t window = 0);

// The max_types most frequent type names across all examples.
TypeVocabulary build_type_vocabulary(const std::vector<TypingExample>& examples,
                                     std::size_t max_types);

// Bit j set iff vocab.types[j] is in example.gold_types. Out-of-vocabulary
// gold types are dropped; `stats`, when given, tracks how many survived.
GoldTypeVector encode_gold_types(const TypingExample& example,
                                 const TypeVocabulary& vocab,
                                 CoverageStats* stats = nullptr);

struct DatasetSplit {
    std::vector<TypingExample> train;
    std::vector<TypingExample> dev;
};

// Deterministic disjoint exhaustive split; dev gets round(dev_fraction * n)
// examples (at least 1, at most n-1), chosen by seeded shuffle. Original
// file order is preserved within each side.
DatasetSplit split_dataset(const std::vector<TypingExample>& examples,
                           double dev_fraction, std::uint64_t seed);

// Drops examples whose gold set is empty after vocabulary projection.
// Training uses the filtered list; evaluation keeps everything.
struct TrainableFilter {
    std::vector<TypingExample> kept;
    std::size_t dropped = 0;
};
TrainableFilter filter_trainable(const std::vector<TypingExample>& examples,
                                 const TypeVocabulary& vocab);

// Vocabulary file: JSON Lines {"type","count"} in vocabulary order.
void save_vocabulary(const TypeVocabulary& vocab, const std::string& path);
TypeVocabulary load_vocabulary(const std::string& path);

}  // namespace typevec
