#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "typevec/corpus.hpp"
#include "typevec/sim.hpp"
#include "typevec/typer.hpp"

namespace typevec {

inline constexpr double kMaskSparsityEps = 1e-6;

struct MaskTrainConfig {
    double lambda_l1 = 0.01;
    double lr = 0.05;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    MaskMode scorer = MaskMode::dot;
};

// One binary similarity-supervision example.
struct BinaryPair {
    TypeVector left;
    TypeVector right;
    int label = 0;  // 0 or 1
};

// Positions kept out of a parent vocabulary after pruning.
struct ReducedVocabulary {
    std::vector<std::size_t> kept_indices;  // strictly increasing
    std::uint64_t parent_vocab_id = 0;
    std::size_t parent_size = 0;
    std::uint64_t id = 0;  // vocabulary id of projected vectors

    std::size_t size() const { return kept_indices.size(); }
    void rebuild_id();

    // old position -> new position, or nullopt when pruned away.
    std::optional<std::size_t> position_of(std::size_t old_index) const;
};

// NED example reduced to vectors, the shape pair construction needs.
struct NedPairSource {
    TypeVector mention_vec;
    std::vector<TypeVector> candidate_vecs;
    std::size_t gold_index = 0;
};

struct BinaryPairs {
    std::vector<BinaryPair> pairs;
    std::size_t skipped = 0;  // examples with a single candidate
};

// Per example: one positive pair (mention, gold candidate) and one negative
// pair with a seed-chosen random non-gold candidate.
BinaryPairs make_binary_ned_pairs(const std::vector<NedPairSource>& examples,
                                  std::uint64_t seed);

struct MaskTrainResult {
    DiagonalMask mask;
    double scale = 1.0;  // a in sigmoid(a * sim + b)
    double bias = 0.0;   // b
    double sparsity = 0.0;  // fraction of |w_j| < kMaskSparsityEps
    std::vector<double> objective_history;  // mean loss + L1 penalty per epoch
};

// Learns diag(W) plus scalar calibrators (a, b) by full-batch proximal
// gradient descent on mean logistic loss of sigmoid(a * sim_W(l, r) + b)
// with an L1 penalty on W. The L1 term uses soft-thresholding so weights
// reach exact zeros; the subgradient at w_j = 0 is 0. Cosine mode clips the
// weights to [0, 1] after every update. Mask starts at all-ones.
MaskTrainResult train_mask(const std::vector<BinaryPair>& pairs,
                           const MaskTrainConfig& config);

// Decision of the trained scorer: sigmoid(a * sim + b) > 0.5.
bool mask_predict(const BinaryPair& pair, const MaskTrainResult& trained);

// Keeps ceil(fraction * |T|) indices with the largest |w_j|; ties go to the
// lower original index.
ReducedVocabulary prune_top_fraction(const DiagonalMask& mask, double fraction,
                                     std::uint64_t parent_vocab_id = 0);

// Components at kept_indices, original order preserved.
TypeVector project_vector(const TypeVector& t, const ReducedVocabulary& reduced);

// Restriction of a mask to the kept indices in the parent space: kept
// weights unchanged, everything else zero.
DiagonalMask restrict_mask(const DiagonalMask& mask, const ReducedVocabulary& reduced);

// Mask file: JSON Lines header {mode, lambda, seed, ...} then one
// {"index","type","weight"} row per type.
struct MaskFileMeta {
    double lambda_l1 = 0.0;
    std::uint64_t seed = 0;
    double scale = 1.0;
    double bias = 0.0;
    double sparsity = 0.0;
};
void save_mask(const DiagonalMask& mask, const MaskFileMeta& meta,
               const TypeVocabulary* vocab, const std::string& path);
struct LoadedMask {
    DiagonalMask mask;
    MaskFileMeta meta;
};
LoadedMask load_mask(const std::string& path);

// Reduced vocabulary persisted as an index list (single JSON document).
void save_reduced(const ReducedVocabulary& reduced, const std::string& path);
ReducedVocabulary load_reduced(const std::string& path);

}  // namespace typevec
