#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "typevec/corpus.hpp"
#include "typevec/matrix.hpp"

namespace typevec {

// Structural marker ids. Word tokens hash into [0, hash_buckets), so these
// sentinels can never collide with a real token.
inline constexpr std::uint32_t kClsId = 0xfffffffeu;
inline constexpr std::uint32_t kSepId = 0xffffffffu;

// Token-id sequence laid out as [CLS] mention [SEP] context [SEP].
struct EncodedInput {
    std::vector<std::uint32_t> ids;
    std::size_t mention_len = 0;
    std::size_t context_len = 0;
};

// d-dimensional mention+context representation.
using HiddenVector = std::vector<double>;

// The interpretable representation: per-type posterior probabilities.
// vocab_id ties the vector to the vocabulary whose positions it indexes.
struct TypeVector {
    std::vector<double> probs;
    std::uint64_t vocab_id = 0;

    std::size_t size() const { return probs.size(); }
};

struct TyperHyperparams {
    std::size_t dim = 64;
    std::uint32_t hash_buckets = 65536;
    std::uint64_t seed = 0;
};

// Bag-of-tokens encoder plus type-embedding output layer:
//   h = tanh(A [avg(mention emb); avg(context emb)] + b)
//   t = sigmoid(E h)
struct TyperModel {
    TypeVocabulary vocab;
    TyperHyperparams hp;
    Matrix token_emb;               // hash_buckets x d
    Matrix proj;                    // d x 2d        (A)
    std::vector<double> proj_bias;  // d             (b)
    Matrix type_emb;                // |T| x d       (E)

    // Parameters uniform in [-0.05, 0.05] from the seeded generator; bias zero.
    static TyperModel init(TypeVocabulary vocab, std::size_t dim,
                           std::uint32_t hash_buckets, std::uint64_t seed);
};

struct TrainConfig {
    double encoder_lr = 0.5;      // token_emb, A, b
    double type_matrix_lr = 1.0;  // E
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;
    double metric_threshold = 0.5;  // dev macro F1 decision threshold
};

struct EpochLog {
    std::size_t epoch = 0;       // 1-based
    double train_loss = 0.0;     // mean per-example summed BCE
    bool has_dev = false;
    double dev_precision = 0.0;
    double dev_recall = 0.0;
    double dev_f1 = 0.0;
    std::size_t dropped_train = 0;  // examples with no in-vocabulary gold type
};
using TrainLogger = std::function<void(const EpochLog&)>;

// Hashes tokens into [0, hash_buckets) and lays out the marker structure.
EncodedInput featurize(std::span<const std::string> mention,
                       std::span<const std::string> context,
                       std::uint32_t hash_buckets);

HiddenVector encode(const TyperModel& model, const EncodedInput& input);

// probabilities[j] = sigmoid(E[j] . h)
TypeVector type_probabilities(const TyperModel& model, const HiddenVector& h);

// Sum over types of -[g ln p + (1-g) ln(1-p)], probabilities clamped to
// [1e-12, 1 - 1e-12] before the logs.
double bce_loss(const TypeVector& pred, const GoldTypeVector& gold);
inline constexpr double kBceClamp = 1e-12;

struct TrainItem {
    EncodedInput input;
    GoldTypeVector gold;
};

// Mirrors the parameter shapes of TyperModel.
struct Gradients {
    Matrix token_emb;
    Matrix proj;
    std::vector<double> proj_bias;
    Matrix type_emb;

    static Gradients zeros_like(const TyperModel& model);
    void reset();
};

// Analytic gradients of the total (summed over examples and types) BCE over
// the batch with respect to every parameter. Overwrites `out`.
void loss_gradients(const TyperModel& model, std::span<const TrainItem> batch,
                    Gradients& out);
Gradients loss_gradients(const TyperModel& model, std::span<const TrainItem> batch);

// Minibatch SGD on the summed BCE; each step applies the batch-mean gradient
// with the two-rate scheme (encoder_lr for encoder params, type_matrix_lr
// for E). Examples with no in-vocabulary gold type are dropped from training.
// Deterministic under config.seed. Throws numeric_error on divergence.
TyperModel train(TyperModel model, const std::vector<TypingExample>& train_examples,
                 const std::vector<TypingExample>& dev_examples,
                 const TrainConfig& config, const TrainLogger& logger = nullptr);

// featurize -> encode -> type_probabilities.
TypeVector embed_mention(const TyperModel& model,
                         std::span<const std::string> mention,
                         std::span<const std::string> context);

struct TypingMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Macro-averaged over examples. Per example the predicted set is
// {j : p_j > threshold}; P = |pred & gold| / |pred| (1 when pred is empty),
// R = |pred & gold| / |gold| (1 when gold is empty); F1 from the averages.
TypingMetrics typing_metrics(const std::vector<TypeVector>& preds,
                             const std::vector<GoldTypeVector>& golds,
                             double threshold);

// Binary container with magic bytes, format version, vocabulary block,
// hyperparameters, row-major matrices, and a trailing FNV-1a checksum.
// Round-trips bit-exactly.
void save_checkpoint(const TyperModel& model, const std::string& path);
TyperModel load_checkpoint(const std::string& path);

// --- externally produced vectors -----------------------------------------

enum class VectorKind { type_probs, hidden };

struct StoredVector {
    VectorKind kind = VectorKind::type_probs;
    std::vector<double> values;
};

// Expected shapes for imported vectors. A zero num_types or hidden_dim skips
// the corresponding length check.
struct VectorStoreSpec {
    std::size_t num_types = 0;
    std::size_t hidden_dim = 0;
    std::uint64_t vocab_id = 0;

    static VectorStoreSpec matching(const TyperModel& model) {
        return {model.vocab.size(), model.hp.dim, model.vocab.id};
    }
};

class VectorStore {
public:
    explicit VectorStore(VectorStoreSpec spec) : spec_(spec) {}

    void insert(const std::string& id, StoredVector vec);
    const StoredVector* get(const std::string& id) const;
    std::size_t size() const { return vectors_.size(); }
    const VectorStoreSpec& spec() const { return spec_; }

    // Wraps a stored "type_probs" record as a TypeVector over the declared
    // vocabulary. Throws data_error for missing ids or "hidden" records.
    TypeVector type_vector(const std::string& id) const;

private:
    VectorStoreSpec spec_;
    std::unordered_map<std::string, StoredVector> vectors_;
};

// JSON Lines {"id","kind":"type_probs"|"hidden","values":[...]}. Probability
// records are validated into [0,1] (the offending component is named);
// hidden records must match the declared dimension.
VectorStore import_external_vectors(const std::string& path, VectorStoreSpec spec);

}  // namespace typevec
