#include "typevec/typer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "typevec/errors.hpp"
#include "typevec/hash.hpp"
#include "typevec/rng.hpp"

namespace typevec {

using nlohmann::json;

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Mean embedding of a token-id range; zero vector when the range is empty.
// Ids are summed in sorted order so bag semantics hold bit-exactly under
// token permutation.
void average_embeddings(const Matrix& emb, const std::uint32_t* ids, std::size_t count,
                        double* out, std::size_t dim) {
    std::fill(out, out + dim, 0.0);
    if (count == 0) return;
    std::vector<std::uint32_t> sorted(ids, ids + count);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.back() >= emb.rows()) {
        throw data_error("token id exceeds the model's hash bucket count");
    }
    for (std::uint32_t id : sorted) {
        const double* row = emb.row(id);
        for (std::size_t k = 0; k < dim; ++k) out[k] += row[k];
    }
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t k = 0; k < dim; ++k) out[k] *= inv;
}

void check_input_layout(const EncodedInput& input) {
    const std::size_t expect = 3 + input.mention_len + input.context_len;
    if (input.ids.size() != expect || input.ids.empty() || input.ids[0] != kClsId ||
        input.ids[1 + input.mention_len] != kSepId || input.ids.back() != kSepId ||
        input.mention_len == 0) {
        throw data_error("encoded input violates [CLS] m [SEP] s [SEP] layout");
    }
}

struct ForwardCache {
    std::vector<double> concat;  // [avg mention; avg context], 2d
    HiddenVector hidden;         // d
    std::vector<double> probs;   // |T|
};

void forward_hidden(const TyperModel& model, const EncodedInput& input,
                    ForwardCache& cache) {
    check_input_layout(input);
    const std::size_t d = model.hp.dim;
    cache.concat.assign(2 * d, 0.0);
    const std::uint32_t* mention_ids = input.ids.data() + 1;
    const std::uint32_t* context_ids = input.ids.data() + 2 + input.mention_len;
    average_embeddings(model.token_emb, mention_ids, input.mention_len,
                       cache.concat.data(), d);
    average_embeddings(model.token_emb, context_ids, input.context_len,
                       cache.concat.data() + d, d);

    cache.hidden.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double u = model.proj_bias[i];
        const double* row = model.proj.row(i);
        for (std::size_t k = 0; k < 2 * d; ++k) u += row[k] * cache.concat[k];
        cache.hidden[i] = std::tanh(u);
    }
}

void forward(const TyperModel& model, const EncodedInput& input, ForwardCache& cache) {
    forward_hidden(model, input, cache);
    const std::size_t d = model.hp.dim;
    const std::size_t num_types = model.type_emb.rows();
    cache.probs.assign(num_types, 0.0);
    for (std::size_t j = 0; j < num_types; ++j) {
        const double* row = model.type_emb.row(j);
        double z = 0.0;
        for (std::size_t k = 0; k < d; ++k) z += row[k] * cache.hidden[k];
        cache.probs[j] = sigmoid(z);
    }
}

double bce_from_probs(const std::vector<double>& probs,
                      const std::vector<std::uint8_t>& gold) {
    double loss = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        const double p = std::clamp(probs[j], kBceClamp, 1.0 - kBceClamp);
        loss -= gold[j] ? std::log(p) : std::log1p(-p);
    }
    return loss;
}

// Accumulates gradients of the summed BCE for one example; returns its loss.
double backward(const TyperModel& model, const TrainItem& item,
                ForwardCache& cache, Gradients& grads) {
    forward(model, item.input, cache);
    const std::size_t d = model.hp.dim;
    const std::size_t num_types = model.type_emb.rows();
    if (item.gold.size() != num_types) {
        throw data_error("gold vector length does not match type inventory");
    }

    const double loss = bce_from_probs(cache.probs, item.gold.indicator);

    // d(loss)/d(logit_j) = p_j - g_j for sigmoid + BCE.
    std::vector<double> dhidden(d, 0.0);
    for (std::size_t j = 0; j < num_types; ++j) {
        const double dz = cache.probs[j] - static_cast<double>(item.gold.indicator[j]);
        double* grad_row = grads.type_emb.row(j);
        const double* emb_row = model.type_emb.row(j);
        for (std::size_t k = 0; k < d; ++k) {
            grad_row[k] += dz * cache.hidden[k];
            dhidden[k] += dz * emb_row[k];
        }
    }

    // Through tanh and the projection.
    std::vector<double> dconcat(2 * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        const double du = (1.0 - cache.hidden[i] * cache.hidden[i]) * dhidden[i];
        grads.proj_bias[i] += du;
        double* grad_row = grads.proj.row(i);
        const double* proj_row = model.proj.row(i);
        for (std::size_t k = 0; k < 2 * d; ++k) {
            grad_row[k] += du * cache.concat[k];
            dconcat[k] += du * proj_row[k];
        }
    }

    // Through the bag averages into the token embeddings.
    const std::uint32_t* mention_ids = item.input.ids.data() + 1;
    const double m_inv = 1.0 / static_cast<double>(item.input.mention_len);
    for (std::size_t i = 0; i < item.input.mention_len; ++i) {
        double* row = grads.token_emb.row(mention_ids[i]);
        for (std::size_t k = 0; k < d; ++k) row[k] += dconcat[k] * m_inv;
    }
    if (item.input.context_len > 0) {
        const std::uint32_t* context_ids = item.input.ids.data() + 2 + item.input.mention_len;
        const double s_inv = 1.0 / static_cast<double>(item.input.context_len);
        for (std::size_t i = 0; i < item.input.context_len; ++i) {
            double* row = grads.token_emb.row(context_ids[i]);
            for (std::size_t k = 0; k < d; ++k) row[k] += dconcat[k + d] * s_inv;
        }
    }
    return loss;
}

void axpy(std::vector<double>& target, const std::vector<double>& grad, double scale) {
    for (std::size_t i = 0; i < target.size(); ++i) target[i] -= scale * grad[i];
}

}  // namespace

TyperModel TyperModel::init(TypeVocabulary vocab, std::size_t dim,
                            std::uint32_t hash_buckets, std::uint64_t seed) {
    if (vocab.size() == 0) throw data_error("cannot build a model over an empty vocabulary");
    if (dim == 0) throw data_error("model dimension must be positive");
    if (hash_buckets == 0) throw data_error("hash bucket count must be positive");

    TyperModel model;
    model.vocab = std::move(vocab);
    model.hp = {dim, hash_buckets, seed};
    model.token_emb = Matrix(hash_buckets, dim);
    model.proj = Matrix(dim, 2 * dim);
    model.proj_bias.assign(dim, 0.0);
    model.type_emb = Matrix(model.vocab.size(), dim);

    Rng rng(seed);
    for (double& v : model.token_emb.data()) v = rng.uniform_real(-0.05, 0.05);
    for (double& v : model.proj.data()) v = rng.uniform_real(-0.05, 0.05);
    for (double& v : model.type_emb.data()) v = rng.uniform_real(-0.05, 0.05);
    return model;
}

EncodedInput featurize(std::span<const std::string> mention,
                       std::span<const std::string> context,
                       std::uint32_t hash_buckets) {
    if (mention.empty()) throw data_error("featurize: empty mention");
    if (hash_buckets == 0) throw data_error("featurize: hash bucket count must be positive");

    EncodedInput input;
    input.mention_len = mention.size();
    input.context_len = context.size();
    input.ids.reserve(3 + mention.size() + context.size());
    input.ids.push_back(kClsId);
    for (const auto& tok : mention) {
        input.ids.push_back(static_cast<std::uint32_t>(fnv1a64(tok) % hash_buckets));
    }
    input.ids.push_back(kSepId);
    for (const auto& tok : context) {
        input.ids.push_back(static_cast<std::uint32_t>(fnv1a64(tok) % hash_buckets));
    }
    input.ids.push_back(kSepId);
    return input;
}

HiddenVector encode(const TyperModel& model, const EncodedInput& input) {
    ForwardCache cache;
    forward_hidden(model, input, cache);
    return cache.hidden;
}

TypeVector type_probabilities(const TyperModel& model, const HiddenVector& h) {
    if (h.size() != model.hp.dim) {
        throw data_error("hidden vector dimension " + std::to_string(h.size()) +
                         " does not match model dimension " + std::to_string(model.hp.dim));
    }
    TypeVector t;
    t.vocab_id = model.vocab.id;
    t.probs.resize(model.vocab.size());
    for (std::size_t j = 0; j < model.vocab.size(); ++j) {
        const double* row = model.type_emb.row(j);
        double z = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) z += row[k] * h[k];
        t.probs[j] = sigmoid(z);
    }
    return t;
}

double bce_loss(const TypeVector& pred, const GoldTypeVector& gold) {
    if (pred.size() != gold.size()) {
        throw data_error("bce_loss: prediction length " + std::to_string(pred.size()) +
                         " != gold length " + std::to_string(gold.size()));
    }
    return bce_from_probs(pred.probs, gold.indicator);
}

Gradients Gradients::zeros_like(const TyperModel& model) {
    Gradients g;
    g.token_emb = Matrix(model.token_emb.rows(), model.token_emb.cols());
    g.proj = Matrix(model.proj.rows(), model.proj.cols());
    g.proj_bias.assign(model.proj_bias.size(), 0.0);
    g.type_emb = Matrix(model.type_emb.rows(), model.type_emb.cols());
    return g;
}

void Gradients::reset() {
    token_emb.fill(0.0);
    proj.fill(0.0);
    std::fill(proj_bias.begin(), proj_bias.end(), 0.0);
    type_emb.fill(0.0);
}

void loss_gradients(const TyperModel& model, std::span<const TrainItem> batch,
                    Gradients& out) {
    if (batch.empty()) throw data_error("loss_gradients: empty batch");
    out.reset();
    ForwardCache cache;
    for (const auto& item : batch) backward(model, item, cache, out);
}

Gradients loss_gradients(const TyperModel& model, std::span<const TrainItem> batch) {
    Gradients g = Gradients::zeros_like(model);
    loss_gradients(model, batch, g);
    return g;
}

TyperModel train(TyperModel model, const std::vector<TypingExample>& train_examples,
                 const std::vector<TypingExample>& dev_examples,
                 const TrainConfig& config, const TrainLogger& logger) {
    if (train_examples.empty()) throw data_error("train: empty training set");
    if (!(config.encoder_lr > 0.0) || !(config.type_matrix_lr > 0.0))
        throw data_error("train: learning rates must be positive");
    if (config.batch_size == 0) throw data_error("train: batch_size must be at least 1");

    TrainableFilter filtered = filter_trainable(train_examples, model.vocab);
    if (filtered.kept.empty())
        throw data_error("train: no training example has an in-vocabulary gold type");

    std::vector<TrainItem> items;
    items.reserve(filtered.kept.size());
    for (const auto& ex : filtered.kept) {
        items.push_back({featurize(ex.mention, ex.context, model.hp.hash_buckets),
                         encode_gold_types(ex, model.vocab)});
    }

    std::vector<EncodedInput> dev_inputs;
    std::vector<GoldTypeVector> dev_golds;
    dev_inputs.reserve(dev_examples.size());
    dev_golds.reserve(dev_examples.size());
    for (const auto& ex : dev_examples) {
        dev_inputs.push_back(featurize(ex.mention, ex.context, model.hp.hash_buckets));
        dev_golds.push_back(encode_gold_types(ex, model.vocab));
    }

    Rng rng(config.seed);
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    Gradients grads = Gradients::zeros_like(model);
    ForwardCache cache;
    std::vector<TrainItem> batch;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            grads.reset();
            double batch_loss = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                batch_loss += backward(model, items[order[i]], cache, grads);
            }
            if (!std::isfinite(batch_loss)) {
                throw numeric_error("training diverged: non-finite loss at epoch " +
                                    std::to_string(epoch) + ", batch offset " +
                                    std::to_string(start));
            }
            epoch_loss += batch_loss;

            const double n = static_cast<double>(stop - start);
            axpy(model.token_emb.data(), grads.token_emb.data(), config.encoder_lr / n);
            axpy(model.proj.data(), grads.proj.data(), config.encoder_lr / n);
            axpy(model.proj_bias, grads.proj_bias, config.encoder_lr / n);
            axpy(model.type_emb.data(), grads.type_emb.data(), config.type_matrix_lr / n);
        }

        EpochLog log;
        log.epoch = epoch;
        log.train_loss = epoch_loss / static_cast<double>(items.size());
        log.dropped_train = filtered.dropped;
        if (!dev_inputs.empty()) {
            std::vector<TypeVector> preds;
            preds.reserve(dev_inputs.size());
            for (const auto& input : dev_inputs) {
                forward(model, input, cache);
                TypeVector t;
                t.vocab_id = model.vocab.id;
                t.probs = cache.probs;
                preds.push_back(std::move(t));
            }
            TypingMetrics m = typing_metrics(preds, dev_golds, config.metric_threshold);
            log.has_dev = true;
            log.dev_precision = m.precision;
            log.dev_recall = m.recall;
            log.dev_f1 = m.f1;
        }
        if (logger) logger(log);
    }
    return model;
}

TypeVector embed_mention(const TyperModel& model,
                         std::span<const std::string> mention,
                         std::span<const std::string> context) {
    EncodedInput input = featurize(mention, context, model.hp.hash_buckets);
    return type_probabilities(model, encode(model, input));
}

TypingMetrics typing_metrics(const std::vector<TypeVector>& preds,
                             const std::vector<GoldTypeVector>& golds,
                             double threshold) {
    if (preds.empty()) throw data_error("typing_metrics: empty input");
    if (preds.size() != golds.size())
        throw data_error("typing_metrics: prediction/gold count mismatch");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw data_error("typing_metrics: threshold must be in (0, 1)");

    double sum_p = 0.0, sum_r = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto& pred = preds[i];
        const auto& gold = golds[i];
        if (pred.size() != gold.size())
            throw data_error("typing_metrics: length mismatch at example " +
                             std::to_string(i));
        std::size_t predicted = 0, overlap = 0, gold_count = 0;
        for (std::size_t j = 0; j < pred.size(); ++j) {
            const bool hit = pred.probs[j] > threshold;
            predicted += hit;
            gold_count += gold.indicator[j] != 0;
            overlap += (hit && gold.indicator[j] != 0);
        }
        sum_p += predicted == 0
                     ? 1.0
                     : static_cast<double>(overlap) / static_cast<double>(predicted);
        sum_r += gold_count == 0
                     ? 1.0
                     : static_cast<double>(overlap) / static_cast<double>(gold_count);
    }

    TypingMetrics m;
    const double n = static_cast<double>(preds.size());
    m.precision = sum_p / n;
    m.recall = sum_r / n;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

// --- checkpoint container --------------------------------------------------

namespace {

constexpr char kMagic[4] = {'T', 'V', 'C', 'K'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(buf, bits);
}

void put_matrix(std::string& buf, const Matrix& m) {
    put_u64(buf, m.rows());
    put_u64(buf, m.cols());
    for (double v : m.data()) put_f64(buf, v);
}

class Reader {
public:
    Reader(const std::string& buf, std::size_t end) : buf_(buf), end_(end) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(
                     static_cast<unsigned char>(buf_[pos_ + static_cast<std::size_t>(i)]))
                 << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(
                     static_cast<unsigned char>(buf_[pos_ + static_cast<std::size_t>(i)]))
                 << (8 * i);
        pos_ += 8;
        return v;
    }

    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::string bytes(std::size_t n) {
        need(n);
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    Matrix matrix() {
        const auto rows = static_cast<std::size_t>(u64());
        const auto cols = static_cast<std::size_t>(u64());
        if (rows != 0 && cols != 0 && rows > (end_ - pos_) / (8 * cols)) {
            throw data_error("checkpoint corrupted (matrix size exceeds file)");
        }
        Matrix m(rows, cols);
        for (double& v : m.data()) v = f64();
        return m;
    }

    std::size_t remaining() const { return end_ - pos_; }

private:
    void need(std::size_t n) {
        if (end_ - pos_ < n) throw data_error("checkpoint corrupted (truncated body)");
    }
    const std::string& buf_;
    std::size_t end_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const TyperModel& model, const std::string& path) {
    std::string buf;
    buf.append(kMagic, 4);
    put_u32(buf, kFormatVersion);

    put_u64(buf, model.vocab.size());
    for (std::size_t i = 0; i < model.vocab.size(); ++i) {
        put_u32(buf, static_cast<std::uint32_t>(model.vocab.types[i].size()));
        buf += model.vocab.types[i];
        put_u64(buf, static_cast<std::uint64_t>(model.vocab.counts[i]));
    }

    put_u32(buf, static_cast<std::uint32_t>(model.hp.dim));
    put_u32(buf, model.hp.hash_buckets);
    put_u64(buf, model.hp.seed);

    put_matrix(buf, model.token_emb);
    put_matrix(buf, model.proj);
    put_u64(buf, model.proj_bias.size());
    for (double v : model.proj_bias) put_f64(buf, v);
    put_matrix(buf, model.type_emb);

    put_u64(buf, fnv1a64(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write checkpoint: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw data_error("failed writing checkpoint: " + path);
}

TyperModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open checkpoint: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();

    if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw data_error("not a checkpoint file: " + path);

    const std::size_t body = buf.size() - 8;
    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i)
        stored |= static_cast<std::uint64_t>(
                      static_cast<unsigned char>(buf[body + static_cast<std::size_t>(i)]))
                  << (8 * i);
    if (fnv1a64(buf.data(), body) != stored)
        throw data_error("checkpoint corrupted (checksum mismatch): " + path);

    Reader r(buf, body);
    r.bytes(4);  // magic, already verified
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion)
        throw data_error("unsupported checkpoint version " + std::to_string(version));

    TyperModel model;
    const auto vocab_count = static_cast<std::size_t>(r.u64());
    model.vocab.types.reserve(vocab_count);
    model.vocab.counts.reserve(vocab_count);
    for (std::size_t i = 0; i < vocab_count; ++i) {
        const auto len = r.u32();
        model.vocab.types.push_back(r.bytes(len));
        model.vocab.counts.push_back(static_cast<std::int64_t>(r.u64()));
    }
    model.vocab.rebuild();

    model.hp.dim = r.u32();
    model.hp.hash_buckets = r.u32();
    model.hp.seed = r.u64();

    model.token_emb = r.matrix();
    model.proj = r.matrix();
    const auto bias_len = static_cast<std::size_t>(r.u64());
    model.proj_bias.resize(bias_len);
    for (double& v : model.proj_bias) v = r.f64();
    model.type_emb = r.matrix();

    if (r.remaining() != 0) throw data_error("checkpoint corrupted (trailing bytes)");

    const std::size_t d = model.hp.dim;
    if (model.type_emb.rows() != model.vocab.size()) {
        throw data_error("checkpoint incompatible: type matrix rows " +
                         std::to_string(model.type_emb.rows()) +
                         " != vocabulary size " + std::to_string(model.vocab.size()));
    }
    if (model.token_emb.rows() != model.hp.hash_buckets || model.token_emb.cols() != d ||
        model.proj.rows() != d || model.proj.cols() != 2 * d ||
        model.proj_bias.size() != d || model.type_emb.cols() != d) {
        throw data_error("checkpoint incompatible: parameter shapes do not match "
                         "hyperparameters");
    }
    for (double v : model.token_emb.data())
        if (!std::isfinite(v)) throw data_error("checkpoint contains non-finite parameters");
    return model;
}

// --- external vectors -------------------------------------------------------

void VectorStore::insert(const std::string& id, StoredVector vec) {
    if (!vectors_.emplace(id, std::move(vec)).second) {
        throw data_error("duplicate vector id '" + id + "'");
    }
}

const StoredVector* VectorStore::get(const std::string& id) const {
    auto it = vectors_.find(id);
    return it == vectors_.end() ? nullptr : &it->second;
}

TypeVector VectorStore::type_vector(const std::string& id) const {
    const StoredVector* v = get(id);
    if (!v) throw data_error("vector id '" + id + "' not found in store");
    if (v->kind != VectorKind::type_probs)
        throw data_error("vector id '" + id + "' is not a type_probs record");
    return TypeVector{v->values, spec_.vocab_id};
}

VectorStore import_external_vectors(const std::string& path, VectorStoreSpec spec) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open vector file: " + path);

    VectorStore store(spec);
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
        if (!record.is_object() || !record.contains("id") || !record.contains("kind") ||
            !record.contains("values") || !record["id"].is_string() ||
            !record["kind"].is_string() || !record["values"].is_array()) {
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": expected {\"id\",\"kind\",\"values\"}");
        }
        const auto id = record["id"].get<std::string>();
        const auto kind_name = record["kind"].get<std::string>();

        StoredVector vec;
        if (kind_name == "type_probs") {
            vec.kind = VectorKind::type_probs;
        } else if (kind_name == "hidden") {
            vec.kind = VectorKind::hidden;
        } else {
            throw data_error(path + ":" + std::to_string(lineno) + ": unknown kind '" +
                             kind_name + "'");
        }

        vec.values.reserve(record["values"].size());
        for (const auto& jv : record["values"]) {
            if (!jv.is_number())
                throw data_error(path + ":" + std::to_string(lineno) +
                                 ": values must be numbers");
            vec.values.push_back(jv.get<double>());
        }

        if (vec.kind == VectorKind::type_probs) {
            if (spec.num_types != 0 && vec.values.size() != spec.num_types) {
                throw data_error(path + ":" + std::to_string(lineno) + ": vector '" + id +
                                 "' has length " + std::to_string(vec.values.size()) +
                                 " but the vocabulary has " +
                                 std::to_string(spec.num_types) + " types");
            }
            for (std::size_t i = 0; i < vec.values.size(); ++i) {
                const double p = vec.values[i];
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw data_error(path + ":" + std::to_string(lineno) + ": vector '" +
                                     id + "' values[" + std::to_string(i) + "] = " +
                                     std::to_string(p) + " out of [0,1]");
                }
            }
        } else {
            if (spec.hidden_dim != 0 && vec.values.size() != spec.hidden_dim) {
                throw data_error(path + ":" + std::to_string(lineno) + ": hidden vector '" +
                                 id + "' has dimension " +
                                 std::to_string(vec.values.size()) + " but the model has d=" +
                                 std::to_string(spec.hidden_dim));
            }
            for (double v : vec.values) {
                if (!std::isfinite(v))
                    throw data_error(path + ":" + std::to_string(lineno) + ": vector '" +
                                     id + "' contains a non-finite value");
            }
        }
        store.insert(id, std::move(vec));
    }
    return store;
}

}  // namespace typevec
