#include "typevec/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "typevec/errors.hpp"
#include "typevec/hash.hpp"
#include "typevec/rng.hpp"

namespace typevec {

using nlohmann::json;

void ReducedVocabulary::rebuild_id() {
    std::uint64_t h = fnv1a64_u64(parent_vocab_id);
    h = fnv1a64_u64(parent_size, h);
    for (std::size_t idx : kept_indices) h = fnv1a64_u64(idx, h);
    id = h;
}

std::optional<std::size_t> ReducedVocabulary::position_of(std::size_t old_index) const {
    auto it = std::lower_bound(kept_indices.begin(), kept_indices.end(), old_index);
    if (it == kept_indices.end() || *it != old_index) return std::nullopt;
    return static_cast<std::size_t>(it - kept_indices.begin());
}

BinaryPairs make_binary_ned_pairs(const std::vector<NedPairSource>& examples,
                                  std::uint64_t seed) {
    Rng rng(seed);
    BinaryPairs out;
    for (const auto& ex : examples) {
        if (ex.gold_index >= ex.candidate_vecs.size()) {
            throw data_error("make_binary_ned_pairs: gold_index out of range");
        }
        if (ex.candidate_vecs.size() < 2) {
            ++out.skipped;
            continue;
        }
        // Random non-gold candidate; skip over the gold slot.
        std::size_t pick = rng.uniform_index(ex.candidate_vecs.size() - 1);
        if (pick >= ex.gold_index) ++pick;

        out.pairs.push_back({ex.mention_vec, ex.candidate_vecs[ex.gold_index], 1});
        out.pairs.push_back({ex.mention_vec, ex.candidate_vecs[pick], 0});
    }
    return out;
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

// Cosine scoring is scale-invariant in the mask, so per-component gradients
// grow like 1/|w| as the penalty shrinks the whole mask; uncapped they fling
// weights back out of the prox region and training cycles instead of going
// sparse. Healthy gradients are orders of magnitude below this cap.
constexpr double kMaskGradClip = 10.0;

struct PairScore {
    double sim = 0.0;
    bool degenerate = false;  // zero weighted norm in cosine mode
    double norm_l2 = 0.0;     // weighted squared norms, cosine mode only
    double norm_r2 = 0.0;
    double weighted_dot = 0.0;
};

PairScore score_pair(const BinaryPair& pair, const std::vector<double>& w,
                     MaskMode mode) {
    PairScore ps;
    const auto& l = pair.left.probs;
    const auto& r = pair.right.probs;
    if (mode == MaskMode::dot) {
        double acc = 0.0;
        for (std::size_t j = 0; j < l.size(); ++j) acc += w[j] * (l[j] * r[j]);
        ps.sim = acc;
        return ps;
    }
    double num = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t j = 0; j < l.size(); ++j) {
        num += w[j] * (l[j] * r[j]);
        n1 += w[j] * l[j] * l[j];
        n2 += w[j] * r[j] * r[j];
    }
    ps.weighted_dot = num;
    ps.norm_l2 = n1;
    ps.norm_r2 = n2;
    if (n1 <= 0.0 || n2 <= 0.0) {
        // All discriminative mass was pruned away; score 0 with zero gradient
        // instead of failing mid-training. The public kernel still rejects this.
        ps.degenerate = true;
        ps.sim = 0.0;
        return ps;
    }
    ps.sim = num / (std::sqrt(n1) * std::sqrt(n2));
    return ps;
}

}  // namespace

MaskTrainResult train_mask(const std::vector<BinaryPair>& pairs,
                           const MaskTrainConfig& config) {
    if (pairs.empty()) throw data_error("train_mask: empty pair list");
    if (!(config.lr > 0.0)) throw data_error("train_mask: lr must be positive");
    if (config.lambda_l1 < 0.0) throw data_error("train_mask: lambda_l1 must be >= 0");

    const std::size_t dim = pairs.front().left.size();
    const std::uint64_t vocab_id = pairs.front().left.vocab_id;
    for (const auto& pair : pairs) {
        if (pair.left.size() != dim || pair.right.size() != dim ||
            pair.left.vocab_id != vocab_id || pair.right.vocab_id != vocab_id) {
            throw data_error("train_mask: pairs span different vocabularies");
        }
        if (pair.label != 0 && pair.label != 1) {
            throw data_error("train_mask: labels must be 0 or 1");
        }
    }

    std::vector<double> w(dim, 1.0);
    double a = 1.0, b = 0.0;
    const double n_inv = 1.0 / static_cast<double>(pairs.size());

    std::vector<double> grad_w(dim, 0.0);
    MaskTrainResult result;
    result.objective_history.reserve(config.epochs + 1);

    auto objective_and_grads = [&](bool want_grads) {
        double loss = 0.0;
        if (want_grads) std::fill(grad_w.begin(), grad_w.end(), 0.0);
        double grad_a = 0.0, grad_b = 0.0;
        for (const auto& pair : pairs) {
            const PairScore ps = score_pair(pair, w, config.scorer);
            const double z = a * ps.sim + b;
            const double p = sigmoid(z);
            const double y = static_cast<double>(pair.label);
            const double pc = std::clamp(p, kBceClamp, 1.0 - kBceClamp);
            loss -= pair.label ? std::log(pc) : std::log1p(-pc);
            if (!want_grads) continue;

            const double dz = p - y;
            grad_a += dz * ps.sim;
            grad_b += dz;
            if (ps.degenerate) continue;
            const auto& l = pair.left.probs;
            const auto& r = pair.right.probs;
            if (config.scorer == MaskMode::dot) {
                for (std::size_t j = 0; j < dim; ++j) {
                    grad_w[j] += dz * a * l[j] * r[j];
                }
            } else {
                const double nl = std::sqrt(ps.norm_l2);
                const double nr = std::sqrt(ps.norm_r2);
                const double inv_nlnr = 1.0 / (nl * nr);
                for (std::size_t j = 0; j < dim; ++j) {
                    const double ds = l[j] * r[j] * inv_nlnr -
                                      ps.sim * (l[j] * l[j] / (2.0 * ps.norm_l2) +
                                                r[j] * r[j] / (2.0 * ps.norm_r2));
                    grad_w[j] += dz * a * ds;
                }
            }
        }
        loss *= n_inv;
        grad_a *= n_inv;
        grad_b *= n_inv;
        if (want_grads) {
            for (double& g : grad_w) g *= n_inv;
        }
        double penalty = 0.0;
        for (double v : w) penalty += std::abs(v);
        return std::tuple<double, double, double>(loss + config.lambda_l1 * penalty,
                                                  grad_a, grad_b);
    };

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        auto [objective, grad_a, grad_b] = objective_and_grads(true);
        if (!std::isfinite(objective)) {
            throw numeric_error("train_mask diverged: non-finite objective at epoch " +
                                std::to_string(epoch));
        }
        result.objective_history.push_back(objective);

        a -= config.lr * grad_a;
        b -= config.lr * grad_b;
        for (std::size_t j = 0; j < dim; ++j) {
            const double g = std::clamp(grad_w[j], -kMaskGradClip, kMaskGradClip);
            double v = soft_threshold(w[j] - config.lr * g,
                                      config.lr * config.lambda_l1);
            if (config.scorer == MaskMode::cosine) v = std::clamp(v, 0.0, 1.0);
            w[j] = v;
        }
    }
    auto [final_objective, ga, gb] = objective_and_grads(false);
    (void)ga;
    (void)gb;
    result.objective_history.push_back(final_objective);

    result.mask = {std::move(w), config.scorer};
    result.scale = a;
    result.bias = b;
    std::size_t zeros = 0;
    for (double v : result.mask.weights) zeros += std::abs(v) < kMaskSparsityEps;
    result.sparsity = static_cast<double>(zeros) / static_cast<double>(dim);
    return result;
}

bool mask_predict(const BinaryPair& pair, const MaskTrainResult& trained) {
    const PairScore ps = score_pair(pair, trained.mask.weights, trained.mask.mode);
    return sigmoid(trained.scale * ps.sim + trained.bias) > 0.5;
}

ReducedVocabulary prune_top_fraction(const DiagonalMask& mask, double fraction,
                                     std::uint64_t parent_vocab_id) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw data_error("prune_top_fraction: fraction must be in (0, 1]");
    }
    const std::size_t n = mask.weights.size();
    if (n == 0) throw data_error("prune_top_fraction: empty mask");
    // ceil(fraction * n) with a tolerance so binary fractions like 0.1 of
    // 10000 keep exactly 1000 instead of picking up a rounding ulp.
    auto keep = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(n) - 1e-9));
    keep = std::clamp<std::size_t>(keep, 1, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const double wi = std::abs(mask.weights[i]);
        const double wj = std::abs(mask.weights[j]);
        if (wi != wj) return wi > wj;
        return i < j;
    });
    order.resize(std::min(keep, n));
    std::sort(order.begin(), order.end());

    ReducedVocabulary reduced;
    reduced.kept_indices = std::move(order);
    reduced.parent_vocab_id = parent_vocab_id;
    reduced.parent_size = n;
    reduced.rebuild_id();
    return reduced;
}

TypeVector project_vector(const TypeVector& t, const ReducedVocabulary& reduced) {
    if (t.size() != reduced.parent_size ||
        (reduced.parent_vocab_id != 0 && t.vocab_id != reduced.parent_vocab_id)) {
        throw data_error("project_vector: vector does not match the parent vocabulary");
    }
    TypeVector out;
    out.vocab_id = reduced.id;
    out.probs.reserve(reduced.kept_indices.size());
    for (std::size_t idx : reduced.kept_indices) out.probs.push_back(t.probs[idx]);
    return out;
}

DiagonalMask restrict_mask(const DiagonalMask& mask, const ReducedVocabulary& reduced) {
    if (mask.weights.size() != reduced.parent_size) {
        throw data_error("restrict_mask: mask does not match the parent vocabulary");
    }
    DiagonalMask out;
    out.mode = mask.mode;
    out.weights.assign(mask.weights.size(), 0.0);
    for (std::size_t idx : reduced.kept_indices) out.weights[idx] = mask.weights[idx];
    return out;
}

void save_mask(const DiagonalMask& mask, const MaskFileMeta& meta,
               const TypeVocabulary* vocab, const std::string& path) {
    if (vocab && vocab->size() != mask.weights.size()) {
        throw data_error("save_mask: vocabulary size does not match mask length");
    }
    std::ofstream out(path);
    if (!out) throw data_error("cannot write mask file: " + path);
    json header = {{"mode", to_string(mask.mode)},
                   {"lambda", meta.lambda_l1},
                   {"seed", meta.seed},
                   {"types", mask.weights.size()},
                   {"scale", meta.scale},
                   {"bias", meta.bias},
                   {"sparsity", meta.sparsity}};
    out << header.dump() << '\n';
    for (std::size_t j = 0; j < mask.weights.size(); ++j) {
        json row = {{"index", j},
                    {"type", vocab ? vocab->types[j] : std::string()},
                    {"weight", mask.weights[j]}};
        out << row.dump() << '\n';
    }
    if (!out) throw data_error("failed writing mask file: " + path);
}

LoadedMask load_mask(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open mask file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw data_error("mask file is empty: " + path);

    LoadedMask loaded;
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw data_error(path + ":1: malformed JSON: " + e.what());
    }
    if (!header.contains("mode") || !header.contains("lambda") || !header.contains("seed"))
        throw data_error(path + ":1: mask header must carry mode, lambda, seed");
    loaded.mask.mode = mask_mode_from_string(header["mode"].get<std::string>());
    loaded.meta.lambda_l1 = header["lambda"].get<double>();
    loaded.meta.seed = header["seed"].get<std::uint64_t>();
    loaded.meta.scale = header.value("scale", 1.0);
    loaded.meta.bias = header.value("bias", 0.0);
    loaded.meta.sparsity = header.value("sparsity", 0.0);
    const auto declared = header.value("types", static_cast<std::size_t>(0));

    std::size_t lineno = 1;
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
        if (!row.contains("index") || !row.contains("weight"))
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": mask row must carry index and weight");
        const auto idx = row["index"].get<std::size_t>();
        if (idx != loaded.mask.weights.size())
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": mask rows out of order");
        loaded.mask.weights.push_back(row["weight"].get<double>());
    }
    if (declared != 0 && declared != loaded.mask.weights.size())
        throw data_error(path + ": header declares " + std::to_string(declared) +
                         " types but file carries " +
                         std::to_string(loaded.mask.weights.size()));
    return loaded;
}

void save_reduced(const ReducedVocabulary& reduced, const std::string& path) {
    json doc = {{"parent_vocab_id", hex64(reduced.parent_vocab_id)},
                {"parent_size", reduced.parent_size},
                {"kept_indices", reduced.kept_indices}};
    std::ofstream out(path);
    if (!out) throw data_error("cannot write reduced vocabulary: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw data_error("failed writing reduced vocabulary: " + path);
}

ReducedVocabulary load_reduced(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open reduced vocabulary: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw data_error(path + ": malformed JSON: " + std::string(e.what()));
    }
    ReducedVocabulary reduced;
    if (!doc.contains("parent_size") || !doc.contains("kept_indices"))
        throw data_error(path + ": expected parent_size and kept_indices");
    reduced.parent_size = doc["parent_size"].get<std::size_t>();
    reduced.kept_indices = doc["kept_indices"].get<std::vector<std::size_t>>();
    if (doc.contains("parent_vocab_id")) {
        reduced.parent_vocab_id =
            std::stoull(doc["parent_vocab_id"].get<std::string>(), nullptr, 16);
    }
    for (std::size_t i = 0; i < reduced.kept_indices.size(); ++i) {
        if (reduced.kept_indices[i] >= reduced.parent_size ||
            (i > 0 && reduced.kept_indices[i] <= reduced.kept_indices[i - 1])) {
            throw data_error(path + ": kept_indices must be strictly increasing and in "
                             "range");
        }
    }
    reduced.rebuild_id();
    return reduced;
}

}  // namespace typevec
