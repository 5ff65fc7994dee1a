#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "typevec/errors.hpp"
#include "typevec/reduce.hpp"
#include "typevec/sim.hpp"

using namespace typevec;
using testsupport::make_vec;

namespace {

constexpr std::uint64_t kVocabId = 42;

// Pairs where only dimension 0 carries the label: positives have it high on
// both sides, negatives on one side only. Other dimensions are noise.
std::vector<BinaryPair> dim0_pairs(std::size_t count, std::size_t dims, Rng& rng) {
    std::vector<BinaryPair> pairs;
    for (std::size_t i = 0; i < count; ++i) {
        const int label = static_cast<int>(i % 2);
        std::vector<double> l = testsupport::random_probs(rng, dims, 0.0, 1.0);
        std::vector<double> r = testsupport::random_probs(rng, dims, 0.0, 1.0);
        l[0] = rng.uniform_real(0.85, 0.95);
        r[0] = label ? rng.uniform_real(0.85, 0.95) : rng.uniform_real(0.0, 0.1);
        pairs.push_back({make_vec(l, kVocabId), make_vec(r, kVocabId), label});
    }
    return pairs;
}

NedPairSource ned_source(std::vector<double> mention,
                         std::vector<std::vector<double>> candidates,
                         std::size_t gold) {
    NedPairSource src;
    src.mention_vec = make_vec(std::move(mention), kVocabId);
    for (auto& c : candidates) src.candidate_vecs.push_back(make_vec(std::move(c), kVocabId));
    src.gold_index = gold;
    return src;
}

}  // namespace

TEST_CASE("make_binary_ned_pairs builds one positive and one negative per example") {
    std::vector<NedPairSource> examples = {
        ned_source({0.9, 0.1}, {{0.8, 0.1}, {0.1, 0.8}, {0.5, 0.5}}, 0)};
    auto out = make_binary_ned_pairs(examples, 7);
    REQUIRE(out.pairs.size() == 2);
    CHECK(out.skipped == 0);
    CHECK(out.pairs[0].label == 1);
    CHECK(out.pairs[0].right.probs == std::vector<double>{0.8, 0.1});
    CHECK(out.pairs[1].label == 0);
    const auto& neg = out.pairs[1].right.probs;
    CHECK((neg == std::vector<double>{0.1, 0.8} || neg == std::vector<double>{0.5, 0.5}));
}

TEST_CASE("make_binary_ned_pairs is deterministic under the seed") {
    Rng rng(5);
    std::vector<NedPairSource> examples;
    for (int i = 0; i < 30; ++i) {
        std::vector<std::vector<double>> cands;
        const std::size_t n = 2 + rng.uniform_index(4);
        for (std::size_t j = 0; j < n; ++j)
            cands.push_back(testsupport::random_probs(rng, 4));
        examples.push_back(
            ned_source(testsupport::random_probs(rng, 4), cands, rng.uniform_index(n)));
    }
    auto a = make_binary_ned_pairs(examples, 99);
    auto b = make_binary_ned_pairs(examples, 99);
    REQUIRE(a.pairs.size() == b.pairs.size());
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
        CHECK(a.pairs[i].right.probs == b.pairs[i].right.probs);
        CHECK(a.pairs[i].label == b.pairs[i].label);
    }
}

TEST_CASE("make_binary_ned_pairs: 100 examples give 200 pairs, half positive") {
    Rng rng(6);
    std::vector<NedPairSource> examples;
    for (int i = 0; i < 100; ++i) {
        std::vector<std::vector<double>> cands;
        for (int j = 0; j < 3; ++j) cands.push_back(testsupport::random_probs(rng, 5));
        examples.push_back(ned_source(testsupport::random_probs(rng, 5), cands,
                                      rng.uniform_index(3)));
    }
    auto out = make_binary_ned_pairs(examples, 1);
    CHECK(out.pairs.size() == 200);
    std::size_t positives = 0;
    for (const auto& p : out.pairs) positives += p.label == 1;
    CHECK(positives == 100);
    // The negative is never the gold candidate.
    for (std::size_t i = 0; i < 100; ++i) {
        const auto& gold = examples[i].candidate_vecs[examples[i].gold_index].probs;
        CHECK(out.pairs[2 * i + 1].right.probs != gold);
    }
}

TEST_CASE("make_binary_ned_pairs skips single-candidate examples with a count") {
    std::vector<NedPairSource> examples = {
        ned_source({0.9}, {{0.8}}, 0),
        ned_source({0.9}, {{0.8}, {0.1}}, 0),
    };
    auto out = make_binary_ned_pairs(examples, 3);
    CHECK(out.pairs.size() == 2);
    CHECK(out.skipped == 1);
    CHECK_THROWS_AS(
        make_binary_ned_pairs({ned_source({0.9}, {{0.8}}, 5)}, 0), data_error);
}

TEST_CASE("train_mask with lambda=0 concentrates weight on the informative dimension") {
    Rng rng(11);
    auto pairs = dim0_pairs(200, 6, rng);
    MaskTrainConfig config;
    config.lambda_l1 = 0.0;
    config.lr = 0.3;
    config.epochs = 300;
    config.scorer = MaskMode::dot;
    auto trained = train_mask(pairs, config);
    REQUIRE(trained.mask.weights.size() == 6);
    for (std::size_t j = 1; j < 6; ++j) {
        CHECK(std::abs(trained.mask.weights[0]) > std::abs(trained.mask.weights[j]));
    }
    CHECK(trained.sparsity == 0.0);
}

TEST_CASE("train_mask with a huge lambda zeroes essentially everything") {
    Rng rng(12);
    auto pairs = dim0_pairs(40, 8, rng);
    MaskTrainConfig config;
    config.lambda_l1 = 10.0;
    config.lr = 0.05;
    config.epochs = 100;

    config.scorer = MaskMode::dot;
    CHECK(train_mask(pairs, config).sparsity >= 0.99);

    // Cosine mode survives the fully-degenerate mask (weighted norms hit 0).
    config.scorer = MaskMode::cosine;
    auto trained = train_mask(pairs, config);
    CHECK(trained.sparsity >= 0.99);
    for (double w : trained.mask.weights) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
    }
}

TEST_CASE("moderate lambda lands sparsity in the observed 20-35% band") {
    // 270 dims: 230 carry independent graded signal, 40 are inert. Positives
    // share the hot-dimension set, negatives draw their own; 8% label noise
    // keeps residual gradients alive so useful dimensions survive the prox
    // threshold while inert ones reach exact zero.
    const std::size_t dims = 270, informative = 230;
    Rng rng(7);
    std::vector<double> amp(dims, 0.0);
    for (std::size_t j = 0; j < informative; ++j) {
        amp[j] = 0.55 + 0.45 * static_cast<double>(j) / static_cast<double>(informative);
    }
    std::vector<BinaryPair> pairs;
    for (int i = 0; i < 600; ++i) {
        const int label = i % 2;
        std::vector<double> l = testsupport::random_probs(rng, dims, 0.0, 0.05);
        std::vector<double> r = testsupport::random_probs(rng, dims, 0.0, 0.05);
        std::vector<std::uint8_t> hot_l(dims, 0), hot_r(dims, 0);
        for (std::size_t j = 0; j < informative; ++j) hot_l[j] = rng.uniform_real() < 0.2;
        if (label) {
            hot_r = hot_l;
        } else {
            for (std::size_t j = 0; j < informative; ++j)
                hot_r[j] = rng.uniform_real() < 0.2;
        }
        for (std::size_t j = 0; j < informative; ++j) {
            if (hot_l[j]) l[j] = amp[j] * rng.uniform_real(0.7, 1.0);
            if (hot_r[j]) r[j] = amp[j] * rng.uniform_real(0.7, 1.0);
        }
        int y = label;
        if (rng.uniform_real() < 0.08) y = 1 - y;
        pairs.push_back({make_vec(l, kVocabId), make_vec(r, kVocabId), y});
    }

    MaskTrainConfig config;
    config.lambda_l1 = 0.0005;
    config.lr = 0.5;
    config.epochs = 4000;
    config.scorer = MaskMode::dot;
    auto trained = train_mask(pairs, config);
    CHECK(trained.sparsity >= 0.20);
    CHECK(trained.sparsity <= 0.35);
}

TEST_CASE("objective is non-increasing for small learning rates") {
    Rng rng(13);
    auto pairs = dim0_pairs(60, 10, rng);
    for (MaskMode mode : {MaskMode::dot, MaskMode::cosine}) {
        MaskTrainConfig config;
        config.lambda_l1 = 0.01;
        config.lr = 0.02;
        config.epochs = 200;
        config.scorer = mode;
        auto trained = train_mask(pairs, config);
        REQUIRE(trained.objective_history.size() == 201);
        for (std::size_t i = 1; i < trained.objective_history.size(); ++i) {
            CHECK(trained.objective_history[i] <=
                  trained.objective_history[i - 1] + 1e-6);
        }
    }
}

TEST_CASE("train_mask aborts on non-finite input") {
    Rng rng(14);
    auto pairs = dim0_pairs(10, 4, rng);
    pairs[3].left.probs[2] = std::numeric_limits<double>::quiet_NaN();
    MaskTrainConfig config;
    config.epochs = 5;
    CHECK_THROWS_AS(train_mask(pairs, config), numeric_error);
}

TEST_CASE("train_mask validates inputs") {
    CHECK_THROWS_AS(train_mask({}, MaskTrainConfig{}), data_error);

    Rng rng(15);
    auto pairs = dim0_pairs(4, 3, rng);
    pairs[1].right.vocab_id = 999;
    CHECK_THROWS_AS(train_mask(pairs, MaskTrainConfig{}), data_error);

    auto bad_label = dim0_pairs(4, 3, rng);
    bad_label[0].label = 2;
    CHECK_THROWS_AS(train_mask(bad_label, MaskTrainConfig{}), data_error);

    auto ok = dim0_pairs(4, 3, rng);
    MaskTrainConfig bad;
    bad.lr = 0.0;
    CHECK_THROWS_AS(train_mask(ok, bad), data_error);
    bad.lr = 0.1;
    bad.lambda_l1 = -1.0;
    CHECK_THROWS_AS(train_mask(ok, bad), data_error);
}

TEST_CASE("cosine-mode training keeps weights clipped to [0,1]") {
    Rng rng(16);
    auto pairs = dim0_pairs(80, 6, rng);
    MaskTrainConfig config;
    config.scorer = MaskMode::cosine;
    config.lr = 0.5;
    config.epochs = 150;
    config.lambda_l1 = 0.001;
    auto trained = train_mask(pairs, config);
    CHECK(trained.mask.mode == MaskMode::cosine);
    for (double w : trained.mask.weights) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
    }
}

TEST_CASE("prune_top_fraction keeps the largest-magnitude weights") {
    DiagonalMask mask{{0.9, 0.1, 0.5, 0.7}, MaskMode::dot};
    auto reduced = prune_top_fraction(mask, 0.5, kVocabId);
    CHECK(reduced.kept_indices == std::vector<std::size_t>{0, 3});
    CHECK(reduced.parent_size == 4);
    CHECK(reduced.parent_vocab_id == kVocabId);
    CHECK(reduced.position_of(0) == 0);
    CHECK(reduced.position_of(3) == 1);
    CHECK_FALSE(reduced.position_of(1).has_value());
}

TEST_CASE("prune_top_fraction breaks ties toward the lower index") {
    DiagonalMask mask{{0.5, 0.5, 0.1}, MaskMode::dot};
    auto reduced = prune_top_fraction(mask, 1.0 / 3.0, 0);
    CHECK(reduced.kept_indices == std::vector<std::size_t>{0});
}

TEST_CASE("prune_top_fraction hits the paper-scale counts exactly") {
    Rng rng(17);
    DiagonalMask big{testsupport::random_probs(rng, 60000), MaskMode::dot};
    CHECK(prune_top_fraction(big, 5000.0 / 60000.0, 0).size() == 5000);

    DiagonalMask ten_k{testsupport::random_probs(rng, 10000), MaskMode::dot};
    CHECK(prune_top_fraction(ten_k, 0.1, 0).size() == 1000);

    CHECK(prune_top_fraction(ten_k, 1.0, 0).size() == 10000);
    CHECK_THROWS_AS(prune_top_fraction(ten_k, 0.0, 0), data_error);
    CHECK_THROWS_AS(prune_top_fraction(ten_k, 1.5, 0), data_error);
}

TEST_CASE("prune_top_fraction commutes with type relabeling") {
    Rng rng(18);
    const std::size_t n = 50;
    // Distinct magnitudes so the cut is tie-free.
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j)
        w[j] = (static_cast<double>(j) + 1.0) * (rng.uniform_index(2) ? 1.0 : -1.0);
    rng.shuffle(w);

    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < n; ++j) perm[j] = j;
    rng.shuffle(perm);
    std::vector<double> permuted(n);
    for (std::size_t j = 0; j < n; ++j) permuted[perm[j]] = w[j];

    auto base = prune_top_fraction(DiagonalMask{w, MaskMode::dot}, 0.3, 0);
    auto relabeled = prune_top_fraction(DiagonalMask{permuted, MaskMode::dot}, 0.3, 0);

    std::vector<std::size_t> mapped;
    for (std::size_t idx : base.kept_indices) mapped.push_back(perm[idx]);
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == relabeled.kept_indices);
}

TEST_CASE("project_vector selects kept components in order") {
    DiagonalMask mask{{0.9, 0.0, 0.8}, MaskMode::dot};
    auto reduced = prune_top_fraction(mask, 2.0 / 3.0, kVocabId);
    REQUIRE(reduced.kept_indices == std::vector<std::size_t>{0, 2});
    auto t = make_vec({0.1, 0.2, 0.3}, kVocabId);
    auto projected = project_vector(t, reduced);
    CHECK(projected.probs == std::vector<double>{0.1, 0.3});
    CHECK(projected.vocab_id == reduced.id);

    CHECK_THROWS_AS(project_vector(make_vec({0.1, 0.2}, kVocabId), reduced), data_error);
    CHECK_THROWS_AS(project_vector(make_vec({0.1, 0.2, 0.3}, 777), reduced), data_error);
}

TEST_CASE("projecting with a keep-all reduction is the identity on components") {
    DiagonalMask mask{{0.5, 0.6, 0.7}, MaskMode::dot};
    auto reduced = prune_top_fraction(mask, 1.0, kVocabId);
    auto t = make_vec({0.25, 0.5, 0.75}, kVocabId);
    CHECK(project_vector(t, reduced).probs == t.probs);
}

TEST_CASE("projection agrees with masked_dot under the pruned 0/1 mask") {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + rng.uniform_index(40);
        DiagonalMask mask{testsupport::random_probs(rng, n, -1.0, 1.0), MaskMode::dot};
        auto reduced = prune_top_fraction(mask, rng.uniform_real(0.2, 0.9), kVocabId);

        DiagonalMask indicator{std::vector<double>(n, 0.0), MaskMode::dot};
        for (std::size_t idx : reduced.kept_indices) indicator.weights[idx] = 1.0;

        auto t1 = make_vec(testsupport::random_probs(rng, n), kVocabId);
        auto t2 = make_vec(testsupport::random_probs(rng, n), kVocabId);
        auto p1 = project_vector(t1, reduced);
        auto p2 = project_vector(t2, reduced);
        auto ones = DiagonalMask::ones(reduced.size(), MaskMode::dot);
        CHECK(std::abs(masked_dot(p1, p2, ones) - masked_dot(t1, t2, indicator)) <=
              1e-12);
    }
}

TEST_CASE("restrict_mask zeroes pruned positions and keeps the rest") {
    DiagonalMask mask{{0.9, 0.2, 0.8, 0.1}, MaskMode::dot};
    auto reduced = prune_top_fraction(mask, 0.5, 0);
    auto restricted = restrict_mask(mask, reduced);
    CHECK(restricted.weights == std::vector<double>{0.9, 0.0, 0.8, 0.0});
    CHECK(restricted.mode == MaskMode::dot);
}

TEST_CASE("mask file round-trips through save and load") {
    testsupport::TempDir dir("mask_io");
    auto vocab = testsupport::make_vocab({"alpha", "beta", "gamma"});
    DiagonalMask mask{{0.25, 0.0, 0.75}, MaskMode::cosine};
    MaskFileMeta meta;
    meta.lambda_l1 = 0.01;
    meta.seed = 9;
    meta.scale = 3.5;
    meta.bias = -1.25;
    meta.sparsity = 1.0 / 3.0;
    const std::string path = dir.path("mask.jsonl");
    save_mask(mask, meta, &vocab, path);

    auto loaded = load_mask(path);
    CHECK(loaded.mask.weights == mask.weights);
    CHECK(loaded.mask.mode == MaskMode::cosine);
    CHECK(loaded.meta.lambda_l1 == meta.lambda_l1);
    CHECK(loaded.meta.seed == meta.seed);
    CHECK(loaded.meta.scale == meta.scale);
    CHECK(loaded.meta.bias == meta.bias);
    CHECK(loaded.meta.sparsity == doctest::Approx(meta.sparsity));

    CHECK_THROWS_AS(load_mask(dir.path("missing.jsonl")), data_error);
    testsupport::write_file(dir.path("empty.jsonl"), "");
    CHECK_THROWS_AS(load_mask(dir.path("empty.jsonl")), data_error);
}

TEST_CASE("reduced vocabulary file round-trips and validates") {
    testsupport::TempDir dir("reduced_io");
    DiagonalMask mask{{0.9, 0.1, 0.5, 0.7, 0.3}, MaskMode::dot};
    auto reduced = prune_top_fraction(mask, 0.6, kVocabId);
    const std::string path = dir.path("reduced.json");
    save_reduced(reduced, path);
    auto loaded = load_reduced(path);
    CHECK(loaded.kept_indices == reduced.kept_indices);
    CHECK(loaded.parent_size == reduced.parent_size);
    CHECK(loaded.parent_vocab_id == reduced.parent_vocab_id);
    CHECK(loaded.id == reduced.id);

    testsupport::write_file(dir.path("bad.json"),
                            R"({"parent_size": 3, "kept_indices": [2, 1]})");
    CHECK_THROWS_AS(load_reduced(dir.path("bad.json")), data_error);
    testsupport::write_file(dir.path("oob.json"),
                            R"({"parent_size": 3, "kept_indices": [1, 7]})");
    CHECK_THROWS_AS(load_reduced(dir.path("oob.json")), data_error);
}
