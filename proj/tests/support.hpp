#pragma once

// Shared test utilities and independent oracles. Everything here is written
// against plain std::vector<double> buffers on purpose: these are the
// reference computations the library is checked against, so they must not
// share code with the implementation paths they verify.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unistd.h>
#include <vector>

#include "typevec/rng.hpp"
#include "typevec/typer.hpp"

namespace testsupport {

// --- scalar-loop similarity oracles -----------------------------------------

inline double oracle_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline std::optional<double> oracle_cosine(const std::vector<double>& a,
                                           const std::vector<double>& b) {
    double num = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return std::nullopt;
    return num / (std::sqrt(na) * std::sqrt(nb));
}

inline double oracle_masked_dot(const std::vector<double>& a,
                                const std::vector<double>& b,
                                const std::vector<double>& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += w[i] * a[i] * b[i];
    return acc;
}

inline std::optional<double> oracle_masked_cosine(const std::vector<double>& a,
                                                  const std::vector<double>& b,
                                                  const std::vector<double>& w) {
    double num = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += w[i] * a[i] * b[i];
        na += w[i] * a[i] * a[i];
        nb += w[i] * b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return std::nullopt;
    return num / (std::sqrt(na) * std::sqrt(nb));
}

// --- enumeration oracles for the task harnesses -------------------------------

// Lowest-index argmax over cosine, skipping zero-norm candidates.
inline std::optional<std::size_t> oracle_ned_predict(
    const std::vector<double>& mention,
    const std::vector<std::vector<double>>& candidates) {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        auto score = oracle_cosine(mention, candidates[j]);
        if (!score) continue;
        if (!best || *score > best_score) {
            best = j;
            best_score = *score;
        }
    }
    return best;
}

// --- numerical rank -----------------------------------------------------------

// Greedy column-pivoted Gram-Schmidt: counts columns whose residual norm
// stays above tol * (largest initial column norm).
inline std::size_t numerical_rank(std::vector<std::vector<double>> columns, double tol) {
    if (columns.empty()) return 0;
    const std::size_t rows = columns.front().size();
    double scale = 0.0;
    for (const auto& col : columns) {
        double n = std::sqrt(oracle_dot(col, col));
        scale = std::max(scale, n);
    }
    if (scale == 0.0) return 0;

    std::size_t rank = 0;
    std::vector<std::vector<double>> basis;
    std::vector<bool> used(columns.size(), false);
    while (true) {
        std::size_t pick = columns.size();
        double best_norm = 0.0;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (used[c]) continue;
            const double n = std::sqrt(oracle_dot(columns[c], columns[c]));
            if (n > best_norm) {
                best_norm = n;
                pick = c;
            }
        }
        if (pick == columns.size() || best_norm <= tol * scale) break;

        used[pick] = true;
        ++rank;
        std::vector<double> q = columns[pick];
        const double inv = 1.0 / best_norm;
        for (double& v : q) v *= inv;
        basis.push_back(q);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (used[c]) continue;
            const double proj = oracle_dot(q, columns[c]);
            for (std::size_t r = 0; r < rows; ++r) columns[c][r] -= proj * q[r];
        }
    }
    return rank;
}

// --- misc helpers ---------------------------------------------------------------

inline typevec::TypeVector make_vec(std::vector<double> probs, std::uint64_t vocab_id) {
    typevec::TypeVector t;
    t.probs = std::move(probs);
    t.vocab_id = vocab_id;
    return t;
}

inline std::vector<double> random_probs(typevec::Rng& rng, std::size_t n,
                                        double lo = 0.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform_real(lo, hi);
    return v;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        base_ = std::filesystem::temp_directory_path() /
                ("typevec_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(base_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(base_, ec);
    }
    std::string path(const std::string& name) const { return (base_ / name).string(); }

private:
    std::filesystem::path base_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Vocabulary with the given names, counts n, n-1, ... so order is stable.
inline typevec::TypeVocabulary make_vocab(const std::vector<std::string>& names) {
    typevec::TypeVocabulary vocab;
    vocab.types = names;
    for (std::size_t i = 0; i < names.size(); ++i) {
        vocab.counts.push_back(static_cast<std::int64_t>(names.size() - i));
    }
    vocab.rebuild();
    return vocab;
}

}  // namespace testsupport
