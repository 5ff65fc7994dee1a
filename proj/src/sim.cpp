#include "typevec/sim.hpp"

#include <cmath>

#include "typevec/errors.hpp"

namespace typevec {

namespace {

void check_same_vocabulary(const TypeVector& t1, const TypeVector& t2) {
    if (t1.vocab_id != t2.vocab_id || t1.size() != t2.size()) {
        throw data_error("similarity over vectors from different vocabularies");
    }
}

void check_mask(const TypeVector& t, const DiagonalMask& mask, MaskMode expected) {
    if (mask.mode != expected) {
        throw data_error("mask mode is " + to_string(mask.mode) + ", expected " +
                         to_string(expected));
    }
    if (mask.weights.size() != t.size()) {
        throw data_error("mask length " + std::to_string(mask.weights.size()) +
                         " != vector length " + std::to_string(t.size()));
    }
}

}  // namespace

std::string to_string(MaskMode mode) {
    return mode == MaskMode::dot ? "dot" : "cosine";
}

MaskMode mask_mode_from_string(const std::string& name) {
    if (name == "dot") return MaskMode::dot;
    if (name == "cosine") return MaskMode::cosine;
    throw data_error("unknown scorer mode '" + name + "' (expected dot or cosine)");
}

double dot(const TypeVector& t1, const TypeVector& t2) {
    check_same_vocabulary(t1, t2);
    double acc = 0.0;
    for (std::size_t j = 0; j < t1.size(); ++j) acc += t1.probs[j] * t2.probs[j];
    return acc;
}

double cosine(const TypeVector& t1, const TypeVector& t2) {
    check_same_vocabulary(t1, t2);
    double num = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t j = 0; j < t1.size(); ++j) {
        num += t1.probs[j] * t2.probs[j];
        n1 += t1.probs[j] * t1.probs[j];
        n2 += t2.probs[j] * t2.probs[j];
    }
    if (n1 <= 0.0 || n2 <= 0.0) {
        throw numeric_error("cosine undefined for a zero-norm vector");
    }
    return num / (std::sqrt(n1) * std::sqrt(n2));
}

double masked_dot(const TypeVector& t1, const TypeVector& t2, const DiagonalMask& mask) {
    check_same_vocabulary(t1, t2);
    check_mask(t1, mask, MaskMode::dot);
    double acc = 0.0;
    for (std::size_t j = 0; j < t1.size(); ++j) {
        acc += mask.weights[j] * (t1.probs[j] * t2.probs[j]);
    }
    return acc;
}

double masked_cosine(const TypeVector& t1, const TypeVector& t2,
                     const DiagonalMask& mask) {
    check_same_vocabulary(t1, t2);
    check_mask(t1, mask, MaskMode::cosine);
    double num = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t j = 0; j < t1.size(); ++j) {
        const double w = mask.weights[j];
        if (!(w >= 0.0 && w <= 1.0)) {
            throw data_error("cosine-mode mask weight " + std::to_string(w) +
                             " outside [0,1] at index " + std::to_string(j));
        }
        num += w * (t1.probs[j] * t2.probs[j]);
        n1 += w * t1.probs[j] * t1.probs[j];
        n2 += w * t2.probs[j] * t2.probs[j];
    }
    if (n1 <= 0.0 || n2 <= 0.0) {
        throw numeric_error("masked cosine undefined: zero weighted norm");
    }
    return num / (std::sqrt(n1) * std::sqrt(n2));
}

double masked_similarity(const TypeVector& t1, const TypeVector& t2,
                         const DiagonalMask& mask) {
    return mask.mode == MaskMode::dot ? masked_dot(t1, t2, mask)
                                      : masked_cosine(t1, t2, mask);
}

}  // namespace typevec
