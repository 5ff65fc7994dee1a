#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "typevec/typer.hpp"

namespace typevec {

enum class MaskMode { dot, cosine };

std::string to_string(MaskMode mode);
MaskMode mask_mode_from_string(const std::string& name);

// Diagonal W = diag(w_1..w_|T|) weighting the similarity kernels. In cosine
// mode the weights live in [0,1] (maintained by clipping during training).
struct DiagonalMask {
    std::vector<double> weights;
    MaskMode mode = MaskMode::dot;

    static DiagonalMask ones(std::size_t n, MaskMode mode) {
        return {std::vector<double>(n, 1.0), mode};
    }
};

// All kernels accumulate in double precision and require both vectors to
// come from the same vocabulary. Undefined cosines (zero norm) raise
// numeric_error rather than returning 0.
double dot(const TypeVector& t1, const TypeVector& t2);
double cosine(const TypeVector& t1, const TypeVector& t2);
double masked_dot(const TypeVector& t1, const TypeVector& t2, const DiagonalMask& mask);
double masked_cosine(const TypeVector& t1, const TypeVector& t2, const DiagonalMask& mask);

// Dispatch on mask.mode.
double masked_similarity(const TypeVector& t1, const TypeVector& t2,
                         const DiagonalMask& mask);

}  // namespace typevec
