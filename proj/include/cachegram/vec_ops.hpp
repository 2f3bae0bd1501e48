// Copyright (c) 2026 The cachegram authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace cachegram {

// Level-1 kernels for the training hot path. Plain sequential loops: the
// compiler vectorizes them, and a fixed evaluation order keeps single-worker
// runs bit-reproducible.

inline float dot(const float* a, const float* b, int n) {
    float sum = 0.0f;
    for (int i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

// y += alpha * x
inline void axpy(float alpha, const float* x, float* y, int n) {
    for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

inline void copy(const float* x, float* y, int n) {
    for (int i = 0; i < n; ++i) y[i] = x[i];
}

inline void fill_zero(float* x, int n) {
    for (int i = 0; i < n; ++i) x[i] = 0.0f;
}

}  // namespace cachegram
