#pragma once

#include <span>

#include "uqeval/tensor.hpp"

namespace uqeval {

/// Shannon entropy in nats with 0 ln 0 = 0.
///
/// Entries in [-1e-9, 0) are treated as zero; anything more negative raises
/// NegativeProbability. The vector must sum to 1 within 1e-5 (NonNormalized
/// otherwise) and is renormalized by its sum before evaluation.
double shannon_entropy(std::span<const double> probs);

/// Mean over instances and samples (samples innermost).
BmaMap bma(const SampleGrid& grid);

/// Expected entropy (AU), predictive entropy (TU) and their difference (EU).
///
/// Samples are averaged within each instance first; AU is the mean of the
/// per-instance entropies and TU the entropy of the mean over instances.
/// EU below -1e-6 raises InvariantViolation, smaller negatives clamp to 0.
UncertaintyMaps decompose(const SampleGrid& grid);

/// "No EU" route for a single generative model: the N samples play the role
/// of the instance axis. Requires M == 1 and N > 1 (ShapeError otherwise).
UncertaintyMaps decompose_no_eu(const SampleGrid& grid);

}  // namespace uqeval
