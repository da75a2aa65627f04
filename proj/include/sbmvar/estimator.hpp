#pragma once

// Connection-probability estimators: the hard-label empirical-mean estimator
// built on a variational fit, and the comparison estimators.

#include "sbmvar/netcore.hpp"
#include "sbmvar/varem.hpp"

namespace sbmvar {

/// Row-wise argmax of tau; ties go to the smallest community index.
LabelAssignment extract_labels(const VariationalPosterior& tau);

struct VarThetaResult {
  LabelAssignment labels;
  BlockMatrix q;  // empirical block means on observed entries, clamped to [1e-9, 1 - 1e-9]
  ThetaMatrix theta;
};

VarThetaResult var_theta(const AdjacencyMatrix& a, const SamplingMask& x,
                         const VariationalPosterior& tau);

/// Same empirical-mean construction with the planted labels.
ThetaMatrix oracle_theta(const AdjacencyMatrix& a, const SamplingMask& x,
                         const LabelAssignment& z_true);

/// Constant observed edge density sum(X.*A) / sum(X); 0.5 when X is empty.
/// Under full observation this is the mean degree divided by n - 1.
ThetaMatrix trivial_theta(const AdjacencyMatrix& a, const SamplingMask& x);

/// A_ij on observed pairs; mean observed degree / n on missing pairs.
ThetaMatrix naive_persistent_theta(const AdjacencyMatrix& a, const SamplingMask& x);

}  // namespace sbmvar
