#pragma once

namespace elbowsig {

/// Large-N uniform-null elbow baseline: (1 + 2/D)/k. Requires D >= 1, k >= 2.
double predicted_delta_large_n(int D, int k);

/// FCM null prediction:
/// [k^{1-m} - (k-1)^{1-m}] / [(k+1)^{1-m} - k^{1-m}] - 1. Requires k >= 2, m > 1.
double predicted_delta_fcm(int k, double m);

/// GMM log-heterogeneity null prediction: -ln(1 - k^{-2}) / ln(1 + 1/k).
/// Requires k >= 2.
double predicted_delta_gmm(int k);

}  // namespace elbowsig
