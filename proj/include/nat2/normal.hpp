#pragma once

namespace nat2 {

/// Standard normal density.
double normal_pdf(double z);

/// Phi(z), evaluated through erfc so both tails keep full relative accuracy.
double normal_cdf(double z);

/// Upper tail 1 - Phi(z).
double normal_upper_tail(double z);

/// Phi^{-1}(prob) for prob in (0, 1). Wichura's AS 241 rational
/// approximation followed by one Newton step against normal_cdf, so the
/// quantile and CDF here are mutually consistent to ~1e-15.
double normal_quantile(double prob);

/// Upper alpha-quantile z_alpha = Phi^{-1}(1 - alpha).
double normal_upper_quantile(double alpha);

}  // namespace nat2
