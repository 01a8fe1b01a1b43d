#pragma once

namespace classex {

// Standard normal density.
double norm_pdf(double x);

// Standard normal CDF via erfc; absolute error below 1e-15 over the
// whole real line.
double norm_cdf(double x);

// Standard normal quantile (AS 241, double-precision branch).
// Relative accuracy about 1e-15 on (0,1); returns +-infinity at 1 and 0.
double norm_quantile(double p);

} // namespace classex
