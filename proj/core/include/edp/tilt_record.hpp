#pragma once

namespace edp {

// A solved exponential tilt pi^t(x) = e^{tx} p(x) / Phi(t).
struct TiltRecord {
  enum class Method { Quadrature, Asymptotic };

  struct Window {
    double centre = 0.0;      // x_hat = psi(t), or the support boundary
    double sigma = 0.0;       // (h'(x_hat))^{-1/2}
    double half_width = 0.0;  // core window half width before tail extension
    double lo = 0.0;          // integration range actually used
    double hi = 0.0;
  };

  double t = 0.0;
  double log_phi = 0.0;
  double m = 0.0;
  double s2 = 0.0;
  double mu3 = 0.0;
  Method method = Method::Quadrature;
  Window window;
};

}  // namespace edp
