#pragma once

// Exponent algebra of the nonlinear potentials, written once over a generic
// field type so the same expressions can be checked in exact arithmetic.

namespace nlpot::exponents {

template <class T>
T delta(T p) {
  return T(1) / (p - T(1));
}

/// (p-1)/(p-1-q): power of W sigma in the bilateral bound.
template <class T>
T gamma(T p, T q) {
  return (p - T(1)) / (p - T(1) - q);
}

/// q(p-1)/(p-1-q): power of kappa inside the intrinsic potential.
template <class T>
T kexp(T p, T q) {
  return q * (p - T(1)) / (p - T(1) - q);
}

/// W(lambda m) = lambda^{wolff_mass(p)} W m.
template <class T>
T wolff_mass(T p) {
  return delta(p);
}

/// kappa(E; lambda sigma) = lambda^{kappa_mass(q)} kappa(E; sigma).
template <class T>
T kappa_mass(T q) {
  return T(1) / q;
}

/// K(lambda sigma) = lambda^{intrinsic_mass(p, q)} K sigma.
template <class T>
T intrinsic_mass(T p, T q) {
  return kappa_mass(q) * kexp(p, q) * delta(p);
}

/// Solutions of u = W(u^q sigma) scale as lambda^{solution_mass(p, q)}.
template <class T>
T solution_mass(T p, T q) {
  return T(1) / (p - T(1) - q);
}

/// (W sigma)^gamma scales with exponent delta * gamma under sigma -> lambda sigma.
template <class T>
T wolff_power_mass(T p, T q) {
  return delta(p) * gamma(p, q);
}

/// Exponent of lambda picked up by phi_nu when nu -> lambda nu.
template <class T>
T phi_nu_scaling(T p, T q) {
  const T d = delta(p);
  const T w_nu = d;               // W nu
  const T inner = d * (q * d);    // W[(W nu)^q sigma]
  return w_nu + gamma(p, q) * (inner - w_nu);
}

/// Exponent of lambda picked up by the nested-potential audit ratio
/// W[(W nu)^q sigma] / (W nu)^{q/(p-1)} when nu -> lambda nu.
template <class T>
T nested_ratio_scaling(T p, T q) {
  const T d = delta(p);
  const T numerator = d * (q * d);
  const T denominator = (q / (p - T(1))) * d;
  return numerator - denominator;
}

}  // namespace nlpot::exponents
