#pragma once
#include <string>
#include <vector>

#include "ctk/grid.hpp"

namespace ctk {

enum class CensusManifold { Torus, Cylinder, Ball, Shear };

// Shear census parameters: integers p >= q >= 1 define the rational frequency
// ratio sqrt(1 + b^2(|T|+1)/(12(|T|-1))) = p/q; b is derived from (p, q, t_max).
struct ShearParams {
    int p = 2, q = 1;
    int t_max = 2; // number of time slices, |T| = t_max
    double b() const;
};

struct SpectrumEntry {
    double eigenvalue = 0.0; // <= 0
    int k1 = 0, k2 = 0, k3 = 0;
    int zeta = 0;          // phase index (0 or 1) where applicable
    int nodal_count = 1;
};

// First `count` analytic eigenvalues (with multiplicity) sorted decreasing,
// ties broken by lexicographic quantum numbers. zeta-multiplicity rules are
// enforced (zeta = 0 forced when the rotating index vanishes).
std::vector<SpectrumEntry> enumerate_spectrum(CensusManifold m, int count,
                                              const ShearParams& shear = {});

// k1-th positive zero of the k2-th spherical Bessel function: sign-change scan
// from the previous zero plus bisection to 1e-10. Throws NumericalError on
// bracketing failure.
double bessel_zero(int k1, int k2);

// Spherical Bessel function of the first kind (upward recurrence for r > n,
// downward Miller recurrence otherwise).
double spherical_bessel(int n, double r);

// The paper-style bracketing interval (lo, hi) for alpha_{k1,k2}. NOTE: the
// simplified upper bound is analytically false at (k1,k2) = (1,0), where the
// zero equals pi; see the tests for the documented exception.
std::pair<double, double> bessel_zero_bounds(int k1, int k2);

struct RkBound {
    int k = 0;
    double lambda_k = 0.0;
    int formula_value = 0;
    int enumerated_r_k = 0;
    double cheeger_bound = 0.0; // 2 sqrt(-lambda_k)
};

// Closed-form lower bound for r_k and the enumerated value (max nodal count
// over entries with eigenvalue >= lambda_k). Throws ConfigError for k below
// the formula's validity threshold.
RkBound rk_lower_bound(CensusManifold m, int k, const ShearParams& shear = {});

// Smallest valid k for rk_lower_bound.
int rk_validity_threshold(CensusManifold m, const ShearParams& shear = {});

// rk_lower_bound for every k in [k_min, k_max] from a single enumeration pass
// (the per-k variant re-enumerates and is quadratic over a range).
std::vector<RkBound> census_table(CensusManifold m, int k_min, int k_max,
                                  const ShearParams& shear = {});

} // namespace ctk
