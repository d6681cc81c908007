#include "ctk/census.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ctk {

double ShearParams::b() const {
    if (q < 1 || p < q) throw ConfigError("shear census requires integers p >= q >= 1");
    if (t_max < 2) throw ConfigError("shear census requires t_max >= 2");
    const double ratio2 = static_cast<double>(p) * p / (static_cast<double>(q) * q);
    const double T = t_max;
    return std::sqrt((ratio2 - 1.0) * 12.0 * (T - 1.0) / (T + 1.0));
}

double spherical_bessel(int n, double r) {
    if (n < 0) throw ConfigError("spherical Bessel order must be >= 0");
    if (r == 0.0) return n == 0 ? 1.0 : 0.0;
    const double j0 = std::sin(r) / r;
    if (n == 0) return j0;
    const double j1 = j0 / r - std::cos(r) / r;
    if (n == 1) return j1;
    if (r > n) {
        // upward recurrence, stable for r > n
        double jm = j0, jc = j1;
        for (int k = 1; k < n; ++k) {
            double jn = (2 * k + 1) / r * jc - jm;
            jm = jc;
            jc = jn;
        }
        return jc;
    }
    // downward Miller recurrence, normalized against j0
    const int start = n + 20 + static_cast<int>(std::sqrt(40.0 * n));
    double jp = 0.0, jc = 1e-30, target = 0.0;
    for (int k = start; k >= 0; --k) {
        double jm = (2 * k + 3) / r * jc - jp;
        jp = jc;
        jc = jm; // jc now holds j_k
        if (k == n) target = jc;
        if (std::abs(jc) > 1e100) {
            jc *= 1e-100;
            jp *= 1e-100;
            target *= 1e-100;
        }
    }
    if (jc == 0.0) throw NumericalError("spherical Bessel recurrence degenerated");
    return target * (j0 / jc);
}

std::pair<double, double> bessel_zero_bounds(int k1, int k2) {
    const double lo = M_PI * k1 + k2 - 3.75;
    const double base = M_PI * k1 + 0.5 * M_PI * k2 + 0.03;
    const double hi = base - (k2 + 0.5) * (k2 + 0.5) / (2.0 * base);
    return {lo, hi};
}

double bessel_zero(int k1, int k2) {
    if (k1 < 1 || k2 < 0) throw ConfigError("bessel_zero requires k1 >= 1, k2 >= 0");
    static std::map<std::pair<int, int>, double> cache;
    if (auto it = cache.find({k1, k2}); it != cache.end()) return it->second;
    // scan upward from the order (j_n > 0 on (0, n]) counting sign changes
    const double step = 0.1;
    double x = std::max(1e-6, static_cast<double>(k2));
    double fx = spherical_bessel(k2, x);
    int found = 0;
    const double xmax = M_PI * (k1 + k2) + 10.0 * (k2 + 1);
    while (x < xmax) {
        double x2 = x + step;
        double f2 = spherical_bessel(k2, x2);
        if ((fx > 0) != (f2 > 0)) {
            ++found;
            if (found == k1) {
                double lo = x, hi = x2;
                for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
                    double m = 0.5 * (lo + hi);
                    double fm = spherical_bessel(k2, m);
                    if ((fx > 0) != (fm > 0)) hi = m;
                    else lo = m, fx = fm;
                }
                double z = 0.5 * (lo + hi);
                cache[{k1, k2}] = z;
                return z;
            }
        }
        x = x2;
        fx = f2;
    }
    throw NumericalError("spherical Bessel zero bracketing failed");
}

namespace {

void sort_entries(std::vector<SpectrumEntry>& v) {
    std::sort(v.begin(), v.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        if (a.eigenvalue != b.eigenvalue) return a.eigenvalue > b.eigenvalue;
        if (a.k1 != b.k1) return a.k1 < b.k1;
        if (a.k2 != b.k2) return a.k2 < b.k2;
        if (a.k3 != b.k3) return a.k3 < b.k3;
        return a.zeta < b.zeta;
    });
}

// All entries with eigenvalue >= -cutoff, unsorted.
std::vector<SpectrumEntry> enumerate_up_to(CensusManifold m, double cutoff,
                                           const ShearParams& shear) {
    std::vector<SpectrumEntry> out;
    auto push = [&](double lam, int k1, int k2, int k3, int zeta, int nodal) {
        out.push_back({lam, k1, k2, k3, zeta, nodal});
    };
    switch (m) {
    case CensusManifold::Torus: {
        const int kmax = static_cast<int>(std::sqrt(cutoff)) + 1;
        for (int k1 = 0; k1 <= kmax; ++k1)
            for (int k2 = 0; k2 <= kmax; ++k2) {
                double lam = -static_cast<double>(k1) * k1 - static_cast<double>(k2) * k2;
                if (lam < -cutoff) continue;
                int nodal = std::max({4 * k1 * k2, 2 * k1, 2 * k2, 1});
                int mult = (k1 >= 1 ? 2 : 1) * (k2 >= 1 ? 2 : 1);
                for (int z = 0; z < mult; ++z) push(lam, k1, k2, 0, z, nodal);
            }
        break;
    }
    case CensusManifold::Cylinder: {
        const int kmax = static_cast<int>(std::sqrt(cutoff)) + 1;
        for (int k1 = 0; k1 <= kmax; ++k1)
            for (int k2 = 0; k2 <= kmax; ++k2) {
                double lam = -static_cast<double>(k1) * k1 - static_cast<double>(k2) * k2;
                if (lam < -cutoff) continue;
                int nodal = (k2 + 1) * std::max(2 * k1, 1);
                for (int z = 0; z < (k1 >= 1 ? 2 : 1); ++z) push(lam, k1, k2, 0, z, nodal);
            }
        break;
    }
    case CensusManifold::Ball: {
        const double amax = std::sqrt(cutoff);
        for (int k2 = 0;; ++k2) {
            if (bessel_zero(1, k2) > amax) break;
            for (int k1 = 1;; ++k1) {
                double a = bessel_zero(k1, k2);
                if (a > amax) break;
                double lam = -a * a;
                for (int k3 = 0; k3 <= k2; ++k3) {
                    int nodal = k1 * (k2 - k3 + 1) * std::max(2 * k3, 1);
                    for (int z = 0; z < (k3 >= 1 ? 2 : 1); ++z) push(lam, k1, k2, k3, z, nodal);
                }
            }
        }
        break;
    }
    case CensusManifold::Shear: {
        const double r2 = static_cast<double>(shear.p) * shear.p /
                          (static_cast<double>(shear.q) * shear.q);
        (void)shear.b(); // validates (p, q, t_max)
        const int k1max = static_cast<int>(std::sqrt(cutoff / r2)) + 1;
        const int k2max = static_cast<int>(std::sqrt(cutoff)) + 1;
        for (int k1 = 0; k1 <= k1max; ++k1)
            for (int k2 = 0; k2 <= k2max; ++k2) {
                double lam = -r2 * k1 * k1 - static_cast<double>(k2) * k2;
                if (lam < -cutoff) continue;
                int nodal = std::max(2 * k1, 1) * (k2 + 1);
                for (int z = 0; z < (k1 >= 1 ? 2 : 1); ++z) push(lam, k1, k2, 0, z, nodal);
            }
        break;
    }
    }
    return out;
}

} // namespace

std::vector<SpectrumEntry> enumerate_spectrum(CensusManifold m, int count,
                                              const ShearParams& shear) {
    if (count < 1) throw ConfigError("count must be >= 1");
    double cutoff = 16.0;
    std::vector<SpectrumEntry> all;
    for (;;) {
        all = enumerate_up_to(m, cutoff, shear);
        if (static_cast<int>(all.size()) >= count) break;
        cutoff *= 2.0;
    }
    sort_entries(all);
    all.resize(count);
    return all;
}

int rk_validity_threshold(CensusManifold m, const ShearParams& shear) {
    switch (m) {
    case CensusManifold::Torus: return 6;
    case CensusManifold::Cylinder: return 5;
    case CensusManifold::Ball: return 18;
    case CensusManifold::Shear: {
        double thr = M_PI * shear.p * shear.q + std::sqrt(2.0) * (shear.p + 2.0 * shear.q) + 1.0;
        return static_cast<int>(std::ceil(thr - 1e-12));
    }
    }
    throw ConfigError("unknown manifold");
}

namespace {

int formula_bound(CensusManifold m, int k, const ShearParams& shear) {
    const double dk = k;
    switch (m) {
    case CensusManifold::Torus:
        return std::max(
            static_cast<int>(std::ceil(2.0 * dk / M_PI - 4.7 * std::sqrt(dk) + 8.4)), 4);
    case CensusManifold::Cylinder:
        return std::max(
            static_cast<int>(std::ceil(2.0 * dk / M_PI - 2.7 * std::sqrt(dk) + 2.2)), 4);
    case CensusManifold::Ball: {
        double c = std::cbrt(dk) - 6.4;
        return std::max(static_cast<int>(std::ceil(0.119 * c * c * c)), 8);
    }
    case CensusManifold::Shear: {
        double pq = static_cast<double>(shear.p) * shear.q;
        return std::max(
            static_cast<int>(std::ceil(2.0 * dk / M_PI - 2.8 * std::sqrt(pq * dk) + 2.0 * pq)),
            2 * shear.q * (shear.p + 1));
    }
    }
    throw ConfigError("unknown manifold");
}

} // namespace

RkBound rk_lower_bound(CensusManifold m, int k, const ShearParams& shear) {
    const int kmin = rk_validity_threshold(m, shear);
    if (k < kmin)
        throw ConfigError("k = " + std::to_string(k) + " below validity threshold " +
                          std::to_string(kmin));

    RkBound out;
    out.k = k;
    auto spec = enumerate_spectrum(m, k, shear);
    out.lambda_k = spec[k - 1].eigenvalue;
    out.cheeger_bound = 2.0 * std::sqrt(-out.lambda_k);

    // enumerated r_k: max nodal count over ALL entries with eigenvalue >= lambda_k
    auto all = enumerate_up_to(m, -out.lambda_k + 1e-12, shear);
    int rk = 1;
    for (const auto& e : all)
        if (e.eigenvalue >= out.lambda_k - 1e-12) rk = std::max(rk, e.nodal_count);
    out.enumerated_r_k = rk;
    out.formula_value = formula_bound(m, k, shear);
    return out;
}

std::vector<RkBound> census_table(CensusManifold m, int k_min, int k_max,
                                  const ShearParams& shear) {
    const int kmin_valid = rk_validity_threshold(m, shear);
    if (k_min < kmin_valid)
        throw ConfigError("k_min below validity threshold " + std::to_string(kmin_valid));
    if (k_max < k_min) throw ConfigError("k_max < k_min");

    auto spec = enumerate_spectrum(m, k_max, shear);
    const double lambda_last = spec[k_max - 1].eigenvalue;
    auto all = enumerate_up_to(m, -lambda_last + 1e-12, shear);
    sort_entries(all);

    std::vector<RkBound> out;
    size_t j = 0;
    int running_max = 1;
    for (int k = 1; k <= k_max; ++k) {
        const double lam = spec[k - 1].eigenvalue;
        while (j < all.size() && all[j].eigenvalue >= lam - 1e-12)
            running_max = std::max(running_max, all[j++].nodal_count);
        if (k < k_min) continue;
        RkBound rb;
        rb.k = k;
        rb.lambda_k = lam;
        rb.cheeger_bound = 2.0 * std::sqrt(-lam);
        rb.enumerated_r_k = running_max;
        rb.formula_value = formula_bound(m, k, shear);
        out.push_back(rb);
    }
    return out;
}

} // namespace ctk
