#include <cmath>
#include <limits>

#include "medmediate/errors.hpp"
#include "medmediate/joint_mediators.hpp"
#include "medmediate/normal.hpp"

namespace medmediate {

namespace {

// Gauss-Legendre half-rules (negative nodes) used by Genz's BVND:
// 6-, 12- and 20-point rules depending on |rho|.
constexpr double kX3[3] = {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970};
constexpr double kW3[3] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr double kX6[6] = {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                           -0.5873179542866171, -0.3678314989981802, -0.1252334085114692};
constexpr double kW6[6] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                           0.2031674267230659, 0.2334925365383547, 0.2491470458134029};
constexpr double kX10[10] = {-0.9931285991850949,  -0.9639719272779138, -0.9122344282513259,
                             -0.8391169718222188,  -0.7463319064601508, -0.6360536807265150,
                             -0.5108670019508271,  -0.3737060887154196, -0.2277858511416451,
                             -0.07652652113349733};
constexpr double kW10[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                             0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                             0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                             0.1527533871307259};

// Genz's BVND: P(X > dh, Y > dk) for standard bivariate normal with
// correlation r (Drezner-Wesolowsky reformulation with a transformed
// high-correlation branch).
double bvnd(double dh, double dk, double r) {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double* xs;
    const double* ws;
    int lg;
    const double ar = std::abs(r);
    if (ar < 0.3) {
        xs = kX3;
        ws = kW3;
        lg = 3;
    } else if (ar < 0.75) {
        xs = kX6;
        ws = kW6;
        lg = 6;
    } else {
        xs = kX10;
        ws = kW10;
        lg = 10;
    }
    double h = dh;
    double k = dk;
    double hk = h * k;
    double bvn = 0.0;
    if (ar < 0.925) {
        if (ar > 0.0) {
            const double hs = 0.5 * (h * h + k * k);
            const double asr = std::asin(r);
            for (int i = 0; i < lg; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    const double sn = std::sin(0.5 * asr * (is * xs[i] + 1.0));
                    bvn += ws[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
                }
            }
            bvn *= asr / (2.0 * kTwoPi);
        }
        bvn += norm_cdf(-h) * norm_cdf(-k);
    } else {
        if (r < 0.0) {
            k = -k;
            hk = -hk;
        }
        const double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        const double bs = (h - k) * (h - k);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 16.0;
        double asr = -0.5 * (bs / as + hk);
        if (asr > -100.0)
            bvn = a * std::exp(asr) *
                  (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (-hk < 100.0) {
            const double b = std::sqrt(bs);
            bvn -= std::exp(-0.5 * hk) * std::sqrt(kTwoPi) * norm_cdf(-b / a) * b *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a *= 0.5;
        for (int i = 0; i < lg; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                const double x = a * (is * xs[i] + 1.0);
                const double xsq = x * x;
                asr = -0.5 * (bs / xsq + hk);
                if (asr > -100.0) {
                    const double rs = std::sqrt(1.0 - xsq);
                    bvn += a * ws[i] * std::exp(asr) *
                           (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                            (1.0 + c * xsq * (1.0 + d * xsq)));
                }
            }
        }
        bvn = -bvn / kTwoPi;
        if (r > 0.0) {
            bvn += norm_cdf(-std::max(h, k));
        } else {
            bvn = -bvn;
            if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
        }
    }
    return bvn;
}

}  // namespace

double bvn_cdf(double a, double b, double rho) {
    if (!(std::abs(rho) < 1.0)) throw UsageError("bvn_cdf: |rho| must be < 1");
    if (std::isnan(a) || std::isnan(b)) throw UsageError("bvn_cdf: NaN argument");
    if (a == -std::numeric_limits<double>::infinity() ||
        b == -std::numeric_limits<double>::infinity())
        return 0.0;
    if (a == std::numeric_limits<double>::infinity()) return norm_cdf(b);
    if (b == std::numeric_limits<double>::infinity()) return norm_cdf(a);
    const double p = bvnd(-a, -b, rho);
    return std::min(1.0, std::max(0.0, p));
}

}  // namespace medmediate
