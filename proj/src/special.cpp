#include "mtid/special.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mtid {

double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Wichura (1988), algorithm AS 241, PPND16.
double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_quantile: p must be in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

namespace {

// Genz's hybrid algorithm (Drezner-Wesolowsky for moderate rho, tail
// expansion for |rho| near one). Returns the upper orthant probability
// Pr(X > dh, Y > dk).
double bvnu(double dh, double dk, double r) {
    static const double x6[] = {-0.9324695142031522, -0.6612093864662647,
                                -0.2386191860831970};
    static const double w6[] = {0.1713244923791705, 0.3607615730481384,
                                0.4679139345726904};
    static const double x12[] = {-0.9815606342467191, -0.9041172563704750,
                                 -0.7699026741943050, -0.5873179542866171,
                                 -0.3678314989981802, -0.1252334085114692};
    static const double w12[] = {0.04717533638651177, 0.1069393259953183,
                                 0.1600783285433464,  0.2031674267230659,
                                 0.2334925365383547,  0.2491470458134029};
    static const double x20[] = {-0.9931285991850949, -0.9639719272779138,
                                 -0.9122344282513259, -0.8391169718222188,
                                 -0.7463319064601508, -0.6360536807265150,
                                 -0.5108670019508271, -0.3737060887154196,
                                 -0.2277858511416451, -0.07652652113349733};
    static const double w20[] = {0.01761400713915212, 0.04060142980038694,
                                 0.06267204833410906, 0.08327674157670475,
                                 0.1019301198172404,  0.1181945319615184,
                                 0.1316886384491766,  0.1420961093183821,
                                 0.1491729864726037,  0.1527533871307259};
    const double twopi = 6.283185307179586477;

    const double* xg;
    const double* wg;
    int lg;
    if (std::fabs(r) < 0.3) {
        xg = x6; wg = w6; lg = 3;
    } else if (std::fabs(r) < 0.75) {
        xg = x12; wg = w12; lg = 6;
    } else {
        xg = x20; wg = w20; lg = 10;
    }

    double h = dh, k = dk;
    double hk = h * k;
    double bvn = 0.0;
    if (std::fabs(r) < 0.925) {
        if (std::fabs(r) > 0.0) {
            const double hs = (h * h + k * k) / 2.0;
            const double asr = std::asin(r);
            for (int i = 0; i < lg; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    const double sn = std::sin(asr * (is * xg[i] + 1.0) / 2.0);
                    bvn += wg[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
                }
            }
            bvn = bvn * asr / (2.0 * twopi);
        }
        bvn += norm_cdf(-h) * norm_cdf(-k);
    } else {
        if (r < 0.0) {
            k = -k;
            hk = -hk;
        }
        if (std::fabs(r) < 1.0) {
            const double as = (1.0 - r) * (1.0 + r);
            double a = std::sqrt(as);
            const double bs = (h - k) * (h - k);
            const double c = (4.0 - hk) / 8.0;
            const double d = (12.0 - hk) / 16.0;
            double asr = -(bs / as + hk) / 2.0;
            if (asr > -100.0)
                bvn = a * std::exp(asr) *
                      (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 +
                       c * d * as * as / 5.0);
            if (-hk < 100.0) {
                const double b = std::sqrt(bs);
                bvn -= std::exp(-hk / 2.0) * std::sqrt(twopi) * norm_cdf(-b / a) *
                       b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a /= 2.0;
            for (int i = 0; i < lg; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    const double xs_ = a * (is * xg[i] + 1.0);
                    const double xs = xs_ * xs_;
                    const double rs = std::sqrt(1.0 - xs);
                    asr = -(bs / xs + hk) / 2.0;
                    if (asr > -100.0) {
                        bvn += a * wg[i] * std::exp(asr) *
                               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                                (1.0 + c * xs * (1.0 + d * xs)));
                    }
                }
            }
            bvn = -bvn / twopi;
        }
        if (r > 0.0) {
            bvn += norm_cdf(-std::max(h, k));
        } else {
            bvn = -bvn;
            if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
        }
    }
    return bvn;
}

} // namespace

double bvn_cdf(double x, double y, double rho) {
    if (!(rho > -1.0 && rho < 1.0)) {
        if (rho >= 1.0) return norm_cdf(std::min(x, y));
        // rho == -1: comonotone opposite
        double v = norm_cdf(x) + norm_cdf(y) - 1.0;
        return v > 0.0 ? v : 0.0;
    }
    return bvnu(-x, -y, rho);
}

const GaussLegendre& gauss_legendre(int n) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex m;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        gl.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        gl.weights[n - 1 - i] = gl.weights[i];
    }
    auto [pos, ok] = cache.emplace(n, std::move(gl));
    (void)ok;
    return pos->second;
}

double mvn_cdf(const std::vector<double>& x, const Eigen::MatrixXd& R) {
    const int d = static_cast<int>(x.size());
    if (R.rows() != d || R.cols() != d)
        throw std::invalid_argument("mvn_cdf: dimension mismatch");
    if (d == 0) return 1.0;
    if (d == 1) return norm_cdf(x[0]);
    if (d == 2) return bvn_cdf(x[0], x[1], R(0, 1));

    const double cap = 8.5;
    // Condition on the last coordinate; the conditional correlations do not
    // depend on the integration variable.
    const int m = d - 1;
    std::vector<double> s(m);
    for (int i = 0; i < m; ++i) {
        double rij = R(i, m);
        s[i] = std::sqrt(std::max(1e-14, 1.0 - rij * rij));
    }
    Eigen::MatrixXd Rc(m, m);
    for (int i = 0; i < m; ++i) {
        Rc(i, i) = 1.0;
        for (int j = i + 1; j < m; ++j) {
            double v = (R(i, j) - R(i, m) * R(j, m)) / (s[i] * s[j]);
            v = std::clamp(v, -1.0, 1.0);
            Rc(i, j) = Rc(j, i) = v;
        }
    }
    if (x[d - 1] >= cap) {
        std::vector<double> xc(x.begin(), x.end() - 1);
        return mvn_cdf(xc, R.topLeftCorner(m, m));
    }
    if (x[d - 1] <= -cap) return 0.0;

    const auto& gl = gauss_legendre(48);
    const double lo = -cap, hi = x[d - 1];
    const double c1 = (hi - lo) / 2.0, c2 = (hi + lo) / 2.0;
    double total = 0.0;
    std::vector<double> xc(m);
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double t = c1 * gl.nodes[q] + c2;
        for (int i = 0; i < m; ++i) xc[i] = (x[i] - R(i, m) * t) / s[i];
        total += gl.weights[q] * norm_pdf(t) * mvn_cdf(xc, Rc);
    }
    return c1 * total;
}

} // namespace mtid
