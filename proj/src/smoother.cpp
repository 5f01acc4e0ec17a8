#include "mtid/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "mtid/io.hpp"

namespace mtid {

const std::vector<double>& Surface::deriv(const std::vector<int>& alpha) const {
    const auto it = derivatives.find(alpha);
    if (it == derivatives.end())
        throw std::out_of_range("surface: requested derivative was not computed");
    return it->second;
}

namespace {

void run_parallel(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 4;
    const unsigned t = threads > 0 ? static_cast<unsigned>(threads) : std::min(hw, 8u);
    if (t <= 1 || count < 2 * t) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t per = (count + t - 1) / t;
    for (unsigned i = 0; i < t; ++i) {
        const std::size_t a = i * per;
        const std::size_t b = std::min(count, a + per);
        if (a >= b) break;
        pool.emplace_back(body, a, b);
    }
    for (auto& th : pool) th.join();
}

inline double epanechnikov(double u) {
    const double a = 1.0 - u * u;
    return a > 0.0 ? 0.75 * a : 0.0;
}

// exponent tuples 0..p per dimension, dimension 0 slowest
std::vector<std::vector<int>> tensor_exponents(int dim, int p) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(dim, 0);
    for (;;) {
        out.push_back(cur);
        int d = dim - 1;
        while (d >= 0) {
            if (++cur[d] <= p) break;
            cur[d] = 0;
            --d;
        }
        if (d < 0) break;
    }
    return out;
}

double factorial_product(const std::vector<int>& alpha) {
    double f = 1.0;
    for (int a : alpha)
        for (int i = 2; i <= a; ++i) f *= i;
    return f;
}

} // namespace

std::vector<Surface> fit_local_poly_multi(const std::vector<double>& x,
                                          const std::vector<const std::vector<double>*>& responses,
                                          const Grid& grid, const FitOptions& opt) {
    const int d = grid.dim();
    if (d < 1) throw std::invalid_argument("fit: empty grid");
    if (x.size() % d != 0) throw std::invalid_argument("fit: point array does not match grid dim");
    const std::size_t n = x.size() / d;
    if (n == 0) throw std::invalid_argument("fit: empty sample");
    if (responses.empty()) throw std::invalid_argument("fit: no responses");
    for (const auto* r : responses)
        if (r->size() != n) throw std::invalid_argument("fit: response length mismatch");
    if (static_cast<int>(opt.bandwidth.size()) != d)
        throw std::invalid_argument("fit: bandwidth must have one entry per dimension");
    for (double h : opt.bandwidth)
        if (!(h > 0.0)) throw std::invalid_argument("fit: bandwidths must be positive");
    int max_req = 0;
    for (const auto& a : opt.derivatives) {
        if (static_cast<int>(a.size()) != d)
            throw std::invalid_argument("fit: derivative multi-index has wrong dimension");
        for (int e : a) max_req = std::max(max_req, e);
    }
    if (opt.poly_order < 1 || opt.poly_order < max_req)
        throw std::invalid_argument("fit: poly_order must cover the requested derivative orders");

    const auto expo = tensor_exponents(d, opt.poly_order);
    const int m = static_cast<int>(expo.size());

    // column lookup for requested derivatives
    std::vector<int> dcol(opt.derivatives.size(), -1);
    for (std::size_t r = 0; r < opt.derivatives.size(); ++r) {
        for (int c = 0; c < m; ++c)
            if (expo[c] == opt.derivatives[r]) dcol[r] = c;
    }

    // sort point indices along dimension 0 for windowed gathering
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return x[a * d] < x[b * d]; });
    std::vector<double> sorted0(n);
    for (std::size_t i = 0; i < n; ++i) sorted0[i] = x[order[i] * d];

    const std::size_t nodes = grid.size();
    const std::size_t nr = responses.size();

    std::vector<Surface> out(nr);
    for (auto& s : out) {
        s.grid = grid;
        s.values.assign(nodes, 0.0);
        s.ess.assign(nodes, 0.0);
        s.reliable.assign(nodes, 0);
        s.bandwidth = opt.bandwidth;
        for (const auto& a : opt.derivatives) s.derivatives[a].assign(nodes, 0.0);
    }

    run_parallel(nodes, opt.threads, [&](std::size_t lo, std::size_t hi) {
        Eigen::MatrixXd A(m, m);
        Eigen::MatrixXd B(m, nr);
        std::vector<double> phi(m);
        std::vector<double> dx(d);
        std::vector<int> mi;
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const auto node = grid.node(idx);
            A.setZero();
            B.setZero();
            double wsum = 0.0, w2sum = 0.0;

            const double lo0 = node[0] - opt.bandwidth[0];
            const double hi0 = node[0] + opt.bandwidth[0];
            const auto it0 = std::lower_bound(sorted0.begin(), sorted0.end(), lo0);
            const auto it1 = std::upper_bound(sorted0.begin(), sorted0.end(), hi0);

            for (auto it = it0; it != it1; ++it) {
                const std::uint32_t i = order[it - sorted0.begin()];
                double w = 1.0;
                bool inside = true;
                for (int c = 0; c < d; ++c) {
                    const double u = (x[i * d + c] - node[c]) / opt.bandwidth[c];
                    const double kv = epanechnikov(u);
                    if (kv <= 0.0) {
                        inside = false;
                        break;
                    }
                    w *= kv;
                    dx[c] = u;  // bandwidth-scaled monomials keep the solve well conditioned
                }
                if (!inside) continue;

                // tensor monomials, built incrementally along the exponent list
                for (int c = 0; c < m; ++c) {
                    double p = 1.0;
                    for (int e = 0; e < d; ++e)
                        for (int rep = 0; rep < expo[c][e]; ++rep) p *= dx[e];
                    phi[c] = p;
                }
                wsum += w;
                w2sum += w * w;
                for (int a = 0; a < m; ++a) {
                    const double wa = w * phi[a];
                    for (int b = a; b < m; ++b) A(a, b) += wa * phi[b];
                    for (std::size_t r = 0; r < nr; ++r) B(a, r) += wa * (*responses[r])[i];
                }
            }
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < a; ++b) A(a, b) = A(b, a);

            const double ess = w2sum > 0.0 ? wsum * wsum / w2sum : 0.0;
            bool ok = ess >= opt.min_ess;
            Eigen::MatrixXd beta;
            if (wsum > 0.0) {
                Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
                if (ldlt.info() == Eigen::Success) {
                    beta = ldlt.solve(B);
                    const double resid = (A * beta - B).norm();
                    if (!(resid <= 1e-6 * (1.0 + B.norm()))) ok = false;
                } else {
                    ok = false;
                }
                if (!beta.size()) {
                    beta = Eigen::MatrixXd::Zero(m, nr);
                    ok = false;
                }
            } else {
                beta = Eigen::MatrixXd::Zero(m, nr);
                ok = false;
            }

            for (std::size_t r = 0; r < nr; ++r) {
                out[r].values[idx] = beta(0, r);
                out[r].ess[idx] = ess;
                out[r].reliable[idx] = ok ? 1 : 0;
                for (std::size_t q = 0; q < opt.derivatives.size(); ++q) {
                    const auto& a = opt.derivatives[q];
                    double scale = factorial_product(a);
                    for (int c = 0; c < d; ++c)
                        for (int e = 0; e < a[c]; ++e) scale /= opt.bandwidth[c];
                    out[r].derivatives[a][idx] = dcol[q] >= 0 ? beta(dcol[q], r) * scale : 0.0;
                }
            }
        }
    });
    return out;
}

Surface fit_local_poly(const std::vector<double>& x, const std::vector<double>& response,
                       const Grid& grid, const FitOptions& opt) {
    std::vector<const std::vector<double>*> rs{&response};
    return std::move(fit_local_poly_multi(x, rs, grid, opt).front());
}

// --- finite differences -----------------------------------------------------

namespace {

struct Stencil {
    std::vector<std::pair<int, double>> taps;  // (offset multiplier, coefficient)
};

Stencil stencil_1d(int order, double h) {
    Stencil s;
    switch (order) {
        case 0:
            s.taps = {{0, 1.0}};
            break;
        case 1:
            s.taps = {{-1, -0.5 / h}, {1, 0.5 / h}};
            break;
        case 2:
            s.taps = {{-1, 1.0 / (h * h)}, {0, -2.0 / (h * h)}, {1, 1.0 / (h * h)}};
            break;
        default:
            throw std::invalid_argument("finite_diff: derivative order per dimension must be <= 2");
    }
    return s;
}

double apply_stencil(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& point, const std::vector<int>& alpha, double h) {
    const int d = static_cast<int>(point.size());
    std::vector<Stencil> st(d);
    for (int c = 0; c < d; ++c) st[c] = stencil_1d(alpha[c], h);

    std::vector<std::size_t> cursor(d, 0);
    std::vector<double> xp(point);
    double total = 0.0;
    for (;;) {
        double coef = 1.0;
        for (int c = 0; c < d; ++c) {
            const auto& [off, w] = st[c].taps[cursor[c]];
            xp[c] = point[c] + off * h;
            coef *= w;
        }
        total += coef * f(xp);
        int c = d - 1;
        while (c >= 0) {
            if (++cursor[c] < st[c].taps.size()) break;
            cursor[c] = 0;
            --c;
        }
        if (c < 0) break;
    }
    return total;
}

} // namespace

double finite_diff(const std::function<double(const std::vector<double>&)>& f,
                   const std::vector<double>& point, const std::vector<int>& alpha,
                   const FiniteDiffOptions& opt) {
    const int d = static_cast<int>(point.size());
    if (static_cast<int>(alpha.size()) != d)
        throw std::invalid_argument("finite_diff: multi-index dimension mismatch");
    if (!(opt.step > 0.0)) throw std::invalid_argument("finite_diff: step must be positive");

    std::vector<double> lo = opt.domain_lo.empty() ? std::vector<double>(d, 0.0) : opt.domain_lo;
    std::vector<double> hi = opt.domain_hi.empty() ? std::vector<double>(d, 1.0) : opt.domain_hi;
    for (int c = 0; c < d; ++c) {
        if (alpha[c] == 0) continue;
        if (point[c] - opt.step < lo[c] || point[c] + opt.step > hi[c])
            throw std::domain_error("finite_diff: stencil exits the domain");
    }

    const double dh = apply_stencil(f, point, alpha, opt.step);
    if (!opt.richardson) return dh;
    const double dh2 = apply_stencil(f, point, alpha, opt.step / 2.0);
    return (4.0 * dh2 - dh) / 3.0;
}

Surface surface_from_function(const Grid& grid,
                              const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<std::vector<int>>& derivatives,
                              const FiniteDiffOptions& opt, double noise_floor) {
    Surface s;
    s.grid = grid;
    s.noise_floor = noise_floor;
    const std::size_t n = grid.size();
    s.values.resize(n);
    for (const auto& a : derivatives) s.derivatives[a].assign(n, 0.0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        const auto node = grid.node(idx);
        s.values[idx] = f(node);
        for (const auto& a : derivatives)
            s.derivatives[a][idx] = finite_diff(f, node, a, opt);
    }
    return s;
}

std::vector<double> bandwidth_rule(const std::vector<double>& x, int dim,
                                   const std::vector<int>& target_derivative, int poly_order) {
    if (dim < 1 || x.size() % dim != 0) throw std::invalid_argument("bandwidth_rule: bad points");
    const std::size_t n = x.size() / dim;
    if (n < 100) throw std::invalid_argument("bandwidth_rule: need at least 100 points");
    if (static_cast<int>(target_derivative.size()) != dim)
        throw std::invalid_argument("bandwidth_rule: derivative index dimension mismatch");

    int total_order = 0;
    for (int a : target_derivative) total_order += a;
    const double rate = std::pow(static_cast<double>(n),
                                 -1.0 / (2.0 * poly_order + dim + 2.0));
    const double inflate = std::pow(1.5, total_order);

    std::vector<double> bw(dim);
    for (int c = 0; c < dim; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += x[i * dim + c];
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dd = x[i * dim + c] - mean;
            var += dd * dd;
        }
        var /= (n - 1);
        if (!(var > 0.0))
            throw std::invalid_argument("bandwidth_rule: degenerate dimension (zero variance)");
        bw[c] = std::sqrt(var) * rate * inflate;
    }
    return bw;
}

// --- persistence -------------------------------------------------------------

namespace {
std::string alpha_name(const std::vector<int>& a) {
    std::string s = "d";
    for (int e : a) s += "_" + std::to_string(e);
    return s;
}
} // namespace

void Surface::save(const std::string& path) const {
    ColumnarFile f;
    f.meta["dims"] = std::to_string(grid.dim());
    {
        std::string sh;
        for (const auto& k : grid.knots) sh += (sh.empty() ? "" : " ") + std::to_string(k.size());
        f.meta["shape"] = sh;
    }
    for (int c = 0; c < grid.dim(); ++c) {
        std::string ks;
        for (double v : grid.knots[c]) ks += (ks.empty() ? "" : " ") + format_g17(v);
        f.meta["knots" + std::to_string(c)] = ks;
    }
    if (!bandwidth.empty()) {
        std::string bs;
        for (double v : bandwidth) bs += (bs.empty() ? "" : " ") + format_g17(v);
        f.meta["bandwidth"] = bs;
    }
    f.meta["noise_floor"] = format_g17(noise_floor);

    f.columns = {"value"};
    for (const auto& [a, t] : derivatives) f.columns.push_back(alpha_name(a));
    const bool diag = !ess.empty();
    if (diag) {
        f.columns.push_back("ess");
        f.columns.push_back("reliable");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::vector<std::string> row{format_g17(values[i])};
        for (const auto& [a, t] : derivatives) row.push_back(format_g17(t[i]));
        if (diag) {
            row.push_back(format_g17(ess[i]));
            row.push_back(std::to_string(static_cast<int>(reliable[i])));
        }
        f.rows.push_back(std::move(row));
    }
    write_file(path, f.serialize("mtid-surface v1"));
}

Surface Surface::load(const std::string& path) {
    const auto f = ColumnarFile::parse(read_file(path), "mtid-surface v1");
    Surface s;
    const int dims = std::stoi(f.meta.at("dims"));
    std::vector<std::vector<double>> knots(dims);
    for (int c = 0; c < dims; ++c) {
        std::istringstream ks(f.meta.at("knots" + std::to_string(c)));
        double v;
        while (ks >> v) knots[c].push_back(v);
    }
    s.grid = Grid(std::move(knots));
    if (f.meta.count("bandwidth")) {
        std::istringstream bs(f.meta.at("bandwidth"));
        double v;
        while (bs >> v) s.bandwidth.push_back(v);
    }
    s.noise_floor = parse_double(f.meta.at("noise_floor"));

    std::vector<std::vector<int>> dnames;
    std::vector<int> dcols;
    int ess_col = -1, rel_col = -1;
    for (std::size_t c = 0; c < f.columns.size(); ++c) {
        const std::string& name = f.columns[c];
        if (name == "value") continue;
        if (name == "ess") { ess_col = static_cast<int>(c); continue; }
        if (name == "reliable") { rel_col = static_cast<int>(c); continue; }
        if (name.size() > 1 && name[0] == 'd') {
            std::vector<int> a;
            std::string tok;
            for (std::size_t p = 1; p <= name.size(); ++p) {
                if (p == name.size() || name[p] == '_') {
                    if (!tok.empty()) a.push_back(std::stoi(tok));
                    tok.clear();
                } else {
                    tok += name[p];
                }
            }
            dnames.push_back(a);
            dcols.push_back(static_cast<int>(c));
        }
    }
    const std::size_t n = f.rows.size();
    s.values.resize(n);
    for (const auto& a : dnames) s.derivatives[a].assign(n, 0.0);
    if (ess_col >= 0) {
        s.ess.assign(n, 0.0);
        s.reliable.assign(n, 0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        s.values[i] = parse_double(f.rows[i][0]);
        for (std::size_t q = 0; q < dnames.size(); ++q)
            s.derivatives[dnames[q]][i] = parse_double(f.rows[i][dcols[q]]);
        if (ess_col >= 0) {
            s.ess[i] = parse_double(f.rows[i][ess_col]);
            s.reliable[i] = static_cast<std::uint8_t>(std::stoi(f.rows[i][rel_col]));
        }
    }
    return s;
}

} // namespace mtid
