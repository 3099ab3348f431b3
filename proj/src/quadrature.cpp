#include "heis/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <queue>

#include "heis/rng.hpp"

namespace heis {

namespace {

// G7K15 abscissae/weights: column 0 node, column 1 Gauss weight (0 for
// Kronrod-only nodes), column 2 Kronrod weight.
constexpr double kGK15[8][3] = {
    {0.000000000000000000, 0.417959183673469388, 0.209482141084727828},
    {0.405845151377397167, 0.381830050505118945, 0.190350578064785410},
    {0.741531185599394440, 0.279705391489276668, 0.140653259715525919},
    {0.949107912342758525, 0.129484966168869693, 0.063092092629978553},
    {0.207784955007898468, 0.0,                  0.204432940075298892},
    {0.586087235467691130, 0.0,                  0.169004726639267903},
    {0.864864423359769073, 0.0,                  0.104790010322250184},
    {0.991455371120812639, 0.0,                  0.022935322010529225},
};

struct Interval {
    double a, b, value, err;
    bool operator<(const Interval& o) const { return err < o.err; }
};

// QUADPACK-style error inflation: raw |K15 - G7| underestimates on rough
// integrands, so scale by the residual oscillation resasc.
double inflate_error(double diff, double resasc) {
    if (resasc <= 0.0 || diff == 0.0) return diff;
    const double ratio = 200.0 * diff / resasc;
    return ratio < 1.0 ? resasc * std::pow(ratio, 1.5) : resasc;
}

void gk15(const std::function<double(double)>& f, double a, double b, double& val,
          double& err) {
    const double mid = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    double ys[15];
    ys[0] = f(mid);
    double g = kGK15[0][1] * ys[0];
    double k = kGK15[0][2] * ys[0];
    for (int i = 1; i < 8; ++i) {
        const double dx = hl * kGK15[i][0];
        ys[2 * i - 1] = f(mid + dx);
        ys[2 * i] = f(mid - dx);
        const double y = ys[2 * i - 1] + ys[2 * i];
        g += kGK15[i][1] * y;
        k += kGK15[i][2] * y;
    }
    val = k * hl;
    const double mean = 0.5 * k;
    double resasc = kGK15[0][2] * std::abs(ys[0] - mean);
    for (int i = 1; i < 8; ++i)
        resasc += kGK15[i][2] *
                  (std::abs(ys[2 * i - 1] - mean) + std::abs(ys[2 * i] - mean));
    resasc *= std::abs(hl);
    err = inflate_error(std::abs(k - g) * std::abs(hl), resasc);
}

}  // namespace

QuadResult gk_adaptive(const std::function<double(double)>& f, double a, double b,
                       const QuadOptions& opt) {
    QuadResult res;
    if (a == b) return res;

    std::priority_queue<Interval> heap;
    double v, e;
    gk15(f, a, b, v, e);
    res.evals = 15;
    heap.push({a, b, v, e});
    double total = v, total_err = e;

    int used = 1;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (used >= opt.max_intervals)
            throw IntegrationError("gk_adaptive: interval budget exhausted");
        Interval top = heap.top();
        heap.pop();
        const double mid = 0.5 * (top.a + top.b);
        if (mid <= top.a || mid >= top.b) {
            // interval collapsed to machine precision; keep its estimate
            heap.push({top.a, top.b, top.value, 0.0});
            total_err -= top.err;
            continue;
        }
        double v1, e1, v2, e2;
        gk15(f, top.a, mid, v1, e1);
        gk15(f, mid, top.b, v2, e2);
        res.evals += 30;
        total += v1 + v2 - top.value;
        total_err += e1 + e2 - top.err;
        heap.push({top.a, mid, v1, e1});
        heap.push({mid, top.b, v2, e2});
        ++used;
    }
    res.value = total;
    res.abs_error = total_err;
    return res;
}

namespace {

struct VecInterval {
    double a, b, err;
    std::vector<double> value;
};

void gk15_vec(const std::function<void(double, double*)>& f, int dim, double a,
              double b, std::vector<double>& val, double& err,
              std::vector<double>& scratch) {
    const double mid = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    std::vector<double> g(dim, 0.0), k(dim, 0.0);
    scratch.assign(static_cast<std::size_t>(dim) * 15, 0.0);
    double* ys = scratch.data();
    f(mid, ys);
    for (int c = 0; c < dim; ++c) {
        g[c] = kGK15[0][1] * ys[c];
        k[c] = kGK15[0][2] * ys[c];
    }
    for (int i = 1; i < 8; ++i) {
        const double dx = hl * kGK15[i][0];
        double* yp = ys + dim * (2 * i - 1);
        double* ym = ys + dim * (2 * i);
        f(mid + dx, yp);
        f(mid - dx, ym);
        for (int c = 0; c < dim; ++c) {
            const double s = yp[c] + ym[c];
            g[c] += kGK15[i][1] * s;
            k[c] += kGK15[i][2] * s;
        }
    }
    val.resize(dim);
    err = 0.0;
    for (int c = 0; c < dim; ++c) {
        val[c] = k[c] * hl;
        const double mean = 0.5 * k[c];
        double resasc = kGK15[0][2] * std::abs(ys[c] - mean);
        for (int i = 1; i < 8; ++i)
            resasc += kGK15[i][2] * (std::abs(ys[dim * (2 * i - 1) + c] - mean) +
                                     std::abs(ys[dim * (2 * i) + c] - mean));
        resasc *= std::abs(hl);
        err = std::max(err, inflate_error(std::abs(k[c] - g[c]) * std::abs(hl), resasc));
    }
}

}  // namespace

VecQuadResult gk_adaptive_vec(const std::function<void(double, double*)>& f, int dim,
                              double a, double b, const QuadOptions& opt) {
    VecQuadResult res;
    res.value.assign(dim, 0.0);
    if (a == b) return res;

    auto cmp = [](const VecInterval& x, const VecInterval& y) { return x.err < y.err; };
    std::priority_queue<VecInterval, std::vector<VecInterval>, decltype(cmp)> heap(cmp);

    std::vector<double> scratch;
    VecInterval root{a, b, 0.0, {}};
    gk15_vec(f, dim, a, b, root.value, root.err, scratch);
    res.evals = 15;
    std::vector<double> total = root.value;
    double total_err = root.err;
    heap.push(std::move(root));

    auto scale = [&total]() {
        double m = 0.0;
        for (double t : total) m = std::max(m, std::abs(t));
        return m;
    };

    int used = 1;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * scale())) {
        if (used >= opt.max_intervals)
            throw IntegrationError("gk_adaptive_vec: interval budget exhausted");
        VecInterval top = heap.top();
        heap.pop();
        const double mid = 0.5 * (top.a + top.b);
        if (mid <= top.a || mid >= top.b) {
            total_err -= top.err;
            top.err = 0.0;
            heap.push(std::move(top));
            continue;
        }
        VecInterval left{top.a, mid, 0.0, {}}, right{mid, top.b, 0.0, {}};
        gk15_vec(f, dim, left.a, left.b, left.value, left.err, scratch);
        gk15_vec(f, dim, right.a, right.b, right.value, right.err, scratch);
        res.evals += 30;
        for (int c = 0; c < dim; ++c)
            total[c] += left.value[c] + right.value[c] - top.value[c];
        total_err += left.err + right.err - top.err;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++used;
    }
    res.value = total;
    res.abs_error = total_err;
    return res;
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(order);
    weights.resize(order);
    // Newton iteration on P_order from Chebyshev initial guesses.
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double p0, p1, dp;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
}

double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int order) {
    static thread_local std::vector<double> xs, ws;
    static thread_local int cached_order = -1;
    if (cached_order != order) {
        gauss_legendre(order, xs, ws);
        cached_order = order;
    }
    const double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += ws[i] * f(mid + hl * xs[i]);
    return s * hl;
}

McResult mc_stratified(const std::function<double(const double*)>& f, int dim,
                       const double* lo, const double* hi, std::uint64_t n_target,
                       std::uint64_t seed) {
    if (dim < 1 || dim > 8) throw IntegrationError("mc_stratified: dim out of range");
    std::uint64_t k = static_cast<std::uint64_t>(
        std::floor(std::pow(static_cast<double>(n_target), 1.0 / dim)));
    if (k < 1) k = 1;
    std::uint64_t cells = 1;
    for (int d = 0; d < dim; ++d) cells *= k;

    double vol = 1.0;
    for (int d = 0; d < dim; ++d) vol *= hi[d] - lo[d];
    const double cell_vol = vol / static_cast<double>(cells);

    constexpr int kChunks = 64;
    double chunk_sum[kChunks] = {0.0};
    std::uint64_t chunk_count[kChunks] = {0};

    double x[8];
    std::uint64_t idx[8];
    for (std::uint64_t c = 0; c < cells; ++c) {
        std::uint64_t rem = c;
        for (int d = 0; d < dim; ++d) {
            idx[d] = rem % k;
            rem /= k;
        }
        SplitMix64 rng(seed, c);
        for (int d = 0; d < dim; ++d) {
            const double u = (static_cast<double>(idx[d]) + rng.uniform()) /
                             static_cast<double>(k);
            x[d] = lo[d] + (hi[d] - lo[d]) * u;
        }
        const int ch = static_cast<int>(c % kChunks);
        chunk_sum[ch] += f(x);
        chunk_count[ch] += 1;
    }

    double total = 0.0;
    for (int ch = 0; ch < kChunks; ++ch) total += chunk_sum[ch];

    // Variance of the chunk estimators around the pooled mean.
    double mean_per_cell = total / static_cast<double>(cells);
    double var = 0.0;
    int nonempty = 0;
    for (int ch = 0; ch < kChunks; ++ch) {
        if (chunk_count[ch] == 0) continue;
        const double dev =
            chunk_sum[ch] / static_cast<double>(chunk_count[ch]) - mean_per_cell;
        var += dev * dev * static_cast<double>(chunk_count[ch]);
        ++nonempty;
    }
    McResult res;
    res.value = total * cell_vol;
    res.samples = cells;
    if (nonempty > 1)
        res.abs_error = cell_vol * std::sqrt(var * static_cast<double>(cells) /
                                             (nonempty - 1)) /
                        std::sqrt(static_cast<double>(nonempty));
    return res;
}

QuadResult gk_adaptive_banded(const std::function<double(double)>& f, double a, double b,
                              std::initializer_list<double> centers,
                              const QuadOptions& opt) {
    QuadResult total;
    if (b <= a) return total;
    std::vector<double> cuts = {a, b};
    for (double c : centers) {
        if (c > a && c < b) cuts.push_back(c);
        for (double h = 1.0; h < (b - a); h *= 2.0) {
            if (c + h > a && c + h < b) cuts.push_back(c + h);
            if (c - h > a && c - h < b) cuts.push_back(c - h);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        QuadResult piece = gk_adaptive(f, cuts[i], cuts[i + 1], opt);
        total.value += piece.value;
        total.abs_error += piece.abs_error;
        total.evals += piece.evals;
    }
    return total;
}

std::vector<double> real_roots(const std::vector<double>& coeffs, double imag_tol) {
    // strip leading zeros
    int deg = static_cast<int>(coeffs.size()) - 1;
    double scale = 0.0;
    for (double c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return {};
    while (deg > 0 && std::abs(coeffs[deg]) < 1e-14 * scale) --deg;
    std::vector<double> roots;
    if (deg <= 0) return roots;
    if (deg == 1) {
        roots.push_back(-coeffs[0] / coeffs[1]);
        return roots;
    }
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coeffs[i] / coeffs[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    double rmax = 1.0;
    for (int i = 0; i < deg; ++i) rmax = std::max(rmax, std::abs(es.eigenvalues()(i)));
    for (int i = 0; i < deg; ++i) {
        const auto ev = es.eigenvalues()(i);
        if (std::abs(ev.imag()) <= imag_tol * rmax) roots.push_back(ev.real());
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<std::pair<double, double>> polynomial_sublevel(
    const std::vector<double>& coeffs, double a, double b, double level) {
    std::vector<double> shifted = coeffs;
    shifted[0] -= level;
    auto eval = [&](double x) {
        double p = 0.0;
        for (int i = static_cast<int>(shifted.size()) - 1; i >= 0; --i)
            p = p * x + shifted[i];
        return p;
    };
    std::vector<double> cuts = {a, b};
    for (double r : real_roots(shifted))
        if (r > a && r < b) cuts.push_back(r);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= 0.0) continue;
        if (eval(0.5 * (cuts[i] + cuts[i + 1])) <= 0.0) {
            if (!out.empty() && out.back().second == cuts[i])
                out.back().second = cuts[i + 1];
            else
                out.emplace_back(cuts[i], cuts[i + 1]);
        }
    }
    return out;
}

std::vector<std::pair<double, double>> sublevel_intervals(
    const std::function<double(double)>& f, double a, double b, double level,
    int scan_points) {
    std::vector<std::pair<double, double>> out;
    if (b <= a) return out;
    const double h = (b - a) / scan_points;
    auto refine = [&](double x_in, double x_out) {
        // f(x_in) <= level < f(x_out); bisect the crossing
        for (int i = 0; i < 80; ++i) {
            const double m = 0.5 * (x_in + x_out);
            if (f(m) <= level)
                x_in = m;
            else
                x_out = m;
        }
        return 0.5 * (x_in + x_out);
    };

    double x_prev = a;
    bool in_prev = f(a) <= level;
    double start = in_prev ? a : 0.0;
    for (int i = 1; i <= scan_points; ++i) {
        const double x = (i == scan_points) ? b : a + i * h;
        const bool in = f(x) <= level;
        if (in && !in_prev) start = refine(x, x_prev);
        if (!in && in_prev) out.emplace_back(start, refine(x_prev, x));
        in_prev = in;
        x_prev = x;
    }
    if (in_prev) out.emplace_back(start, b);
    return out;
}

}  // namespace heis
