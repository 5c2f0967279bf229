#include "hyperot/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace hyperot {

double TargetMeasure::total() const { return std::accumulate(nu.begin(), nu.end(), 0.0); }

void TargetMeasure::validate(double source_mass) const {
    if (nu.empty()) throw input_error("empty target measure");
    for (double v : nu)
        if (!(v > 0.0)) throw input_error("target masses must be positive");
    double t = total();
    if (std::abs(t - source_mass) > 1e-9 * std::max(std::abs(source_mass), 1.0))
        throw input_error("target measure does not balance the source mass");
}

DiagramBuild make_build(DiagramPair pair) {
    DiagramBuild b;
    b.omega = cell_areas(pair.diagram);
    b.any_degenerate = false;
    for (const PowerCell& c : pair.diagram.cells)
        if (c.degenerate) b.any_degenerate = true;
    b.diagram = std::move(pair.diagram);
    b.delaunay = std::move(pair.delaunay);
    return b;
}

double transport_cost(const HPoint& x, const HPoint& y) {
    double c = -lorentz_inner(x.vec(), y.vec());
    if (c < 1.0) c = 1.0;
    return std::log(c);
}

std::vector<double> gradient(const DiagramBuild& build, const TargetMeasure& nu) {
    if (build.any_degenerate)
        throw geometry_error("inadmissible state: a cell is empty or degenerate");
    if (nu.nu.size() != build.omega.size()) throw input_error("target size mismatch");
    std::vector<double> g(build.omega.size());
    for (size_t i = 0; i < g.size(); ++i) g[i] = build.omega[i] - nu.nu[i];
    return g;
}

SparseHessian hessian(const DiagramBuild& build) {
    if (build.any_degenerate)
        throw geometry_error("inadmissible state: a cell is empty or degenerate");
    const PowerDiagram& d = build.diagram;
    int n = int(d.cells.size());
    SparseHessian h;
    h.n = n;
    h.diag.assign(size_t(n), 0.0);
    h.off.resize(size_t(n));

    // Accumulate each cell-boundary segment once, keyed on the lower
    // canonical index; translated copies of the owner contribute nothing.
    std::vector<std::vector<std::pair<int, double>>> acc(static_cast<size_t>(n));
    for (const PowerCell& cell : d.cells) {
        int i = cell.site;
        const LiftedSite& si = d.sites[size_t(i)];
        size_t m = cell.poly.verts.size();
        for (size_t e = 0; e < m; ++e) {
            int j = cell.edge_neighbor[e];
            if (j < 0) continue;
            int jc = d.canonical[size_t(j)];
            if (jc == i) continue;  // edge against a copy of the same site
            if (jc < i) continue;   // counted from the other cell
            const HPoint& a = cell.poly.verts[e];
            const HPoint& b = cell.poly.verts[(e + 1) % m];
            if (hyperbolic_distance(a, b) <= 1e-12) continue;
            const LiftedSite& sj = d.sites[size_t(j)];
            HessianEdgeGeometry geo =
                hessian_edge_geometry(si.center, si.height, sj.center, sj.height, a, b);
            double v = hessian_edge_value(geo);
            acc[size_t(i)].push_back({jc, v});
        }
    }
    for (int i = 0; i < n; ++i) {
        // Merge repeated pairs (several shared edges against copies of j).
        std::sort(acc[size_t(i)].begin(), acc[size_t(i)].end());
        for (size_t k = 0; k < acc[size_t(i)].size();) {
            int j = acc[size_t(i)][k].first;
            double v = 0.0;
            while (k < acc[size_t(i)].size() && acc[size_t(i)][k].first == j)
                v += acc[size_t(i)][k++].second;
            h.off[size_t(i)].push_back({j, v});
            h.off[size_t(j)].push_back({i, v});
        }
    }
    for (int i = 0; i < n; ++i) {
        std::sort(h.off[size_t(i)].begin(), h.off[size_t(i)].end());
        double s = 0.0;
        for (const auto& [j, v] : h.off[size_t(i)]) s += v;
        h.diag[size_t(i)] = -s;
    }
    return h;
}

std::vector<double> SparseHessian::multiply(const std::vector<double>& x) const {
    std::vector<double> y(size_t(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = diag[size_t(i)] * x[size_t(i)];
        for (const auto& [j, v] : off[size_t(i)]) s += v * x[size_t(j)];
        y[size_t(i)] = s;
    }
    return y;
}

bool SparseHessian::connected() const {
    if (n == 0) return false;
    std::vector<char> seen(size_t(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (const auto& [j, v] : off[size_t(i)]) {
            if (v != 0.0 && !seen[size_t(j)]) {
                seen[size_t(j)] = 1;
                ++count;
                stack.push_back(j);
            }
        }
    }
    return count == n;
}

double SparseHessian::entry(int i, int j) const {
    if (i == j) return diag[size_t(i)];
    for (const auto& [k, v] : off[size_t(i)])
        if (k == j) return v;
    return 0.0;
}

namespace {

void project_mean(std::vector<double>& x) {
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
    for (double& v : x) v -= mean;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::vector<double> newton_step(const SparseHessian& h, const std::vector<double>& g,
                                double rel_tol) {
    size_t n = size_t(h.n);
    if (g.size() != n) throw input_error("gradient size mismatch");
    if (h.n == 1) return {0.0};
    if (!h.connected())
        throw geometry_error("singular newton system: cell adjacency is disconnected");

    std::vector<double> b = g;
    project_mean(b);
    double bnorm = std::sqrt(dot(b, b));
    std::vector<double> x(n, 0.0);
    if (bnorm == 0.0) return x;

    std::vector<double> r = b;
    std::vector<double> z(n), p(n), hp;
    auto precondition = [&](const std::vector<double>& rr, std::vector<double>& zz) {
        for (size_t i = 0; i < n; ++i) {
            double d = h.diag[i];
            zz[i] = d > 0.0 ? rr[i] / d : rr[i];
        }
        project_mean(zz);
    };
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    size_t max_it = 40 * n + 200;
    for (size_t it = 0; it < max_it; ++it) {
        hp = h.multiply(p);
        double php = dot(p, hp);
        if (!(php > 0.0))
            throw geometry_error("singular newton system: curvature lost on the subspace");
        double alpha = rz / php;
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * hp[i];
        }
        if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) {
            project_mean(x);
            return x;
        }
        precondition(r, z);
        double rz_next = dot(r, z);
        double beta = rz_next / rz;
        rz = rz_next;
        for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw geometry_error("newton system solve did not reach the requested residual");
}

double map_cost(const DiagramBuild& build) {
    double total = 0.0;
    for (const PowerCell& cell : build.diagram.cells) {
        if (cell.degenerate) continue;
        const HPoint& site = build.diagram.sites[size_t(cell.site)].center;
        total += integrate_polygon(cell.poly, [&](const HPoint& p) {
            return transport_cost(p, site);
        });
    }
    return total;
}

double dual_objective(const DiagramBuild& build, const TargetMeasure& nu) {
    double value = map_cost(build);
    const std::vector<double>& w = build.omega;
    for (size_t i = 0; i < w.size(); ++i) {
        double phi = build.diagram.sites[size_t(build.diagram.cells[i].site)].height;
        value += phi * (nu.nu[i] - w[i]);
    }
    return value;
}

TransportMap damped_newton(const DiagramFactory& factory, const TargetMeasure& nu,
                           const SolveConfig& cfg) {
    using clock = std::chrono::steady_clock;
    if (!(cfg.lambda0 > 0.0) || cfg.lambda0 > 1.0) throw input_error("lambda0 must be in (0, 1]");
    if (!(cfg.eps > 0.0)) throw input_error("eps must be positive");

    auto residuals = [&](const std::vector<double>& omega) {
        double inf = 0.0, l2 = 0.0;
        for (size_t i = 0; i < omega.size(); ++i) {
            double d = omega[i] - nu.nu[i];
            inf = std::max(inf, std::abs(d));
            l2 += d * d;
        }
        return std::pair<double, double>(inf, l2);
    };

    std::vector<double> phi = cfg.warm_start;
    if (!phi.empty() && phi.size() != nu.nu.size())
        throw input_error("warm start size mismatch");
    if (phi.empty()) phi.assign(nu.nu.size(), 0.0);
    normalize_heights(phi);

    std::vector<IterationRecord> log;
    auto t0 = clock::now();
    DiagramBuild build = factory(phi);
    if (build.omega.size() != nu.nu.size()) throw input_error("target size mismatch");
    nu.validate(std::accumulate(build.omega.begin(), build.omega.end(), 0.0));
    if (build.any_degenerate)
        throw geometry_error("initial heights are inadmissible: degenerate cell");

    auto [res_inf, res_l2] = residuals(build.omega);
    auto record = [&](int iter, double lambda) {
        IterationRecord r;
        r.iter = iter;
        r.lambda = lambda;
        r.residual_inf = res_inf;
        r.residual_l2 = res_l2;
        r.energy = cfg.record_energy ? dual_objective(build, nu) : 0.0;
        r.millis = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        log.push_back(r);
        t0 = clock::now();
    };
    record(0, 0.0);

    int iter = 0;
    while (res_inf >= cfg.eps) {
        if (iter >= cfg.max_iters)
            throw nonconvergence_error("maximum iterations exceeded", std::move(log));
        ++iter;
        std::vector<double> g = gradient(build, nu);
        SparseHessian h = hessian(build);
        std::vector<double> dir = newton_step(h, g);
        for (double& v : dir) v = -v;  // descend

        double lambda = cfg.lambda0;
        bool accepted = false;
        while (lambda >= cfg.lambda_min) {
            std::vector<double> trial = phi;
            for (size_t i = 0; i < trial.size(); ++i) trial[i] += lambda * dir[i];
            normalize_heights(trial);
            DiagramBuild tb = factory(trial);
            if (!tb.any_degenerate) {
                auto [tinf, tl2] = residuals(tb.omega);
                if (tinf < res_inf || tinf < cfg.eps) {
                    phi = std::move(trial);
                    build = std::move(tb);
                    res_inf = tinf;
                    res_l2 = tl2;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted)
            throw nonconvergence_error("step size underflow during damping", std::move(log));
        record(iter, lambda);
    }

    TransportMap map;
    map.phi = phi;
    map.cost = map_cost(build);
    map.build = std::move(build);
    map.log = std::move(log);
    map.iterations = iter;
    return map;
}

double kantorovich_energy(const DiagramFactory& factory, const std::vector<double>& phi,
                          const TargetMeasure& nu, int panels) {
    // 8-node Gauss-Legendre weights on [-1, 1].
    static const double nodes[8] = {-0.9602898564975363, -0.7966664774136267,
                                    -0.5255324099163290, -0.1834346424956498,
                                    0.1834346424956498,  0.5255324099163290,
                                    0.7966664774136267,  0.9602898564975363};
    static const double weights[8] = {0.1012285362903763, 0.2223810344533745,
                                      0.3137066458778873, 0.3626837833783620,
                                      0.3626837833783620, 0.3137066458778873,
                                      0.2223810344533745, 0.1012285362903763};
    double path_integral = 0.0;
    for (int p = 0; p < panels; ++p) {
        double a = double(p) / panels, b = double(p + 1) / panels;
        for (int q = 0; q < 8; ++q) {
            double t = 0.5 * (a + b) + 0.5 * (b - a) * nodes[q];
            std::vector<double> scaled(phi.size());
            for (size_t i = 0; i < phi.size(); ++i) scaled[i] = t * phi[i];
            DiagramBuild build = factory(scaled);
            if (build.any_degenerate)
                throw geometry_error("inadmissible path: degenerate cell along the segment");
            double s = 0.0;
            for (size_t i = 0; i < phi.size(); ++i) s += build.omega[i] * phi[i];
            path_integral += 0.5 * (b - a) * weights[q] * s;
        }
    }
    double linear = 0.0;
    for (size_t i = 0; i < phi.size(); ++i) linear += phi[i] * nu.nu[i];
    return path_integral - linear;
}

int lookup(const DiagramBuild& build, const HPoint& x) {
    const PowerDiagram& d = build.diagram;
    int best = -1;
    double best_pow = 0.0;
    for (size_t s = 0; s < d.sites.size(); ++s) {
        double p = power_value(x, d.sites[s].center, d.sites[s].height);
        int c = d.canonical[s];
        if (best < 0) {
            best = c;
            best_pow = p;
            continue;
        }
        double band = 1e-12 * std::max(std::abs(best_pow), std::abs(p));
        if (p < best_pow - band) {
            best = c;
            best_pow = p;
        } else if (p <= best_pow + band && c < best) {
            best = c;  // deterministic tie: lowest canonical index
            best_pow = std::min(best_pow, p);
        }
    }
    return best;
}

}  // namespace hyperot
