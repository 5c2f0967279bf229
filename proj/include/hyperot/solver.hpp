#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hyperot/diagram.hpp"

namespace hyperot {

struct TargetMeasure {
    std::vector<double> nu;

    double total() const;
    // min nu_i > 0 and mass balance against the source to 1e-9 relative.
    void validate(double source_mass) const;
};

struct SolveConfig {
    double lambda0 = 0.5;
    double eps = 1e-6;
    int max_iters = 200;
    double lambda_min = 1e-12;
    std::vector<double> warm_start;  // empty: phi = 0
    bool record_energy = true;       // dual objective column in the log
};

struct IterationRecord {
    int iter = 0;
    double lambda = 0.0;
    double residual_inf = 0.0;
    double residual_l2 = 0.0;  // sum of squared errors
    double energy = 0.0;
    double millis = 0.0;
};

struct DiagramBuild {
    PowerDiagram diagram;
    WeightedDelaunay delaunay;
    std::vector<double> omega;
    bool any_degenerate = false;
};

// Rebuilds the decomposition for a height vector. Implementations exist
// for the planar clipped case and the surface (tiled) case.
using DiagramFactory = std::function<DiagramBuild(const std::vector<double>&)>;

DiagramBuild make_build(DiagramPair pair);

struct nonconvergence_error : std::runtime_error {
    nonconvergence_error(const std::string& what, std::vector<IterationRecord> log)
        : std::runtime_error(what), log(std::move(log)) {}
    std::vector<IterationRecord> log;
};

struct TransportMap {
    std::vector<double> phi;  // normalized: sum = 0
    DiagramBuild build;
    double cost = 0.0;
    std::vector<IterationRecord> log;
    int iterations = 0;
};

// Symmetric sparse matrix with zero row sums: the cell-measure Jacobian.
struct SparseHessian {
    int n = 0;
    std::vector<double> diag;
    std::vector<std::vector<std::pair<int, double>>> off;  // off-diagonal entries per row

    std::vector<double> multiply(const std::vector<double>& x) const;
    bool connected() const;
    double entry(int i, int j) const;
};

double transport_cost(const HPoint& x, const HPoint& y);

// omega - nu; throws if any cell is degenerate.
std::vector<double> gradient(const DiagramBuild& build, const TargetMeasure& nu);

SparseHessian hessian(const DiagramBuild& build);

// Solves H h = g on the subspace orthogonal to (1,...,1) by deflated
// preconditioned conjugate gradients.
std::vector<double> newton_step(const SparseHessian& h, const std::vector<double>& g,
                                double rel_tol = 1e-10);

TransportMap damped_newton(const DiagramFactory& factory, const TargetMeasure& nu,
                           const SolveConfig& cfg);

// Energy as a line integral of the cell measures along the straight path
// from 0 to phi (composite Gauss-Legendre), minus the linear target term.
double kantorovich_energy(const DiagramFactory& factory, const std::vector<double>& phi,
                          const TargetMeasure& nu, int panels = 16);

// Total cost of the decomposition, by per-cell quadrature.
double map_cost(const DiagramBuild& build);

// Dual objective at the current decomposition.
double dual_objective(const DiagramBuild& build, const TargetMeasure& nu);

// Owner cell of a point among the diagram sites, reduced to canonical
// indices. Lowest canonical index wins ties.
int lookup(const DiagramBuild& build, const HPoint& x);

inline void normalize_heights(std::vector<double>& phi) {
    double mean = 0.0;
    for (double v : phi) mean += v;
    mean /= double(phi.size());
    for (double& v : phi) v -= mean;
}

}  // namespace hyperot
