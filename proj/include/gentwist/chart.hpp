#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gentwist/expr.hpp"
#include "gentwist/types.hpp"

namespace gentwist {

// Coordinate chart: names, a closed box domain (n x 2, rows are [lo, hi]) and
// an orientation sign for the coordinate order.
struct Chart {
    std::vector<std::string> coords;
    Mat box;
    int orientation = +1;

    int dim() const { return static_cast<int>(coords.size()); }

    void validate() const {
        const int n = dim();
        if (n <= 0 || n % 2 != 0) throw DimensionError("chart dimension must be even and positive");
        if (box.rows() != n || box.cols() != 2) throw DimensionError("chart box must be n x 2");
        for (int i = 0; i < n; i++)
            if (!(box(i, 0) < box(i, 1)))
                throw ValidationError("chart box interval " + std::to_string(i + 1) + " is empty");
        if (orientation != 1 && orientation != -1)
            throw ValidationError("chart orientation must be +1 or -1");
    }

    Vec center() const { return 0.5 * (box.col(0) + box.col(1)); }

    // Maps a unit-cube point into the box.
    Vec boxPoint(const Vec& u) const {
        Vec p(dim());
        for (int i = 0; i < dim(); i++) p(i) = box(i, 0) + u(i) * (box(i, 1) - box(i, 0));
        return p;
    }
};

// Entry jets of the metric pair (g, theta) at a point.
struct MetricJets {
    int n = 0;
    std::vector<Jet2> gj;   // row-major n^2
    std::vector<Jet2> tj;   // row-major n^2, theta coefficient matrix

    const Jet2& g(int i, int j) const { return gj[i * n + j]; }
    const Jet2& th(int i, int j) const { return tj[i * n + j]; }

    Mat gVal() const {
        Mat m(n, n);
        for (int i = 0; i < n; i++)
            for (int j = 0; j < n; j++) m(i, j) = g(i, j).v;
        return m;
    }
    Mat thetaVal() const {
        Mat m(n, n);
        for (int i = 0; i < n; i++)
            for (int j = 0; j < n; j++) m(i, j) = th(i, j).v;
        return m;
    }
    Mat dgVal(int k) const {
        Mat m(n, n);
        for (int i = 0; i < n; i++)
            for (int j = 0; j < n; j++) m(i, j) = g(i, j).g(k);
        return m;
    }

    // Scalar entry shortcuts.
    double gVal(int i, int j) const { return g(i, j).v; }
    double thetaVal(int i, int j) const { return th(i, j).v; }
    double dgVal(int k, int i, int j) const { return g(i, j).g(k); }

    // dtheta(i,j,k) = d_i th_jk - d_j th_ik + d_k th_ij
    double dTheta(int i, int j, int k) const {
        return th(j, k).g(i) - th(i, k).g(j) + th(i, j).g(k);
    }
    // d_m dtheta(i,j,k)
    double dDTheta(int m, int i, int j, int k) const {
        return th(j, k).h(i, m) - th(i, k).h(j, m) + th(i, j).h(k, m);
    }
    bool thetaClosed(double tol = kStructTol) const {
        for (int i = 0; i < n; i++)
            for (int j = i + 1; j < n; j++)
                for (int k = j + 1; k < n; k++)
                    if (std::abs(dTheta(i, j, k)) > tol) return false;
        return true;
    }
};

// Generalized metric field on a chart: Expr entries for g (symmetric) and
// theta (antisymmetric coefficient matrix).
struct FieldGenMetric {
    Chart chart;
    std::vector<Expr> g;      // row-major n^2
    std::vector<Expr> theta;  // row-major n^2

    int n() const { return chart.dim(); }

    const Expr& gAt(int i, int j) const { return g[i * n() + j]; }
    const Expr& thetaAt(int i, int j) const { return theta[i * n() + j]; }

    GenMetric eval(const Vec& p) const {
        const int d = n();
        Mat gv(d, d), tv(d, d);
        for (int i = 0; i < d; i++)
            for (int j = 0; j < d; j++) {
                gv(i, j) = gAt(i, j).value(p);
                tv(i, j) = thetaAt(i, j).value(p);
            }
        return GenMetric(gv, tv);
    }

    MetricJets jets(const Vec& p) const {
        const int d = n();
        MetricJets mj;
        mj.n = d;
        mj.gj.reserve(d * d);
        mj.tj.reserve(d * d);
        for (int i = 0; i < d; i++)
            for (int j = 0; j < d; j++) mj.gj.push_back(gAt(i, j).jet(p));
        for (int i = 0; i < d; i++)
            for (int j = 0; j < d; j++) mj.tj.push_back(thetaAt(i, j).jet(p));
        return mj;
    }

    // Same chart, with both g and theta scaled by 1/c (used to normalize
    // tolerances; the scaling preserves compatibility of the pair).
    FieldGenMetric rescaled(double c) const;

    static FieldGenMetric flat(const Chart& chart);
};

// First-order data of a multi-component field at a point: val(c), jac(c, k) = d_k val(c).
struct CompJet {
    Vec val;
    Mat jac;
};

// A field of generalized-bundle sections (2n components) or plain vector
// fields (n components), evaluated to first order at a point.
using SectionField = std::function<CompJet(const Vec&)>;

// Endomorphism-valued field with first-order derivatives.
struct EndoJet {
    Mat val;
    std::vector<Mat> d;
};
using EndoField = std::function<EndoJet(const Vec&)>;

// Field builders.
SectionField exprSection(const std::vector<Expr>& comps);
SectionField constantSection(const Vec& packed);
EndoField exprEndo(const std::vector<Expr>& entries, int rows);
SectionField applyEndo(const EndoField& e, const SectionField& a);

// k-form field with Expr coefficients over sorted index tuples in
// lexicographic order (k = 0 is a scalar field).
struct FormField {
    int degree = 0;
    std::vector<Expr> coeff;
};

std::vector<std::vector<int>> sortedTuples(int n, int k);
int tupleIndex(const std::vector<int>& t, int n);

// Coefficients of the exterior derivative at p, over sorted (k+1)-tuples.
Vec exteriorD(const Chart& chart, const FormField& w, const Vec& p);

}  // namespace gentwist
