#include "gentwist/chart.hpp"

#include <algorithm>

namespace gentwist {

FieldGenMetric FieldGenMetric::rescaled(double c) const {
    FieldGenMetric out = *this;
    const Expr inv = Expr::number(1.0 / c);
    for (auto& e : out.g) e = Expr::multiply(inv, e);
    for (auto& e : out.theta) e = Expr::multiply(inv, e);
    return out;
}

FieldGenMetric FieldGenMetric::flat(const Chart& chart) {
    FieldGenMetric f;
    f.chart = chart;
    const int n = chart.dim();
    f.g.assign(n * n, Expr::number(0.0));
    f.theta.assign(n * n, Expr::number(0.0));
    for (int i = 0; i < n; i++) f.g[i * n + i] = Expr::number(1.0);
    return f;
}

SectionField exprSection(const std::vector<Expr>& comps) {
    return [comps](const Vec& p) {
        const int n = static_cast<int>(p.size());
        const int m = static_cast<int>(comps.size());
        CompJet j;
        j.val.resize(m);
        j.jac.resize(m, n);
        for (int c = 0; c < m; c++) {
            const Jet2 je = comps[c].jet(p);
            j.val(c) = je.v;
            j.jac.row(c) = je.g.transpose();
        }
        return j;
    };
}

SectionField constantSection(const Vec& packed) {
    return [packed](const Vec& p) {
        CompJet j;
        j.val = packed;
        j.jac = Mat::Zero(packed.size(), p.size());
        return j;
    };
}

EndoField exprEndo(const std::vector<Expr>& entries, int rows) {
    const int cols = static_cast<int>(entries.size()) / rows;
    return [entries, rows, cols](const Vec& p) {
        const int n = static_cast<int>(p.size());
        EndoJet e;
        e.val.resize(rows, cols);
        e.d.assign(n, Mat::Zero(rows, cols));
        for (int r = 0; r < rows; r++)
            for (int c = 0; c < cols; c++) {
                const Jet2 je = entries[r * cols + c].jet(p);
                e.val(r, c) = je.v;
                for (int k = 0; k < n; k++) e.d[k](r, c) = je.g(k);
            }
        return e;
    };
}

SectionField applyEndo(const EndoField& e, const SectionField& a) {
    return [e, a](const Vec& p) {
        const EndoJet ej = e(p);
        const CompJet aj = a(p);
        const int n = static_cast<int>(p.size());
        CompJet out;
        out.val = ej.val * aj.val;
        out.jac.resize(ej.val.rows(), n);
        for (int k = 0; k < n; k++) out.jac.col(k) = ej.d[k] * aj.val + ej.val * aj.jac.col(k);
        return out;
    };
}

std::vector<std::vector<int>> sortedTuples(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k == 0) {
        out.push_back({});
        return out;
    }
    std::vector<int> t(k);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            out.push_back(t);
            return;
        }
        for (int i = start; i < n; i++) {
            t[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return out;
}

int tupleIndex(const std::vector<int>& t, int n) {
    // lexicographic rank among sorted tuples of size |t|
    const int k = static_cast<int>(t.size());
    auto choose = [](int a, int b) {
        if (b < 0 || b > a) return 0LL;
        long long r = 1;
        for (int i = 0; i < b; i++) r = r * (a - i) / (i + 1);
        return r;
    };
    long long rank = 0;
    int prev = -1;
    for (int d = 0; d < k; d++) {
        for (int v = prev + 1; v < t[d]; v++) rank += choose(n - v - 1, k - d - 1);
        prev = t[d];
    }
    return static_cast<int>(rank);
}

Vec exteriorD(const Chart& chart, const FormField& w, const Vec& p) {
    const int n = chart.dim();
    const int k = w.degree;
    if (k < 0 || k > 3) throw DimensionError("exteriorD: degree must be between 0 and 3");
    const auto inTuples = sortedTuples(n, k);
    if (static_cast<int>(w.coeff.size()) != static_cast<int>(inTuples.size()))
        throw DimensionError("exteriorD: coefficient count does not match degree");
    std::vector<Jet2> jets;
    jets.reserve(w.coeff.size());
    for (const auto& e : w.coeff) jets.push_back(e.jet(p));

    const auto outTuples = sortedTuples(n, k + 1);
    Vec out = Vec::Zero(outTuples.size());
    for (size_t oi = 0; oi < outTuples.size(); oi++) {
        const auto& t = outTuples[oi];
        double v = 0.0;
        for (int m = 0; m <= k; m++) {
            std::vector<int> rest;
            for (int d = 0; d <= k; d++)
                if (d != m) rest.push_back(t[d]);
            const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
            v += sgn * jets[tupleIndex(rest, n)].g(t[m]);
        }
        out(oi) = v;
    }
    return out;
}

}  // namespace gentwist
