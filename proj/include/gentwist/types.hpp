#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>

namespace gentwist {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

// Structural tolerance for exact-identity validation (involutivity, skewness, ...).
inline constexpr double kStructTol = 1e-9;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Element X + alpha of T (+) T*, stored as a 2n coefficient vector:
// entries [0, n) are the vector part, [n, 2n) the covector part.
struct GenElement {
    Vec c;

    GenElement() = default;
    explicit GenElement(Vec packed) : c(std::move(packed)) {
        if (c.size() % 2 != 0) throw DimensionError("GenElement: packed size must be even");
    }
    GenElement(const Vec& x, const Vec& a) {
        if (x.size() != a.size()) throw DimensionError("GenElement: vector/covector size mismatch");
        c.resize(2 * x.size());
        c << x, a;
    }

    int n() const { return static_cast<int>(c.size()) / 2; }
    auto vec() const { return c.head(n()); }
    auto cov() const { return c.tail(n()); }
    auto vec() { return c.head(n()); }
    auto cov() { return c.tail(n()); }

    static GenElement zero(int n) { return GenElement(Vec::Zero(2 * n)); }
    static GenElement vector(const Vec& x) { return GenElement(x, Vec::Zero(x.size())); }
    static GenElement covector(const Vec& a) { return GenElement(Vec::Zero(a.size()), a); }
};

inline GenElement operator+(const GenElement& a, const GenElement& b) { return GenElement(Vec(a.c + b.c)); }
inline GenElement operator-(const GenElement& a, const GenElement& b) { return GenElement(Vec(a.c - b.c)); }
inline GenElement operator*(double s, const GenElement& a) { return GenElement(Vec(s * a.c)); }

// 2-forms are carried around by their coefficient matrix F, F(i,j) = phi(e_i, e_j),
// antisymmetric.  The induced map T -> T*, phi(X)(Y) = phi(X, Y), has matrix F^T
// in the dual basis.
inline Mat formToMap(const Mat& form) { return form.transpose(); }
inline Vec formApply(const Mat& form, const Vec& x) { return form.transpose() * x; }

// Generalized metric determined by a Riemannian metric g and a 2-form theta:
//   E'  = { X + g(X) + theta(X) },   E'' = { X - g(X) + theta(X) }.
struct GenMetric {
    Mat g;      // symmetric positive definite
    Mat theta;  // antisymmetric coefficient matrix, theta(i,j) = theta(e_i, e_j)

    GenMetric() = default;
    GenMetric(Mat g_, Mat theta_) : g(std::move(g_)), theta(std::move(theta_)) {
        if (g.rows() != g.cols()) throw DimensionError("GenMetric: g must be square");
        if (theta.rows() != theta.cols() || theta.rows() != g.rows())
            throw DimensionError("GenMetric: theta must match g in size");
        g = 0.5 * (g + g.transpose()).eval();
        theta = 0.5 * (theta - theta.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw ValidationError("GenMetric: g is not positive definite (min eigenvalue " +
                                  std::to_string(es.eigenvalues().minCoeff()) + ")");
    }

    int n() const { return static_cast<int>(g.rows()); }
    Mat thetaMap() const { return theta.transpose(); }

    // Lift of a tangent vector into E' resp. E''.
    GenElement liftP(const Vec& x) const { return GenElement(x, Vec(g * x + thetaMap() * x)); }
    GenElement liftM(const Vec& x) const { return GenElement(x, Vec(-g * x + thetaMap() * x)); }
};

// Generalized (almost) complex structure on T (+) T*: a 2n x 2n matrix acting on
// packed GenElement coefficients.
struct GenComplex {
    Mat m;

    GenComplex() = default;
    explicit GenComplex(Mat m_) : m(std::move(m_)) {
        if (m.rows() != m.cols() || m.rows() % 2 != 0)
            throw DimensionError("GenComplex: matrix must be square of even size");
    }
    int n() const { return static_cast<int>(m.rows()) / 2; }
    GenElement apply(const GenElement& a) const { return GenElement(Vec(m * a.c)); }
};

// The operator of a generalized metric (an involution whose +1/-1 eigenspaces are E'/E'').
struct GOperator {
    Mat m;
    int n() const { return static_cast<int>(m.rows()) / 2; }
    GenElement apply(const GenElement& a) const { return GenElement(Vec(m * a.c)); }
};

inline Mat blockJ(const Mat& tt, const Mat& tc, const Mat& ct, const Mat& cc) {
    const int n = static_cast<int>(tt.rows());
    Mat m(2 * n, 2 * n);
    m << tt, tc, ct, cc;
    return m;
}

}  // namespace gentwist
