#include "gentwist/gc_linalg.hpp"

#include <cmath>

namespace gentwist {

double pairing(const GenElement& a, const GenElement& b) {
    return 0.5 * (a.cov().dot(b.vec()) + b.cov().dot(a.vec()));
}

Mat pairingMatrix(int n) {
    Mat p = Mat::Zero(2 * n, 2 * n);
    p.topRightCorner(n, n) = 0.5 * Mat::Identity(n, n);
    p.bottomLeftCorner(n, n) = 0.5 * Mat::Identity(n, n);
    return p;
}

// X_{E'}  = 1/2 { X - (g^-1 theta)(X) + g(X) - (theta g^-1 theta)(X) }
// a_{E'}  = 1/2 { g^-1(a) + a + (theta g^-1)(a) }
// and the complementary signs for E''.
Mat projectorP(const GenMetric& gm) {
    const int n = gm.n();
    const Mat gi = gm.g.inverse();
    const Mat th = gm.thetaMap();
    Mat p(2 * n, 2 * n);
    p.topLeftCorner(n, n) = Mat::Identity(n, n) - gi * th;
    p.topRightCorner(n, n) = gi;
    p.bottomLeftCorner(n, n) = gm.g - th * gi * th;
    p.bottomRightCorner(n, n) = Mat::Identity(n, n) + th * gi;
    return 0.5 * p;
}

Mat projectorM(const GenMetric& gm) {
    return Mat::Identity(2 * gm.n(), 2 * gm.n()) - projectorP(gm);
}

std::pair<GenElement, GenElement> project(const GenMetric& gm, const GenElement& a) {
    if (a.n() != gm.n()) throw DimensionError("project: element/metric dimension mismatch");
    const Mat p = projectorP(gm);
    GenElement ap(Vec(p * a.c));
    GenElement am(Vec(a.c - ap.c));
    return {ap, am};
}

GOperator gOperator(const GenMetric& gm) {
    // e^theta [[0, g^-1], [g, 0]] e^{-theta}; equals P' - P''.
    const int n = gm.n();
    const Mat gi = gm.g.inverse();
    const Mat th = gm.thetaMap();
    Mat m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = -gi * th;
    m.topRightCorner(n, n) = gi;
    m.bottomLeftCorner(n, n) = gm.g - th * gi * th;
    m.bottomRightCorner(n, n) = th * gi;
    return GOperator{m};
}

GenElement bTransform(const Mat& bform, const GenElement& a) {
    GenElement out = a;
    out.cov() += formApply(bform, Vec(a.vec()));
    return out;
}

Mat bTransformMatrix(const Mat& bform) {
    const int n = static_cast<int>(bform.rows());
    Mat m = Mat::Identity(2 * n, 2 * n);
    m.bottomLeftCorner(n, n) = formToMap(bform);
    return m;
}

GenComplex conjugateByB(const Mat& bform, const GenComplex& j) {
    const Mat e = bTransformMatrix(bform);
    const Mat ei = bTransformMatrix(Mat(-bform));
    return GenComplex(Mat(e * j.m * ei));
}

GenMetric bTransformMetric(const Mat& bform, const GenMetric& gm) {
    return GenMetric(gm.g, Mat(gm.theta + bform));
}

GenComplex fromComplex(const Mat& j) {
    const int n = static_cast<int>(j.rows());
    if ((j * j + Mat::Identity(n, n)).cwiseAbs().maxCoeff() > kStructTol)
        throw ValidationError("fromComplex: J^2 != -Id");
    Mat m = Mat::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = j;
    m.bottomRightCorner(n, n) = -j.transpose();
    return GenComplex(std::move(m));
}

GenComplex fromSymplectic(const Mat& wform) {
    const int n = static_cast<int>(wform.rows());
    if ((wform + wform.transpose()).cwiseAbs().maxCoeff() > kStructTol)
        throw ValidationError("fromSymplectic: form is not antisymmetric");
    const Mat w = formToMap(wform);
    Eigen::FullPivLU<Mat> lu(w);
    if (!lu.isInvertible()) throw ValidationError("fromSymplectic: form is degenerate");
    Mat m = Mat::Zero(2 * n, 2 * n);
    m.topRightCorner(n, n) = lu.inverse();
    m.bottomLeftCorner(n, n) = -w;
    return GenComplex(std::move(m));
}

GenComplex fromComplexBivector(const Mat& j, const CMat& pi) {
    const int n = static_cast<int>(j.rows());
    if ((j * j + Mat::Identity(n, n)).cwiseAbs().maxCoeff() > kStructTol)
        throw ValidationError("fromComplexBivector: J^2 != -Id");
    if ((pi + pi.transpose()).cwiseAbs().maxCoeff() > kStructTol)
        throw ValidationError("fromComplexBivector: bivector is not antisymmetric");
    // Only the (2,0)-part of pi enters; project with Q = 1/2 (Id - iJ).
    const CMat q = 0.5 * (CMat::Identity(n, n) - std::complex<double>(0, 1) * j.cast<std::complex<double>>());
    const CMat pi20 = q * pi * q.transpose();
    const Mat impi = pi20.imag();
    Mat m = Mat::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = j;
    // beta((Im pi)#(a)) = (a ^ beta)(Im pi): with coefficient matrix P the map
    // a -> P^T a realizes the contraction.
    m.topRightCorner(n, n) = 2.0 * impi.transpose();
    m.bottomRightCorner(n, n) = -j.transpose();
    GenComplex out(std::move(m));
    if (residualSquare(out) > kStructTol)
        throw ValidationError("fromComplexBivector: incompatible bivector (J^2 residual " +
                              std::to_string(residualSquare(out)) + ")");
    return out;
}

GenComplex directSum(const GenComplex& a, const GenComplex& b) {
    const int na = a.n(), nb = b.n(), n = na + nb;
    Mat m = Mat::Zero(2 * n, 2 * n);
    // tangent coordinates of the first factor precede those of the second,
    // covectors likewise.
    auto blk = [&](const Mat& src, int r0, int c0, int rn, int cn, int rdst, int cdst) {
        m.block(rdst, cdst, rn, cn) = src.block(r0, c0, rn, cn);
    };
    blk(a.m, 0, 0, na, na, 0, 0);
    blk(a.m, 0, na, na, na, 0, n);
    blk(a.m, na, 0, na, na, n, 0);
    blk(a.m, na, na, na, na, n, n);
    blk(b.m, 0, 0, nb, nb, na, na);
    blk(b.m, 0, nb, nb, nb, na, n + na);
    blk(b.m, nb, 0, nb, nb, n + na, na);
    blk(b.m, nb, nb, nb, nb, n + na, n + na);
    return GenComplex(std::move(m));
}

GenComplex assemble(const GenMetric& gm, const Mat& j1, const Mat& j2) {
    const int n = gm.n();
    const Mat id = Mat::Identity(n, n);
    auto checkJ = [&](const Mat& j, const char* which) {
        if ((j * j + id).cwiseAbs().maxCoeff() > kStructTol)
            throw ValidationError(std::string("assemble: ") + which + "^2 != -Id");
        if ((j.transpose() * gm.g * j - gm.g).cwiseAbs().maxCoeff() > kStructTol * gm.g.cwiseAbs().maxCoeff())
            throw ValidationError(std::string("assemble: ") + which + " is not g-orthogonal");
    };
    checkJ(j1, "J1");
    checkJ(j2, "J2");
    const Mat gi = gm.g.inverse();
    // 1/2 [[J1+J2, w1^-1 - w2^-1], [-(w1 - w2), -(J1* + J2*)]] with w_k = -g J_k,
    // so w_k^-1 = J_k g^-1.
    Mat k(2 * n, 2 * n);
    k.topLeftCorner(n, n) = j1 + j2;
    k.topRightCorner(n, n) = (j1 - j2) * gi;
    k.bottomLeftCorner(n, n) = gm.g * (j1 - j2);
    k.bottomRightCorner(n, n) = -(j1 + j2).transpose();
    k *= 0.5;
    return conjugateByB(gm.theta, GenComplex(std::move(k)));
}

std::pair<Mat, Mat> extractPair(const GenMetric& gm, const GenComplex& j) {
    const int n = gm.n();
    if (j.n() != n) throw DimensionError("extractPair: dimension mismatch");
    if (!isCompatible(gm, j))
        throw ValidationError("extractPair: structure does not preserve E'/E'' (residual " +
                              std::to_string(residualCompatible(gm, j)) + ")");
    Mat j1(n, n), j2(n, n);
    for (int i = 0; i < n; i++) {
        const Vec e = Vec::Unit(n, i);
        j1.col(i) = j.apply(gm.liftP(e)).vec();
        j2.col(i) = j.apply(gm.liftM(e)).vec();
    }
    return {j1, j2};
}

bool isCompatible(const GenMetric& gm, const GenComplex& j, double tol) {
    // Criterion 1: J preserves E' (and then E'', being pairing-skew).
    const double r1 = residualCompatible(gm, j);
    // Criterion 2: J commutes with the metric operator.
    const Mat go = gOperator(gm).m;
    const double scale = std::max(1.0, go.cwiseAbs().maxCoeff() * j.m.cwiseAbs().maxCoeff());
    const double r2 = (go * j.m - j.m * go).cwiseAbs().maxCoeff() / scale;
    const bool c1 = r1 < tol, c2 = r2 < tol * 10;
    if (c1 != c2)
        throw Error("isCompatible: subspace and commutation criteria disagree (residuals " +
                    std::to_string(r1) + ", " + std::to_string(r2) + ")");
    return c1;
}

GenComplex secondStructure(const GenMetric& gm, const GenComplex& j) {
    if (!isCompatible(gm, j))
        throw ValidationError("secondStructure: structure is not compatible with the metric");
    return GenComplex(Mat(gOperator(gm).m * j.m));
}

double pfaffian(const Mat& a) {
    const int n = static_cast<int>(a.rows());
    if (n % 2 != 0) return 0.0;
    if (n == 0) return 1.0;
    if (n == 2) return a(0, 1);
    double sum = 0.0;
    for (int j = 1; j < n; j++) {
        if (a(0, j) == 0.0) continue;
        Mat minor(n - 2, n - 2);
        int rr = 0;
        for (int r = 1; r < n; r++) {
            if (r == j) continue;
            int cc = 0;
            for (int c = 1; c < n; c++) {
                if (c == j) continue;
                minor(rr, cc++) = a(r, c);
            }
            rr++;
        }
        const double sign = (j % 2 == 1) ? 1.0 : -1.0;
        sum += sign * a(0, j) * pfaffian(minor);
    }
    return sum;
}

Mat gramSchmidt(const Mat& g, const Mat& seed, int orientation) {
    const int n = static_cast<int>(g.rows());
    Mat q = seed;
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < i; j++) q.col(i) -= (q.col(j).dot(g * q.col(i))) * q.col(j);
        const double nrm = std::sqrt(q.col(i).dot(g * q.col(i)));
        if (nrm < 1e-12) throw ValidationError("gramSchmidt: degenerate seed frame");
        q.col(i) /= nrm;
    }
    if (orientation != 0 && q.determinant() * orientation < 0) q.col(n - 1) *= -1.0;
    return q;
}

Mat gOrthonormalFrame(const Mat& g, int orientation) {
    return gramSchmidt(g, Mat::Identity(g.rows(), g.cols()), orientation);
}

int orientationSign(const Mat& g, const Mat& j, int orientation) {
    // Sign of the Pfaffian of K_ab = g(J q_a, q_b) in an oriented g-orthonormal
    // frame; +1 iff J induces the chart orientation.
    const Mat q = gOrthonormalFrame(g, orientation);
    const Mat k = q.transpose() * j.transpose() * g * q;
    const double pf = pfaffian(Mat(0.5 * (k - k.transpose())));
    if (pf == 0.0) throw ValidationError("orientationSign: degenerate Pfaffian");
    return pf > 0 ? +1 : -1;
}

const char* componentName(Component c) {
    switch (c) {
        case Component::PP: return "++";
        case Component::PM: return "+-";
        case Component::MP: return "-+";
        case Component::MM: return "--";
    }
    return "?";
}

Component componentFromSigns(int s1, int s2) {
    if (s1 > 0) return s2 > 0 ? Component::PP : Component::PM;
    return s2 > 0 ? Component::MP : Component::MM;
}

Component classifyPair(const Mat& g, const Mat& j1, const Mat& j2, int orientation) {
    return componentFromSigns(orientationSign(g, j1, orientation),
                              orientationSign(g, j2, orientation));
}

Component classifyComponent(const GenMetric& gm, const GenComplex& j, int orientation) {
    auto [j1, j2] = extractPair(gm, j);
    return classifyPair(gm.g, j1, j2, orientation);
}

Mat randomOrthogonalComplex(const Mat& g, int sign, Rng& rng, int orientation) {
    const int n = static_cast<int>(g.rows());
    if (n % 2 != 0) throw DimensionError("randomOrthogonalComplex: odd dimension");
    Mat j0 = Mat::Zero(n, n);
    for (int k = 0; k < n / 2; k++) {
        j0(2 * k + 1, 2 * k) = 1.0;
        j0(2 * k, 2 * k + 1) = -1.0;
    }
    for (int attempt = 0; attempt < 64; attempt++) {
        Mat seed = rng.gaussianMat(n, n);
        Mat q;
        try {
            q = gramSchmidt(g, seed, 0);
        } catch (const ValidationError&) {
            continue;
        }
        Mat j = q * j0 * q.inverse();
        if (orientationSign(g, j, orientation) != sign) {
            // Reversing one pair of the frame flips the induced orientation class.
            Mat qs = q;
            qs.col(0) = q.col(1);
            qs.col(1) = q.col(0);
            j = qs * j0 * qs.inverse();
        }
        if (orientationSign(g, j, orientation) == sign) return j;
    }
    throw Error("randomOrthogonalComplex: sampling failed");
}

double residualSquare(const GenComplex& j) {
    return (j.m * j.m + Mat::Identity(j.m.rows(), j.m.cols())).cwiseAbs().maxCoeff();
}

double residualSkew(const GenComplex& j) {
    const Mat p = pairingMatrix(j.n());
    return (j.m.transpose() * p + p * j.m).cwiseAbs().maxCoeff();
}

double residualCompatible(const GenMetric& gm, const GenComplex& j) {
    // Cotangent part of J(lift') must be (g + theta)(tangent part), and dually on E''.
    const int n = gm.n();
    const Mat gpt = gm.g + gm.thetaMap();
    const Mat gmt = -gm.g + gm.thetaMap();
    double r = 0.0;
    for (int i = 0; i < n; i++) {
        const Vec e = Vec::Unit(n, i);
        const GenElement ip = j.apply(gm.liftP(e));
        const GenElement im = j.apply(gm.liftM(e));
        r = std::max(r, (ip.cov() - gpt * ip.vec()).cwiseAbs().maxCoeff());
        r = std::max(r, (im.cov() - gmt * im.vec()).cwiseAbs().maxCoeff());
    }
    return r;
}

}  // namespace gentwist
