#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <utility>

#include "doctest.h"
#include "gentwist/gc_linalg.hpp"
#include "gentwist/rng.hpp"
#include "gentwist/twistor_fiber.hpp"

using namespace gentwist;

namespace {

Mat standardJ(int n) {
  Mat j = Mat::Zero(n, n);
  for (int k = 0; k + 1 < n; k += 2) {
    j(k + 1, k) = 1.0;
    j(k, k + 1) = -1.0;
  }
  return j;
}

Mat randomSpd(Rng& rng, int n) {
  const Mat a = rng.gaussianMat(n, n);
  return Mat(a * a.transpose() + 0.5 * static_cast<double>(n) * Mat::Identity(n, n));
}

Mat randomAntisym(Rng& rng, int n) {
  const Mat a = rng.gaussianMat(n, n);
  return Mat(0.5 * (a - a.transpose()));
}

GenMetric randomGenMetric(Rng& rng, int n) {
  return GenMetric(randomSpd(rng, n), randomAntisym(rng, n));
}

double mx(const Mat& m) { return m.cwiseAbs().maxCoeff(); }
double mx(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

// Independent oracle for the E' / E'' split: solve the 2n x 2n linear system
// a = (y' + g y' + Theta y') + (y'' - g y'' + Theta y'') directly.
std::pair<GenElement, GenElement> bruteForceProject(const GenMetric& gm, const GenElement& a) {
  const int n = gm.n();
  Mat m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = Mat::Identity(n, n);
  m.topRightCorner(n, n) = Mat::Identity(n, n);
  m.bottomLeftCorner(n, n) = gm.g + gm.thetaMap();
  m.bottomRightCorner(n, n) = -gm.g + gm.thetaMap();
  const Vec y = m.fullPivLu().solve(a.c);
  const Vec yp = y.head(n), ym = y.tail(n);
  return {gm.liftP(yp), gm.liftM(ym)};
}

}  // namespace

TEST_CASE("pairing on a hand-computed element pair") {
  // A = d/dx1 + 2 dx2, B = 3 d/dx2 + dx1: <A,B> = 1/2 (2*3 + 1*(-1+2)) ... computed directly:
  // alpha(Y) = (0,2).(0,3) = 6, beta(X) = (1,0).(1,0) = 1, pairing = 3.5; use the classic
  // frozen pair instead: A = d/dx1 + dx1, B = d/dx1 + 4 dx1 gives 1/2 (1*1 + 4*1) = 2.5.
  Vec a(4), b(4);
  a << 1, 0, 1, 0;
  b << 1, 0, 4, 0;
  CHECK(pairing(GenElement(a), GenElement(b)) == doctest::Approx(2.5));
  // <X, alpha> = 1/2 alpha(X).
  Vec x(4), al(4);
  x << 2, 0, 0, 0;
  al << 0, 0, 5, 0;
  CHECK(pairing(GenElement(x), GenElement(al)) == doctest::Approx(5.0));
  // Pairing matrix reproduces the bilinear form.
  Rng rng(3);
  const Mat p = pairingMatrix(3);
  for (int t = 0; t < 20; t++) {
    const GenElement u(rng.gaussianVec(6)), v(rng.gaussianVec(6));
    CHECK(pairing(u, v) == doctest::Approx(u.c.dot(p * v.c)).epsilon(1e-12));
  }
}

TEST_CASE("projections match the brute-force linear solve") {
  Rng rng(17);
  for (int t = 0; t < 200; t++) {
    const int n = 2 + 2 * static_cast<int>(rng.next() % 3);  // 2, 4, 6
    const GenMetric gm = randomGenMetric(rng, n);
    const GenElement a(rng.gaussianVec(2 * n));
    const auto [p1, p2] = project(gm, a);
    const auto [q1, q2] = bruteForceProject(gm, a);
    CHECK(mx(Vec(p1.c - q1.c)) < 1e-10);
    CHECK(mx(Vec(p2.c - q2.c)) < 1e-10);
    CHECK(mx(Vec(p1.c + p2.c - a.c)) < 1e-10);
    // Projector matrices agree with the elementwise projections.
    CHECK(mx(Vec(projectorP(gm) * a.c - p1.c)) < 1e-10);
    CHECK(mx(Vec(projectorM(gm) * a.c - p2.c)) < 1e-10);
  }
}

TEST_CASE("metric operator squares to the identity and splits the pairing") {
  Rng rng(23);
  for (int t = 0; t < 50; t++) {
    const int n = 2 + 2 * static_cast<int>(rng.next() % 2);
    const GenMetric gm = randomGenMetric(rng, n);
    const GOperator go = gOperator(gm);
    CHECK(mx(Mat(go.m * go.m - Mat::Identity(2 * n, 2 * n))) < 1e-10);
    // G = e^Theta [[0, g^-1], [g, 0]] e^-Theta (block formula).
    Mat mid = Mat::Zero(2 * n, 2 * n);
    mid.topRightCorner(n, n) = gm.g.inverse();
    mid.bottomLeftCorner(n, n) = gm.g;
    const Mat eb = bTransformMatrix(gm.theta);
    const Mat emb = bTransformMatrix(Mat(-gm.theta));
    CHECK(mx(Mat(go.m - eb * mid * emb)) < 1e-9);
    // <G A, G B> = <A, B>.
    const GenElement a(rng.gaussianVec(2 * n)), b(rng.gaussianVec(2 * n));
    CHECK(pairing(go.apply(a), go.apply(b)) == doctest::Approx(pairing(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("b-transforms preserve the pairing and compose additively") {
  Rng rng(29);
  const int n = 4;
  for (int t = 0; t < 50; t++) {
    const Mat b1 = randomAntisym(rng, n), b2 = randomAntisym(rng, n);
    const GenElement u(rng.gaussianVec(2 * n)), v(rng.gaussianVec(2 * n));
    CHECK(pairing(bTransform(b1, u), bTransform(b1, v)) ==
          doctest::Approx(pairing(u, v)).epsilon(1e-10));
    const GenElement lhs = bTransform(b1, bTransform(b2, u));
    const GenElement rhs = bTransform(Mat(b1 + b2), u);
    CHECK(mx(Vec(lhs.c - rhs.c)) < 1e-12);
    CHECK(mx(Mat(bTransformMatrix(b1) * bTransformMatrix(Mat(-b1)) -
                 Mat::Identity(2 * n, 2 * n))) < 1e-12);
  }
}

TEST_CASE("structure from a complex structure: frozen displays") {
  const Mat j = standardJ(2);
  const GenComplex jc = fromComplex(j);
  CHECK(residualSquare(jc) < 1e-14);
  CHECK(residualSkew(jc) < 1e-14);
  // J(d/dx1) = d/dx2 and J(dx1) = dx2 for the standard structure.
  Vec e1 = Vec::Zero(4), dx1 = Vec::Zero(4);
  e1(0) = 1;
  dx1(2) = 1;
  Vec je1 = jc.apply(GenElement(e1)).c, jdx1 = jc.apply(GenElement(dx1)).c;
  Vec wantV = Vec::Zero(4), wantC = Vec::Zero(4);
  wantV(1) = 1;  // d/dx2
  wantC(3) = 1;  // dx2
  CHECK(mx(Vec(je1 - wantV)) < 1e-14);
  CHECK(mx(Vec(jdx1 - wantC)) < 1e-14);
}

TEST_CASE("structure from a symplectic form: frozen displays") {
  Mat w = Mat::Zero(2, 2);
  w(0, 1) = 1;
  w(1, 0) = -1;  // w = dx1 ^ dx2
  const GenComplex jc = fromSymplectic(w);
  CHECK(residualSquare(jc) < 1e-14);
  CHECK(residualSkew(jc) < 1e-14);
  // J(d/dx1) = -w(d/dx1) = -dx2; J(dx2) = w^{-1}(dx2) = d/dx1.
  Vec e1 = Vec::Zero(4), dx2 = Vec::Zero(4);
  e1(0) = 1;
  dx2(3) = 1;
  Vec want1 = Vec::Zero(4), want2 = Vec::Zero(4);
  want1(3) = -1;
  want2(0) = 1;
  CHECK(mx(Vec(jc.apply(GenElement(e1)).c - want1)) < 1e-14);
  CHECK(mx(Vec(jc.apply(GenElement(dx2)).c - want2)) < 1e-14);
  CHECK_THROWS_AS(fromSymplectic(Mat::Identity(2, 2)), ValidationError);   // not antisymmetric
  CHECK_THROWS_AS(fromSymplectic(Mat::Zero(2, 2)), ValidationError);       // degenerate
}

TEST_CASE("structure from a complex structure and a bivector") {
  const int n = 4;
  const Mat j = standardJ(n);
  // pi = Z1 ^ Z2 with Z_k = e_{2k-1} - i e_{2k} in T^{1,0}: coefficient matrix
  // pi_{ab} of pi = 1/2 pi^{ab} e_a ^ e_b.
  CMat z1 = CMat::Zero(n, 1), z2 = CMat::Zero(n, 1);
  z1(0, 0) = 1;
  z1(1, 0) = std::complex<double>(0, -1);
  z2(2, 0) = 1;
  z2(3, 0) = std::complex<double>(0, -1);
  const CMat pi = z1 * z2.transpose() - z2 * z1.transpose();
  const GenComplex jc = fromComplexBivector(j, pi);
  CHECK(residualSquare(jc) < 1e-12);
  CHECK(residualSkew(jc) < 1e-12);
  // Tangent and cotangent blocks stay those of fromComplex(j).
  CHECK(mx(Mat(jc.m.topLeftCorner(n, n) - j)) < 1e-13);
  CHECK(mx(Mat(jc.m.bottomRightCorner(n, n) + j.transpose())) < 1e-13);
  CHECK(mx(Mat(jc.m.bottomLeftCorner(n, n))) < 1e-13);
  // The bivector block is nonzero (pi has a genuine (2,0)-part).
  CHECK(mx(Mat(jc.m.topRightCorner(n, n))) > 1e-3);
  // A (1,1)-type bivector contributes nothing.
  const CMat mixed = z1 * z2.adjoint() - z2.conjugate() * z1.transpose();
  const GenComplex plain = fromComplexBivector(j, mixed);
  CHECK(mx(Mat(plain.m - fromComplex(j).m)) < 1e-12);
}

TEST_CASE("direct sums act blockwise") {
  const GenComplex a = fromComplex(standardJ(2));
  Mat w = Mat::Zero(2, 2);
  w(0, 1) = 2.5;
  w(1, 0) = -2.5;
  const GenComplex b = fromSymplectic(w);
  const GenComplex s = directSum(a, b);
  CHECK(s.n() == 4);
  CHECK(residualSquare(s) < 1e-12);
  CHECK(residualSkew(s) < 1e-12);
  // First-factor tangent vector is mapped exactly as by the first factor.
  Vec u = Vec::Zero(8);
  u(0) = 1;
  Vec want = Vec::Zero(8);
  want(1) = 1;  // J(d/dx1) = d/dx2 in factor one
  CHECK(mx(Vec(s.apply(GenElement(u)).c - want)) < 1e-13);
  // Second-factor tangent vector follows the symplectic rule J X = -w(X).
  Vec v = Vec::Zero(8);
  v(2) = 1;
  Vec want2 = Vec::Zero(8);
  want2(7) = -2.5;  // -2.5 dx4
  CHECK(mx(Vec(s.apply(GenElement(v)).c - want2)) < 1e-13);
}

TEST_CASE("assembled structures: defining identities and round-trip") {
  Rng rng(41);
  for (int t = 0; t < 60; t++) {
    const int n = 2 + 2 * static_cast<int>(rng.next() % 2);
    const GenMetric gm = randomGenMetric(rng, n);
    const Mat j1 = randomOrthogonalComplex(gm.g, +1, rng);
    const Mat j2 = randomOrthogonalComplex(gm.g, (t % 2) ? +1 : -1, rng);
    const GenComplex j = assemble(gm, j1, j2);
    CHECK(residualSquare(j) < 1e-9);
    CHECK(residualSkew(j) < 1e-9);
    CHECK(residualCompatible(gm, j) < 1e-9);
    const auto [k1, k2] = extractPair(gm, j);
    CHECK(mx(Mat(k1 - j1)) < 1e-9);
    CHECK(mx(Mat(k2 - j2)) < 1e-9);
    // E'-preservation, elementwise: J maps lifts to lifts.
    const Vec x = rng.gaussianVec(n);
    const GenElement img = j.apply(gm.liftP(x));
    CHECK(mx(Vec(img.c - gm.liftP(img.vec()).c)) < 1e-9 * std::max(1.0, mx(img.c)));
  }
}

TEST_CASE("structures over a trivial metric reduce to the classical ones") {
  // Same J in both slots with Theta = 0 gives the complex-structure model;
  // opposite slots give the symplectic model of w(X, Y) = g(X, JY).
  const int n = 4;
  Rng rng(43);
  const Mat g = Mat::Identity(n, n);
  const Mat j = randomOrthogonalComplex(g, +1, rng);
  const GenMetric gm(g, Mat::Zero(n, n));
  CHECK(mx(Mat(assemble(gm, j, j).m - fromComplex(j).m)) < 1e-12);
  Mat wform(n, n);
  for (int a = 0; a < n; a++)
    for (int b = 0; b < n; b++) wform(a, b) = (g * j)(a, b);  // w(e_a, e_b) = g(e_a, J e_b)
  CHECK(mx(Mat(assemble(gm, j, Mat(-j)).m - fromSymplectic(wform).m)) < 1e-12);
  // With a nonzero potential the assembled structure is the b-transform.
  const Mat th = randomAntisym(rng, n);
  const GenMetric gmt(g, th);
  CHECK(mx(Mat(assemble(gmt, j, j).m - conjugateByB(th, fromComplex(j)).m)) < 1e-12);
}

TEST_CASE("the induced second structure flips the second slot") {
  Rng rng(47);
  const int n = 4;
  const GenMetric gm = randomGenMetric(rng, n);
  const Mat j1 = randomOrthogonalComplex(gm.g, +1, rng);
  const Mat j2 = randomOrthogonalComplex(gm.g, -1, rng);
  const GenComplex j = assemble(gm, j1, j2);
  const GenComplex second = secondStructure(gm, j);
  CHECK(mx(Mat(second.m - assemble(gm, j1, Mat(-j2)).m)) < 1e-9);
  CHECK(mx(Mat(second.m - Mat(gOperator(gm).m * j.m))) < 1e-12);
}

TEST_CASE("pfaffian squares to the determinant") {
  Rng rng(53);
  for (int n : {2, 4, 6}) {
    for (int t = 0; t < 20; t++) {
      const Mat a = randomAntisym(rng, n);
      const double pf = pfaffian(a);
      CHECK(pf * pf == doctest::Approx(a.determinant()).epsilon(1e-8));
    }
  }
  Mat w = Mat::Zero(4, 4);
  w(0, 1) = 1;
  w(1, 0) = -1;
  w(2, 3) = 1;
  w(3, 2) = -1;
  CHECK(pfaffian(w) == doctest::Approx(1.0));  // e1^e2 + e3^e4 has pf = +1
}

TEST_CASE("orientation classification of orthogonal complex structures") {
  Rng rng(59);
  const int n = 4;
  const Mat j0 = standardJ(n);
  CHECK(orientationSign(Mat::Identity(n, n), j0) == +1);
  CHECK(orientationSign(Mat::Identity(n, n), Mat(-j0.transpose())) == +1);
  Mat flip = j0;
  flip.row(0) *= -1;
  flip.col(0) *= -1;  // conjugation by diag(-1,1,1,1) reverses the class
  CHECK(orientationSign(Mat::Identity(n, n), flip) == -1);
  // Components of random pairs match the requested signs.
  const GenMetric gm = randomGenMetric(rng, n);
  for (int t = 0; t < 20; t++) {
    const Component want = static_cast<Component>(t % 4);
    const auto [s1, s2] = componentSigns(want);
    const Mat j1 = randomOrthogonalComplex(gm.g, s1, rng);
    const Mat j2 = randomOrthogonalComplex(gm.g, s2, rng);
    CHECK(classifyPair(gm.g, j1, j2) == want);
    CHECK(classifyComponent(gm, assemble(gm, j1, j2)) == want);
  }
  CHECK(componentName(Component::PP) == std::string("++"));
  CHECK(componentName(Component::PM) == std::string("+-"));
  CHECK(componentName(Component::MP) == std::string("-+"));
  CHECK(componentName(Component::MM) == std::string("--"));
}

TEST_CASE("frames are g-orthonormal with prescribed handedness") {
  Rng rng(61);
  for (int t = 0; t < 30; t++) {
    const int n = 2 + 2 * static_cast<int>(rng.next() % 3);
    const Mat g = randomSpd(rng, n);
    for (int orient : {+1, -1}) {
      const Mat q = gOrthonormalFrame(g, orient);
      CHECK(mx(Mat(q.transpose() * g * q - Mat::Identity(n, n))) < 1e-10);
      CHECK(q.determinant() * orient > 0.0);
    }
    const Mat seeded = gramSchmidt(g, rng.gaussianMat(n, n), +1);
    CHECK(mx(Mat(seeded.transpose() * g * seeded - Mat::Identity(n, n))) < 1e-10);
    CHECK(seeded.determinant() > 0.0);
  }
}

TEST_CASE("random orthogonal complex structures satisfy their contract") {
  Rng rng(67);
  for (int t = 0; t < 40; t++) {
    const int n = 2 + 2 * static_cast<int>(rng.next() % 3);
    const Mat g = randomSpd(rng, n);
    const int sign = (t % 2) ? +1 : -1;
    const Mat j = randomOrthogonalComplex(g, sign, rng);
    CHECK(mx(Mat(j * j + Mat::Identity(n, n))) < 1e-10);
    CHECK(mx(Mat(j.transpose() * g * j - g)) < 1e-9 * mx(g));
    CHECK(orientationSign(g, j) == sign);
  }
}

TEST_CASE("b-transform of a metric shifts only the potential") {
  Rng rng(71);
  const int n = 4;
  const GenMetric gm = randomGenMetric(rng, n);
  const Mat b = randomAntisym(rng, n);
  const GenMetric gmb = bTransformMetric(b, gm);
  CHECK(mx(Mat(gmb.g - gm.g)) < 1e-14);
  CHECK(mx(Mat(gmb.theta - gm.theta - b)) < 1e-14);
  // e^B maps E'(gm) onto E'(gmb).
  const Vec x = rng.gaussianVec(n);
  CHECK(mx(Vec(bTransform(b, gm.liftP(x)).c - gmb.liftP(x).c)) < 1e-12);
  CHECK(mx(Vec(bTransform(b, gm.liftM(x)).c - gmb.liftM(x).c)) < 1e-12);
}
