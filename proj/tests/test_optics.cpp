#include "locmin/optics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace locmin;

namespace {

const double kPi = std::numbers::pi;

const PupilGrid& grid64() {
  static const PupilGrid g = circular_pupil(64, 2.0);
  return g;
}

ZernikeCoeffs random_coeffs(Index k, double rms, RandomStream rng) {
  Vector v(k);
  for (Index i = 0; i < k; ++i) v[i] = rng.normal();
  return {v * (rms / v.norm())};
}

}  // namespace

TEST(Noll, IndexTable) {
  // Noll ordering: 1 piston, 2-3 tilt, 4 defocus, 5-6 astigmatism, 7-8 coma, 11 spherical.
  const int expected[][2] = {{0, 0}, {1, 1}, {1, -1}, {2, 0}, {2, -2}, {2, 2},
                             {3, -1}, {3, 1}, {3, -3}, {3, 3}, {4, 0}};
  for (int j = 1; j <= 11; ++j) {
    const auto nm = noll_to_nm(j);
    EXPECT_EQ(nm.n, expected[j - 1][0]) << "j=" << j;
    EXPECT_EQ(nm.m, expected[j - 1][1]) << "j=" << j;
  }
  EXPECT_THROW(noll_to_nm(0), InvalidInput);
}

TEST(ZernikePhase, ZeroCoefficientsGiveZeroPhase) {
  EXPECT_EQ(zernike_phase(ZernikeCoeffs::zeros(6), grid64()).norm(), 0.0);
}

TEST(ZernikePhase, DefocusPolynomial) {
  const auto& g = grid64();
  ZernikeCoeffs c = ZernikeCoeffs::zeros(1);
  c.coeffs[0] = 1.0;
  const Matrix ph = zernike_phase(c, g);
  for (Index r = 0; r < g.size; ++r) {
    for (Index col = 0; col < g.size; ++col) {
      if (!g.support(r, col)) {
        EXPECT_EQ(ph(r, col), 0.0);
        continue;
      }
      const double rho = g.rho(r, col);
      EXPECT_NEAR(ph(r, col), 2.0 * kPi * std::sqrt(3.0) * (2.0 * rho * rho - 1.0), 1e-12);
    }
  }
}

TEST(ZernikePhase, ModesNearlyOrthonormalOnDisk) {
  const auto& g = grid64();
  const Index k = 12;
  std::vector<Matrix> modes;
  for (Index j = 0; j < k; ++j) {
    ZernikeCoeffs c = ZernikeCoeffs::zeros(k);
    c.coeffs[j] = 1.0;
    modes.push_back(zernike_phase(c, g) / (2.0 * kPi));
  }
  const double area = g.aperture.sum();
  for (Index a = 0; a < k; ++a) {
    const double norm_a = (modes[a].array().square() * g.aperture.array()).sum() / area;
    EXPECT_NEAR(norm_a, 1.0, 0.02);
    for (Index b = 0; b < a; ++b) {
      const double ip = (modes[a].array() * modes[b].array() * g.aperture.array()).sum() / area;
      EXPECT_LE(std::abs(ip), 1e-2) << a << "," << b;
    }
  }
}

TEST(ZernikePhase, RmsMatchesCoefficientNorm) {
  const auto& g = grid64();
  RandomStream rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto c = random_coeffs(12, 0.15, rng.child(t));
    const double rms = phase_rms(zernike_phase(c, g), g) / (2.0 * kPi);
    EXPECT_NEAR(rms / c.rms(), 1.0, 0.01);
  }
}

TEST(Pupil, InvalidInputs) {
  EXPECT_THROW(make_pupil(Matrix::Ones(4, 5)), InvalidInput);
  EXPECT_THROW(make_pupil(Matrix::Ones(4, 4), 1.5), InvalidInput);
  EXPECT_THROW(make_pupil(Matrix::Constant(4, 4, -0.1)), InvalidInput);
  const auto g = circular_pupil(16, 2.0);
  EXPECT_EQ(g.padded(), 32);
  EXPECT_EQ(g.support.count(), (g.aperture.array() > 0.0).count());
}

TEST(Psf, DiffractionLimitedPeakAndSymmetry) {
  const auto& g = grid64();
  const PSF psf = psf_from_phase(Matrix::Zero(g.size, g.size), g);
  const Index m = g.padded();
  Index r = 0;
  Index c = 0;
  psf.intensity.maxCoeff(&r, &c);
  EXPECT_EQ(r, m / 2);
  EXPECT_EQ(c, m / 2);
  // 90 degree rotation about the center sample
  double worst = 0.0;
  for (Index i = 1; i < m; ++i) {
    for (Index j = 1; j < m; ++j) {
      const Index ri = j;
      const Index rj = m - i;
      worst = std::max(worst, std::abs(psf.intensity(i, j) - psf.intensity(ri, rj)));
    }
  }
  EXPECT_LT(worst, 1e-6 * psf.intensity.maxCoeff());
}

TEST(Psf, SumsToOneAndNonNegative) {
  const auto& g = grid64();
  RandomStream rng(5);
  for (int t = 0; t < 5; ++t) {
    const PSF psf = psf_from_phase(zernike_phase(random_coeffs(12, 0.3, rng.child(t)), g), g);
    EXPECT_NEAR(psf.intensity.sum(), 1.0, 1e-10);
    EXPECT_GE(psf.intensity.minCoeff(), 0.0);
  }
}

TEST(Psf, ParsevalTotalEqualsApertureEnergy) {
  const auto& g = grid64();
  const Matrix phase = zernike_phase(random_coeffs(12, 0.2, RandomStream(8)), g);
  const CMatrix coh = coherent_psf(phase, g);
  const double total = coh.cwiseAbs2().sum();
  EXPECT_NEAR(total / aperture_energy(g), 1.0, 1e-8);
}

TEST(Fft, RoundTripAndShift) {
  CMatrix a(4, 6);
  RandomStream rng(2);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(rng.normal(), rng.normal());
  EXPECT_LT((fft2(fft2(a, false), true) - a).norm(), 1e-12);
  const Matrix s = fftshift(Matrix(a.real()));
  EXPECT_EQ(s(2, 3), a.real()(0, 0));
}

TEST(Strehl, UnaberratedIsOne) {
  EXPECT_NEAR(strehl(ZernikeCoeffs::zeros(12), grid64()), 1.0, 1e-14);
}

TEST(Strehl, MarechalApproximation) {
  RandomStream rng(11);
  const double target = std::exp(-std::pow(2.0 * kPi * 0.05, 2));
  EXPECT_NEAR(target, 0.906, 1e-3);
  for (int t = 0; t < 10; ++t) {
    const double s = strehl(random_coeffs(12, 0.05, rng.child(t)), grid64());
    EXPECT_LT(std::abs(s - target) / target, 0.10);
    EXPECT_GT(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(Strehl, MatchesPsfPeakRatio) {
  const auto& g = grid64();
  const auto c = random_coeffs(12, 0.1, RandomStream(4));
  const PSF ref = psf_from_phase(Matrix::Zero(g.size, g.size), g);
  const PSF ab = psf_from_phase(zernike_phase(c, g), g);
  const Index m = g.padded();
  EXPECT_NEAR(strehl(c, g), ab.intensity(m / 2, m / 2) / ref.intensity(m / 2, m / 2), 1e-10);
}

TEST(Strehl, PistonInvariant) {
  const auto& g = grid64();
  const auto c = random_coeffs(12, 0.1, RandomStream(4));
  const Matrix phase = zernike_phase(c, g);
  Matrix shifted = phase;
  for (Index r = 0; r < g.size; ++r) {
    for (Index col = 0; col < g.size; ++col) {
      if (g.support(r, col)) shifted(r, col) += 1.234;
    }
  }
  const Index m = g.padded();
  EXPECT_NEAR(psf_from_phase(phase, g).intensity(m / 2, m / 2),
              psf_from_phase(shifted, g).intensity(m / 2, m / 2), 1e-14);
}

TEST(Strehl, GradientMatchesFiniteDifferences) {
  const StrehlEvaluator ev(grid64(), 12);
  const Vector b = random_coeffs(12, 0.2, RandomStream(6)).coeffs;
  Vector grad;
  ev.value_and_gradient(b, grad);
  const double h = 1e-6;
  for (Index i = 0; i < 12; ++i) {
    Vector p = b;
    Vector q = b;
    p[i] += h;
    q[i] -= h;
    EXPECT_NEAR(grad[i], (ev.value(p) - ev.value(q)) / (2.0 * h), 1e-6);
  }
}

TEST(Shell, TauZeroIsSingleZeroPoint) {
  const auto shell = max_strehl_shell(0.0, 12, grid64(), 8, RandomStream(1));
  ASSERT_EQ(shell.size(), 1u);
  EXPECT_EQ(shell[0].beta.coeffs.norm(), 0.0);
  EXPECT_EQ(shell[0].strehl, 1.0);
  EXPECT_THROW(max_strehl_shell(-0.1, 12, grid64(), 8, RandomStream(1)), InvalidInput);
}

TEST(Shell, PointsOnSphereAndSorted) {
  const auto shell = max_strehl_shell(0.2, 12, grid64(), 32, RandomStream(2));
  ASSERT_FALSE(shell.empty());
  for (std::size_t i = 0; i < shell.size(); ++i) {
    EXPECT_NEAR(shell[i].beta.rms(), 0.2, 1e-8);
    EXPECT_NEAR(shell[i].strehl, strehl(shell[i].beta, grid64()), 1e-12);
    if (i > 0) EXPECT_LE(shell[i].strehl, shell[i - 1].strehl);
  }
}

TEST(Shell, BeatsRandomSameRmsSamples) {
  const auto& g = grid64();
  const auto shell = max_strehl_shell(0.2, 12, g, 32, RandomStream(2));
  const StrehlEvaluator ev(g, 12);
  RandomStream rng(99);
  double best_random = 0.0;
  for (int i = 0; i < 1000; ++i) {
    best_random = std::max(best_random, ev.value(random_coeffs(12, 0.2, rng.child(i)).coeffs));
  }
  for (const auto& p : shell) EXPECT_GE(p.strehl, best_random);
}

TEST(Shell, StrehlDecreasesWithTau) {
  double prev = 1.0;
  for (double tau : {0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09}) {
    const auto shell = max_strehl_shell(tau, 12, grid64(), 8, RandomStream(3));
    for (const auto& p : shell) EXPECT_LE(p.strehl, prev + 1e-12) << "tau " << tau;
    prev = shell.back().strehl;
  }
}

TEST(Shell, PureFunctionOfItsArguments) {
  const auto a = max_strehl_shell(0.1, 6, circular_pupil(32), 6, RandomStream(4));
  const auto b = max_strehl_shell(0.1, 6, circular_pupil(32), 6, RandomStream(4));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].beta.coeffs, b[i].beta.coeffs);
}

TEST(Bound, ZeroPerturbation) {
  const auto& g = grid64();
  const CMatrix coh = coherent_psf(zernike_phase(random_coeffs(12, 0.1, RandomStream(1)), g), g);
  const auto b = psf_perturbation_bound(coh, ZernikeCoeffs::zeros(12), g);
  EXPECT_LT(b.epsilon.maxCoeff(), 1e-15);
  EXPECT_GE(b.bound.minCoeff(), 0.0);
}

TEST(Bound, HoldsPixelwiseForRandomPerturbations) {
  const auto& g = grid64();
  RandomStream rng(12);
  long long violations = 0;
  for (int t = 0; t < 100; ++t) {
    const CMatrix coh =
        coherent_psf(zernike_phase(random_coeffs(12, 0.1, rng.child(2 * t)), g), g);
    const auto beta = random_coeffs(12, 0.2, rng.child(2 * t + 1));
    const auto aligned = psf_perturbation_bound(coh, beta, g);
    violations += (aligned.epsilon.array() > aligned.bound.array()).count();
    const auto plain = psf_perturbation_bound(coh, beta, g, Complex{1.0, 0.0});
    EXPECT_TRUE(((aligned.bound - plain.bound).array() <= 1e-15).all());
  }
  EXPECT_EQ(violations, 0);
}

TEST(Bound, ShrinksWithTau) {
  const auto& g = grid64();
  const CMatrix coh = coherent_psf(Matrix::Zero(g.size, g.size), g);
  const Vector dir = random_coeffs(12, 1.0, RandomStream(5)).coeffs;
  double prev = kInf;
  std::vector<double> m;
  for (double tau : {0.2, 0.05, 0.01, 0.001}) {
    m.push_back(psf_perturbation_bound(coh, ZernikeCoeffs{dir * tau}, g).bound.maxCoeff());
    EXPECT_LT(m.back(), prev);
    prev = m.back();
  }
  // first order in tau once the perturbation is small
  EXPECT_NEAR(m[3] / m[2], 0.1, 0.01);
}

TEST(RestartCandidates, ZeroCurrentGivesShell) {
  const auto shell = max_strehl_shell(0.2, 6, circular_pupil(32), 8, RandomStream(7));
  const auto cands = restart_candidates(ZernikeCoeffs::zeros(6), 0.2, shell);
  ASSERT_EQ(cands.size(), shell.size());
  for (std::size_t i = 0; i < cands.size(); ++i) EXPECT_EQ(cands[i].coeffs, shell[i].beta.coeffs);
}

TEST(RestartCandidates, DistanceAndOrdering) {
  const auto g = circular_pupil(32);
  auto shell = max_strehl_shell(0.2, 6, g, 8, RandomStream(7));
  std::reverse(shell.begin(), shell.end());
  const auto current = random_coeffs(6, 0.3, RandomStream(1));
  const auto cands = restart_candidates(current, 0.2, shell);
  double prev = kInf;
  for (const auto& c : cands) {
    EXPECT_NEAR((c.coeffs - current.coeffs).norm(), 0.2, 1e-8);
    const double s = strehl(ZernikeCoeffs{c.coeffs - current.coeffs}, g);
    EXPECT_LE(s, prev + 1e-12);
    prev = s;
  }
  EXPECT_THROW(restart_candidates(current, 0.2, {}), InvalidInput);
  EXPECT_THROW(restart_candidates(current, 0.3, shell), InvalidInput);
}
