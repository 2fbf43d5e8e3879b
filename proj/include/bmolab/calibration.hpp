#pragma once

// Frozen empirical constants. The structural inequalities these back have
// dimensional constants the analysis leaves implicit; each value below was
// measured once on the fixed calibration corpus (seed and sizes recorded
// here), then frozen with ~10% headroom. `bmolab calibrate` reproduces the
// raw measurements; the regression suites assert fresh corpora stay under
// the frozen values and that the raw statistic is stable across m=6 / m=7.

namespace bmolab::calibration {

// Corpus: 100 random piecewise-constant fields, dim 2, seed stream below.
inline constexpr unsigned long long kCorpusSeed = 414243;
inline constexpr int kCorpusFields = 100;

// 2^{-k0 n} sum of cube averages of |f| against ||f||_B (unit-cube mode).
// Raw max measured 0.240580 (m=6) / 0.240580 (m=7).
inline constexpr double kUniformAverage = 0.265;

// ||f(lambda .)||_B / ||f||_B for lambda in {2, 4}, compactly supported f.
// Raw max measured 0.669117 (m=6) / 0.669534 (m=7).
inline constexpr double kDilation = 0.74;

// ||phi f||_B / ((||phi||_inf + ||grad phi||_inf) ||f||_B) for the smooth
// bump multiplier. Raw max measured 0.028369 (m=6) / 0.029129 (m=7).
inline constexpr double kMultiplier = 0.033;

// Scale-functional floor of the n=1 log-singularity exemplar (oscillation
// that does not vanish with scale): min over k < m of [f]_{2^-k} on the
// unit interval, m=8. Raw min measured 0.549306.
inline constexpr double kLogSingularityFloor = 0.44;

} // namespace bmolab::calibration
