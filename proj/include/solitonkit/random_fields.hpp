#pragma once

// Seeded smooth random fields for refinement studies.
//
// Torus: truncated trigonometric series with modes |k_x|, |k_y| <= bandlimit and
// amplitudes decaying like 1 / (1 + |k|^2). Sphere: polynomials of degree <= bandlimit
// in the ambient coordinates, pulled back to the charts through the embedding.

#include <random>

#include "solitonkit/field.hpp"

namespace solitonkit::grid {

using Rng = std::mt19937_64;

ScalarField random_scalar(AtlasPtr atlas, Rng& rng, int bandlimit = 3, double amplitude = 1.0);
CovectorField random_covector(AtlasPtr atlas, Rng& rng, int bandlimit = 3, double amplitude = 1.0);
VectorField random_vector(AtlasPtr atlas, Rng& rng, int bandlimit = 3, double amplitude = 1.0);
Sym2Field random_sym2(AtlasPtr atlas, Rng& rng, int bandlimit = 3, double amplitude = 1.0);
/// e^{2 phi} (dx^2 + dy^2) with phi = random_scalar (torus atlas).
MetricField random_conformal_metric(AtlasPtr atlas, Rng& rng, int bandlimit = 2, double amplitude = 0.2);

}  // namespace solitonkit::grid
