#include <gtest/gtest.h>

#include "solitonkit/errors.hpp"
#include "solitonkit/model_spaces.hpp"
#include "oracles.hpp"

using namespace solitonkit;
using namespace solitonkit::model;

using oracles::cap2_eigenvalue;
using oracles::hpn_eigenvalue;

TEST(ModelSpaces, HpnSpectrumMatchesFormula) {
  for (int n : {2, 3, 4}) {
    const auto t = closed_form_spectrum(hpn_spectral(n), 20);
    ASSERT_EQ(t.rows.size(), 21u);
    for (const auto& r : t.rows) EXPECT_EQ(r.eigenvalue, hpn_eigenvalue(n, r.k)) << "n=" << n << " k=" << r.k;
    EXPECT_FALSE(spectrum_contains(t, Rational(1)));
  }
}

TEST(ModelSpaces, Cap2SpectrumMatchesFormula) {
  const auto t = closed_form_spectrum(cap2_spectral(), 20);
  for (const auto& r : t.rows) EXPECT_EQ(r.eigenvalue, cap2_eigenvalue(r.k));
  EXPECT_FALSE(spectrum_contains(t, Rational(1)));
}

TEST(ModelSpaces, SphereSpectrum) {
  const auto t = closed_form_spectrum(round_sphere(3, Rational(4)), 6);
  for (const auto& r : t.rows) EXPECT_EQ(r.eigenvalue, make_rational(r.k * (r.k + 2), 4));
  EXPECT_TRUE(spectrum_contains(t, make_rational(3, 4)));
  EXPECT_FALSE(spectrum_contains(t, Rational(1)));
}

TEST(ModelSpaces, RescalePreservesMembership) {
  const auto t = closed_form_spectrum(hpn_spectral(2), 10);
  const auto s = rescale(t, make_rational(1, 2), MetricTag::normalized);
  EXPECT_EQ(s.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_EQ(s.rows[i].eigenvalue * make_rational(1, 2), t.rows[i].eigenvalue);
  EXPECT_FALSE(spectrum_contains(s, Rational(2)));
}

TEST(ModelSpaces, MembershipNeedsLongEnoughTable) {
  const auto t = closed_form_spectrum(hpn_spectral(2), 1);
  EXPECT_THROW(spectrum_contains(t, Rational(5)), InsufficientSpectrumError);
}

TEST(ModelSpaces, FactoryAndErrors) {
  EXPECT_EQ(make_model("hpn", {Rational(3)}).kind, ModelKind::hpn_spectral);
  EXPECT_EQ(make_model("sphere", {Rational(2), Rational(1)}).real_dim, 2);
  EXPECT_THROW(make_model("klein", {}), PreconditionError);
  EXPECT_THROW(closed_form_spectrum(hpn_spectral(2), 0), PreconditionError);
  EXPECT_FALSE(to_csv(closed_form_spectrum(cap2_spectral(), 3)).empty());
}
