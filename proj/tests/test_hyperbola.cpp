#include <gtest/gtest.h>

#include <random>

#include "binform/hyperbola.hpp"

using namespace binform;

namespace {

BinaryForm iform(std::initializer_list<i64> c) { return BinaryForm::from_integers(std::vector<i64>(c)); }
FieldElement I(i64 v) { return FieldElement::from_int(v); }

FormSystem system_of(const NumberField& K, std::vector<std::pair<BinaryForm, BinaryForm>> pairs) {
  std::vector<FormPair> out;
  for (auto& [F, G] : pairs) out.push_back({"", F, G});
  return FormSystem::create(K, std::move(out));
}

Triplet box_triplet(const NumberField& Q, i64 w = 2) {
  return Triplet::create(Q, {{BallNorm::Max, 1, {}}}, I(1), I(0), rational_ideal(Q, w), unit_ideal(Q));
}

struct Case {
  std::string name;
  FormSystem S;
  Triplet T;
};

std::vector<Case> rational_cases() {
  auto Q = NumberField::rationals();
  return {
      {"sum of squares", system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 0, 0, 1})}}), box_triplet(Q)},
      {"rank zero", system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 2})}}), box_triplet(Q, 4)},
      {"linear", system_of(Q, {{iform({1, -2}), iform({0, 0, 1})}}), box_triplet(Q)},
      {"two pairs", system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 0, 0, 1})}, {iform({1, -2}), iform({0, 0, 1})}}),
       box_triplet(Q, 10)},
  };
}

// s^2 + 2 t^2 against t^2 over Q(i) on the unit Euclidean ball.
Case gaussian_case() {
  auto K = NumberField::create({1, 0, 1});
  return {"gaussian", system_of(K, {{iform({1, 0, 2}), iform({0, 0, 1})}}),
          Triplet::create(K, {{BallNorm::Euclidean, 1, {}}}, I(1), I(0), rational_ideal(K, 2), unit_ideal(K))};
}

Rational psi_total(const HyperbolaContext& ctx) {
  Rational sum = 0;
  for (const auto& psi : PsiVector::all(ctx.size())) sum += S_psi_direct(ctx, psi);
  return sum;
}

// Sum of (G/d) over the positive divisors d of the part of F prime to w.
i64 symbol_sum_oracle(i64 F, i64 G, i64 w) {
  i64 flat = iabs(F);
  for (i64 p = 2; p <= w; ++p)
    if (w % p == 0)
      while (flat % p == 0) flat /= p;
  i64 s = 0;
  for (i64 d = 1; d <= flat; ++d)
    if (flat % d == 0) s += jacobi_symbol(mod_floor(G, d), d);
  return s;
}

}  // namespace

TEST(Hyperbola, ContextConstants) {
  auto Q = NumberField::rationals();
  auto cases = rational_cases();
  auto ctx = make_context(cases[0].S, MultiplicativeSpec::zero(), cases[0].T, 3);
  EXPECT_EQ(ctx.c(0), 2);
  EXPECT_EQ(ctx.Y(0), 18);
  EXPECT_EQ(ctx.w_norm(0), 1);
  EXPECT_EQ(ctx.c_doublings(), 0);
  auto lin = make_context(cases[2].S, MultiplicativeSpec::zero(), cases[2].T, 3);
  EXPECT_EQ(lin.c(0), 3);
  EXPECT_EQ(lin.Y(0), 9);
  EXPECT_TRUE(lin.lattice_ready());
}

TEST(Hyperbola, FlatNormsStayBelowY) {
  auto cases = rational_cases();
  cases.push_back(gaussian_case());
  for (const auto& c : cases) {
    for (double X : {3.0, 7.5, 20.0}) {
      auto ctx = make_context(c.S, MultiplicativeSpec::zero(), c.T, X);
      const auto& K = c.S.field();
      for (const auto& pt : enumerate_Mstar(c.T, X))
        for (int i = 0; i < ctx.size(); ++i) {
          auto F = form_eval(K, c.S.pair(i).F, pt.s, pt.t);
          Rational flat(abs(K.norm_big(F)), big(ctx.w_norm(i)));
          EXPECT_LT(flat, ctx.Y(i)) << c.name;
        }
    }
  }
}

TEST(Hyperbola, FailsWithoutStrongAdmissibility) {
  auto Q = NumberField::rationals();
  auto S = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 2})}});
  try {
    make_context(S, MultiplicativeSpec::zero(), box_triplet(Q, 2), 10);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StrongAdmissibilityFailed);
  }
}

TEST(Hyperbola, PartialSumsExamples) {
  auto cases = rational_cases();
  auto ctx = make_context(cases[0].S, MultiplicativeSpec::zero(), cases[0].T, 3);
  Point unit{I(1), I(0)}, five{I(1), I(2)};
  EXPECT_EQ(r_minus(ctx, 0, unit), 1);
  EXPECT_EQ(r_plus(ctx, 0, unit), 0);
  EXPECT_EQ(r_minus(ctx, 0, five), 1);
  EXPECT_EQ(r_plus(ctx, 0, five), 1);
  try {
    auto lin = make_context(cases[2].S, MultiplicativeSpec::zero(), cases[2].T, 3);
    r_minus(lin, 0, Point{I(2), I(1)});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FormVanishes);
  }
}

TEST(Hyperbola, PartialSumsSplitTheSymbolSum) {
  auto cases = rational_cases();
  std::mt19937_64 rng(41);
  for (int k = 0; k < 3; ++k) {
    const auto& c = cases[k];
    auto ctx = make_context(c.S, MultiplicativeSpec::zero(), c.T, 150);
    auto pts = enumerate_Mstar(c.T, 150);
    const i64 w = c.T.w().hnf.pivot(0);
    for (int trial = 0; trial < 500; ++trial) {
      const auto& pt = pts[rng() % pts.size()];
      i64 F = form_eval(c.S.field(), c.S.pair(0).F, pt.s, pt.t).c[0];
      i64 G = form_eval(c.S.field(), c.S.pair(0).G, pt.s, pt.t).c[0];
      EXPECT_EQ(r_minus(ctx, 0, pt) + r_plus(ctx, 0, pt), symbol_sum_oracle(F, G, w)) << c.name << " " << F;
    }
  }
}

TEST(Hyperbola, RegionMembership) {
  auto cases = rational_cases();
  auto ctx = make_context(cases[0].S, MultiplicativeSpec::zero(), cases[0].T, 3);
  PsiVector zero{{0}}, one{{1}};
  Point five{I(1), I(2)}, unit{I(1), I(0)}, outside{I(5), I(0)};
  EXPECT_TRUE(in_Dpsi(ctx, one, std::vector<double>{1}, five));
  EXPECT_FALSE(in_Dpsi(ctx, one, std::vector<double>{1}, unit));
  EXPECT_TRUE(in_Dpsi(ctx, one, std::vector<double>{0}, unit));
  EXPECT_TRUE(in_Dpsi(ctx, zero, std::vector<double>{100}, unit));
  EXPECT_FALSE(in_Dpsi(ctx, zero, std::vector<double>{0}, outside));
  // Growing v never brings a point back.
  for (i64 s = -3; s <= 3; ++s)
    for (i64 t = -3; t <= 3; ++t) {
      bool was = true;
      for (double v = 0; v <= 6; v += 0.25) {
        bool now = in_Dpsi(ctx, one, std::vector<double>{v}, Point{I(s), I(t)});
        EXPECT_TRUE(was || !now);
        was = now;
      }
    }
}

TEST(Hyperbola, RegionAgreesWithExactMembership) {
  auto c = gaussian_case();
  auto ctx = make_context(c.S, MultiplicativeSpec::zero(), c.T, 5);
  std::mt19937_64 rng(43);
  for (const auto& psi : PsiVector::all(1)) {
    for (double v : {0.0, 0.5, 1.5}) {
      auto R = omega_region(ctx, psi, {v});
      int agree = 0, total = 0;
      for (const auto& pt : enumerate_Mstar(c.T, 5)) {
        ++total;
        agree += R.contains(pair_coordinates(c.S.field(), pt.s, pt.t)) == in_Dpsi(ctx, psi, std::vector<double>{v}, pt);
      }
      EXPECT_EQ(agree, total);
    }
  }
}

TEST(Hyperbola, RootsScanAgreesWithLifting) {
  auto Q = NumberField::rationals();
  for (const auto& F : {iform({1, 0, 1}), iform({1, 0, -2}), iform({1, -1, 0, -1}), iform({1, -2})}) {
    for (i64 d = 1; d <= 400; ++d) {
      auto fac = factor_ideal(Q, rational_ideal(Q, d));
      auto scanned = roots_mod_ideal(Q, F, fac, INT64_MAX);
      auto lifted = roots_mod_ideal(Q, F, fac, 0);
      ASSERT_EQ(scanned, lifted) << d;
      std::vector<FieldElement> oracle;
      for (i64 x = 0; x < d; ++x) {
        i64 v = 0;
        for (const auto& c : F.coeffs) v = mod_floor(v * x + c.c[0], d);
        if (v == 0) oracle.push_back(I(x));
      }
      EXPECT_EQ(scanned, oracle) << d;
    }
  }
  auto K = NumberField::create({1, 0, 1});
  for (const auto& F : {iform({1, 0, 2}), iform({1, 1, 1})}) {
    for (auto n : {I(3), I(9), I(5), I(25), FieldElement::from_coords(std::vector<i64>{1, 2}),
                   FieldElement::from_coords(std::vector<i64>{3, 6}), FieldElement::from_coords(std::vector<i64>{7, 14})}) {
      auto fac = factor_ideal(K, principal_ideal(K, n));
      EXPECT_EQ(roots_mod_ideal(K, F, fac, INT64_MAX), roots_mod_ideal(K, F, fac, 0));
    }
  }
}

TEST(Hyperbola, PsiSumsRecoverTheDivisorSum) {
  auto cases = rational_cases();
  auto ctx = make_context(cases[0].S, MultiplicativeSpec::zero(), cases[0].T, 3);
  EXPECT_EQ(psi_total(ctx), 18);
  EXPECT_EQ(divisor_sum_bruteforce(cases[0].S, MultiplicativeSpec::zero(), cases[0].T, 3), 18);

  for (const auto& f : {MultiplicativeSpec::zero(), MultiplicativeSpec::eta()}) {
    for (const auto& c : cases)
      for (double X : {3.0, 10.0, 37.0, 100.0}) {
        auto cx = make_context(c.S, f, c.T, X);
        EXPECT_EQ(psi_total(cx), divisor_sum_bruteforce(c.S, f, c.T, X)) << c.name << " X=" << X << " f=" << f.describe();
      }
    auto g = gaussian_case();
    for (double X : {5.0, 12.0}) {
      auto cx = make_context(g.S, f, g.T, X);
      EXPECT_EQ(psi_total(cx), divisor_sum_bruteforce(g.S, f, g.T, X)) << "gaussian X=" << X;
    }
  }
}

TEST(Hyperbola, ZeroWeightKeepsOnlyTrivialB) {
  auto cases = rational_cases();
  auto c0 = make_context(cases[0].S, MultiplicativeSpec::zero(), cases[0].T, 10);
  // With f = 0, S over all psi is the sum of the symbol sums alone.
  Rational expect = 0;
  for (const auto& pt : enumerate_Mstar(cases[0].T, 10)) expect += r_minus(c0, 0, pt) + r_plus(c0, 0, pt);
  EXPECT_EQ(psi_total(c0), expect);
}

TEST(Hyperbola, LatticeRouteMatchesDirect) {
  auto cases = rational_cases();
  for (const auto& f : {MultiplicativeSpec::zero(), MultiplicativeSpec::eta()}) {
    for (int k = 0; k < 3; ++k)
      for (double X : {3.0, 10.0, 20.0}) {
        auto ctx = make_context(cases[k].S, f, cases[k].T, X);
        for (const auto& psi : PsiVector::all(ctx.size()))
          EXPECT_EQ(S_psi_lattice(ctx, psi), S_psi_direct(ctx, psi))
              << cases[k].name << " X=" << X << " psi=" << psi.str() << " f=" << f.describe();
      }
    for (double X : {10.0, 20.0}) {
      auto ctx = make_context(cases[3].S, f, cases[3].T, X);
      for (const auto& psi : PsiVector::all(2))
        EXPECT_EQ(S_psi_lattice(ctx, psi), S_psi_direct(ctx, psi)) << "two pairs X=" << X << " psi=" << psi.str();
    }
  }
}

TEST(Hyperbola, LatticeRouteOverGaussianIntegers) {
  auto g = gaussian_case();
  for (const auto& f : {MultiplicativeSpec::zero(), MultiplicativeSpec::eta()}) {
    auto ctx = make_context(g.S, f, g.T, 5);
    for (const auto& psi : PsiVector::all(1))
      EXPECT_EQ(S_psi_lattice(ctx, psi), S_psi_direct(ctx, psi)) << psi.str() << " f=" << f.describe();
  }
}

TEST(Hyperbola, LatticeRouteThreadsAgree) {
  auto cases = rational_cases();
  auto ctx = make_context(cases[0].S, MultiplicativeSpec::eta(), cases[0].T, 20);
  for (const auto& psi : PsiVector::all(1)) EXPECT_EQ(S_psi_lattice(ctx, psi, 3), S_psi_lattice(ctx, psi, 1));
}

TEST(Hyperbola, LatticeRouteNeedsAbsorbedLeadingCoefficients) {
  auto Q = NumberField::rationals();
  auto S = system_of(Q, {{iform({3, 0, 1}), iform({1, 0, 0})}});
  auto ctx = make_context(S, MultiplicativeSpec::zero(), box_triplet(Q), 5);
  EXPECT_FALSE(ctx.lattice_ready());
  EXPECT_THROW(S_psi_lattice(ctx, PsiVector{{0}}), Error);
}
