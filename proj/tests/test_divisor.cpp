#include <gtest/gtest.h>

#include <random>
#include <set>

#include "binform/divisor.hpp"

using namespace binform;

namespace {

BinaryForm iform(std::initializer_list<i64> c) { return BinaryForm::from_integers(std::vector<i64>(c)); }
FieldElement I(i64 v) { return FieldElement::from_int(v); }
FieldElement el(i64 a, i64 b) { return FieldElement::from_coords(std::vector<i64>{a, b}); }

FormSystem system_of(const NumberField& K, std::vector<std::pair<BinaryForm, BinaryForm>> pairs) {
  std::vector<FormPair> out;
  for (auto& [F, G] : pairs) out.push_back({"", F, G});
  return FormSystem::create(K, std::move(out));
}

// Running example over Q: box [-1, 1]^2, (sigma, tau) = (1, 0), w = (2).
Triplet box_triplet(const NumberField& Q, i64 w = 2, double radius = 1) {
  return Triplet::create(Q, {{BallNorm::Max, radius, {}}}, I(1), I(0), rational_ideal(Q, w), unit_ideal(Q));
}

// Naive points of the running example straight from the definition.
std::set<Point> naive_box_points(i64 X, i64 w) {
  std::set<Point> out;
  for (i64 s = -X; s <= X; ++s)
    for (i64 t = -X; t <= X; ++t)
      if (mod_floor(s - 1, w) == 0 && mod_floor(t, w) == 0 && std::gcd(s, t) == 1) out.insert({I(s), I(t)});
  return out;
}

i64 tau_int(i64 n) {
  n = iabs(n);
  i64 c = 0;
  for (i64 d = 1; d <= n; ++d) c += n % d == 0;
  return c;
}

}  // namespace

TEST(MultiplicativeSpec, OneFExamples) {
  auto Q = NumberField::rationals();
  EXPECT_EQ(one_f(Q, MultiplicativeSpec::zero(), rational_ideal(Q, 30)), 1);
  EXPECT_EQ(one_f(Q, MultiplicativeSpec::eta(), rational_ideal(Q, 6)), Rational(1, 2));
  EXPECT_EQ(one_f(Q, MultiplicativeSpec::eta(), rational_ideal(Q, 1)), 1);
  // Only distinct primes count.
  EXPECT_EQ(one_f(Q, MultiplicativeSpec::eta(), rational_ideal(Q, 12)), Rational(1, 2));
}

TEST(MultiplicativeSpec, GroupLawUnderComposition) {
  auto K = NumberField::create({1, 0, 1});
  auto tab = MultiplicativeSpec::table({{{5, 0}, Rational(1, 3)}, {{5, 1}, Rational(-1, 7)}, {{3, 0}, Rational(2, 9)}}, K);
  auto eta = MultiplicativeSpec::eta();
  auto both = MultiplicativeSpec::compose(tab, eta);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<i64> u(-30, 30);
  for (int k = 0; k < 200; ++k) {
    FieldElement x = el(u(rng), u(rng));
    if (x.is_zero()) continue;
    Ideal a = principal_ideal(K, x);
    EXPECT_EQ(one_f(K, both, a), one_f(K, tab, a) * one_f(K, eta, a));
  }
}

TEST(MultiplicativeSpec, TableRejectsValuesAtMostMinusOne) {
  auto Q = NumberField::rationals();
  EXPECT_THROW(MultiplicativeSpec::table({{{3, 0}, Rational(-1)}}, Q), Error);
  auto t = MultiplicativeSpec::table({{{3, 0}, Rational(1, 2)}}, Q);
  EXPECT_EQ(t.bound_c(), Rational(3, 2));
}

TEST(Flat, Examples) {
  auto Q = NumberField::rationals();
  EXPECT_EQ(flat_ideal(Q, rational_ideal(Q, 20), rational_ideal(Q, 6)), rational_ideal(Q, 5));
  EXPECT_EQ(flat_ideal(Q, rational_ideal(Q, 12), rational_ideal(Q, 6)), rational_ideal(Q, 1));
  EXPECT_EQ(flat_ideal(Q, rational_ideal(Q, 45), rational_ideal(Q, 2)), rational_ideal(Q, 45));
}

TEST(Flat, CompletelyMultiplicative) {
  auto K = NumberField::create({1, 0, 1});
  Ideal w = principal_ideal(K, el(6, 0));
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<i64> u(-25, 25);
  for (int k = 0; k < 200; ++k) {
    FieldElement x = el(u(rng), u(rng)), y = el(u(rng), u(rng));
    if (x.is_zero() || y.is_zero()) continue;
    Ideal a = principal_ideal(K, x), b = principal_ideal(K, y);
    Ideal lhs = flat_ideal(K, ideal_mul(K, a, b), w);
    Ideal rhs = ideal_mul(K, flat_ideal(K, a, w), flat_ideal(K, b, w));
    EXPECT_EQ(lhs, rhs);
    EXPECT_TRUE(ideal_divides(lhs, ideal_mul(K, a, b)));
    EXPECT_TRUE(ideals_coprime(K, lhs, w));
  }
}

TEST(Triplet, Validation) {
  auto Q = NumberField::rationals();
  EXPECT_THROW(Triplet::create(Q, {{BallNorm::Max, 1, {}}}, I(1), I(0), rational_ideal(Q, 3), unit_ideal(Q)), Error);
  EXPECT_THROW(Triplet::create(Q, {{BallNorm::Max, 0, {}}}, I(1), I(0), rational_ideal(Q, 2), unit_ideal(Q)), Error);
  EXPECT_THROW(Triplet::create(Q, {{BallNorm::Max, 1, {}}}, I(2), I(4), rational_ideal(Q, 2), unit_ideal(Q)), Error);
  EXPECT_NO_THROW(Triplet::create(Q, {{BallNorm::Max, 1, {}}}, I(3), I(0), rational_ideal(Q, 6), rational_ideal(Q, 3)));
}

TEST(Mstar, RunningExample) {
  auto Q = NumberField::rationals();
  auto T = box_triplet(Q);
  auto pts = enumerate_Mstar(T, 3);
  std::set<Point> got(pts.begin(), pts.end());
  EXPECT_EQ(pts.size(), got.size());
  std::set<Point> want;
  for (i64 s : {-1, 1}) want.insert({I(s), I(0)});
  for (i64 s : {-1, 1, -3, 3})
    for (i64 t : {-2, 2}) want.insert({I(s), I(t)});
  EXPECT_EQ(got, want);
  EXPECT_EQ(enumerate_Mstar(T, 1).size(), 2u);
  EXPECT_TRUE(enumerate_Mstar(T, 0.5).empty());
}

TEST(Mstar, MatchesNaiveOracleOverQ) {
  auto Q = NumberField::rationals();
  for (i64 w : {2, 4, 6}) {
    auto T = box_triplet(Q, w);
    for (i64 X = 1; X <= 20; ++X) {
      auto pts = enumerate_Mstar(T, static_cast<double>(X));
      std::set<Point> got(pts.begin(), pts.end());
      EXPECT_EQ(got.size(), pts.size());
      EXPECT_EQ(got, naive_box_points(X, w)) << "w=" << w << " X=" << X;
    }
  }
}

TEST(Mstar, MatchesNaiveOracleOverGaussian) {
  auto K = NumberField::create({1, 0, 1});
  Ideal w = principal_ideal(K, el(2, 0));
  for (auto norm : {BallNorm::Euclidean, BallNorm::Max}) {
    auto T = Triplet::create(K, {{norm, 1.0, {}}}, I(1), I(0), w, unit_ideal(K));
    for (double X : {1.0, 5.0, 12.0, 20.0}) {
      auto pts = enumerate_Mstar(T, X);
      std::set<Point> got(pts.begin(), pts.end());
      EXPECT_EQ(got.size(), pts.size());
      std::set<Point> want;
      const i64 B = 6;
      for (i64 a = -B; a <= B; ++a)
        for (i64 b = -B; b <= B; ++b)
          for (i64 c = -B; c <= B; ++c)
            for (i64 d = -B; d <= B; ++d) {
              Point p{el(a, b), el(c, d)};
              if (T.contains(p, X)) want.insert(p);
            }
      EXPECT_EQ(got, want) << "X=" << X;
      for (const auto& p : pts) EXPECT_TRUE(T.contains(p, X));
    }
  }
}

TEST(Mstar, SymmetricUnderNegation) {
  auto K = NumberField::create({1, 0, 1});
  // (-1, 0) = (1, 0) mod 2.
  auto T = Triplet::create(K, {{BallNorm::Euclidean, 1.0, {}}}, I(1), I(0), principal_ideal(K, el(2, 0)), unit_ideal(K));
  auto pts = enumerate_Mstar(T, 30);
  std::set<Point> got(pts.begin(), pts.end());
  for (const auto& p : pts) EXPECT_TRUE(got.count({K.neg(p.s), K.neg(p.t)}));
}

TEST(RValue, Examples) {
  auto Q = NumberField::rationals();
  auto T = box_triplet(Q);
  auto S1 = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 0, 0, 1})}});
  auto S0 = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 2})}});
  auto zero = MultiplicativeSpec::zero();
  EXPECT_EQ(r_value(S1, zero, T, {I(1), I(2)}), 2);
  EXPECT_EQ(r_value(S1, zero, T, {I(1), I(0)}), 1);
  EXPECT_EQ(r_value(S0, zero, T, {I(1), I(2)}), 0);
  auto St = system_of(Q, {{iform({0, 1}), iform({1, 0, 0})}});
  EXPECT_THROW(r_value(St, zero, T, {I(1), I(0)}), Error);
}

TEST(RValue, NonNegativeAndBoundedByDivisorCount) {
  auto Q = NumberField::rationals();
  auto T = box_triplet(Q, 4);
  auto S = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 2})}, {iform({1, -2}), iform({0, 0, 1})}});
  PointAnalyzer A(S, T);
  std::vector<PairAtPoint> data;
  for (const auto& p : enumerate_Mstar(T, 40)) {
    ASSERT_TRUE(A.analyze(p.s, p.t, data));
    for (const auto& pd : data) {
      EXPECT_GE(pd.divisor_symbol_sum(), 0);
      EXPECT_LE(pd.divisor_symbol_sum(), pd.divisor_count());
    }
    EXPECT_GE(r_from_analysis(data, MultiplicativeSpec::eta()), 0);
  }
}

TEST(DivisorSum, Examples) {
  auto Q = NumberField::rationals();
  auto S1 = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 0, 0, 1})}});
  auto zero = MultiplicativeSpec::zero();
  EXPECT_EQ(divisor_sum_bruteforce(S1, zero, box_triplet(Q), 3), 18);
  EXPECT_EQ(divisor_sum_bruteforce(S1, zero, box_triplet(Q), 1), 2);
  EXPECT_EQ(divisor_sum_bruteforce(S1, zero, box_triplet(Q, 2, 0.1), 1), 0);
}

TEST(DivisorSum, MatchesPointwiseOracle) {
  auto Q = NumberField::rationals();
  auto S = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 0, 0, 1})}});
  // f = 0: r = tau(F(s, t)) with odd part only since w = (2); F is odd here anyway.
  for (i64 X : {5, 11, 17}) {
    i64 want = 0;
    for (const auto& p : naive_box_points(X, 2)) want += tau_int(p.s.c[0] * p.s.c[0] + p.t.c[0] * p.t.c[0]);
    EXPECT_EQ(divisor_sum_bruteforce(S, MultiplicativeSpec::zero(), box_triplet(Q), static_cast<double>(X)), want);
  }
}

TEST(DivisorSum, ScheduleAndThreadsAgree) {
  auto Q = NumberField::rationals();
  auto S = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 2})}, {iform({1, -2}), iform({0, 0, 1})}});
  auto T = box_triplet(Q, 4);
  auto eta = MultiplicativeSpec::eta();
  std::vector<double> xs{10, 25, 40};
  auto one = divisor_sums(S, eta, T, xs);
  SumOptions opt;
  opt.jobs = 3;
  auto three = divisor_sums(S, eta, T, xs, opt);
  for (size_t k = 0; k < xs.size(); ++k) {
    EXPECT_EQ(one.sums[k], three.sums[k]);
    EXPECT_EQ(one.sums[k], divisor_sum_bruteforce(S, eta, T, xs[k]));
    EXPECT_EQ(one.point_counts[k], static_cast<i64>(enumerate_Mstar(T, xs[k]).size()));
  }
  EXPECT_TRUE(one.admissibility.ok(true));
}

TEST(DivisorSum, MonotoneInRadius) {
  auto K = NumberField::create({1, 0, 1});
  auto S = system_of(K, {{iform({1, 0, 2}), iform({0, 0, 1})}});
  Rational prev = -1;
  for (double R : {0.5, 0.8, 1.0, 1.3}) {
    auto T = Triplet::create(K, {{BallNorm::Euclidean, R, {}}}, I(1), I(0), principal_ideal(K, el(2, 0)), unit_ideal(K));
    Rational d = divisor_sum_bruteforce(S, MultiplicativeSpec::zero(), T, 10);
    EXPECT_GE(d, prev);
    prev = d;
  }
}

TEST(Admissibility, Examples) {
  auto Q = NumberField::rationals();
  auto T = box_triplet(Q);
  auto S1 = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 0, 0, 1})}});
  auto rep = check_admissible(S1, T, 50);
  EXPECT_TRUE(rep.admissible);
  EXPECT_TRUE(rep.strongly_admissible);
  EXPECT_GT(rep.points_checked, 0);

  auto St = system_of(Q, {{iform({0, 1}), iform({1, 0, 0})}});
  auto bad = check_admissible(St, T, 10);
  EXPECT_FALSE(bad.admissible);
  EXPECT_EQ(bad.pair_index, 0);

  // (2 / F) fails for F = 5 at w = (2); w = (4) forces F = 1 mod 8.
  auto S0 = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 2})}});
  auto r2 = check_admissible(S0, T, 10);
  EXPECT_FALSE(r2.admissible);
  ASSERT_TRUE(r2.point);
  EXPECT_TRUE(check_admissible(S0, box_triplet(Q, 4), 60).ok(true));
}

TEST(Thinning, ContainmentAndInequality) {
  auto Q = NumberField::rationals();
  auto T = box_triplet(Q);
  auto S = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 0, 0, 1})}});
  auto f = MultiplicativeSpec::eta();
  auto r1 = thinning_compare(S, f, T, 1, 20);
  EXPECT_TRUE(r1.ok());
  EXPECT_EQ(r1.d_base, r1.d_thin);
  for (auto [k, X] : std::vector<std::pair<int, double>>{{2, 20}, {3, 50}}) {
    auto r = thinning_compare(S, f, T, k, X);
    EXPECT_TRUE(r.contained);
    EXPECT_TRUE(r.r_agree);
    EXPECT_TRUE(r.inequality);
    EXPECT_LT(r.points_thin, r.points_base);
  }
}

TEST(JacobiTrivial, Examples) {
  auto Q = NumberField::rationals();
  auto T = box_triplet(Q);
  auto S1 = system_of(Q, {{iform({1, 0, 1}), iform({0, 0, 0, 0, 1})}});
  auto rep = jacobi_trivial_check(S1, T, 50, 0);
  EXPECT_TRUE(rep.ok);
  EXPECT_GT(rep.points_checked, 0);

  auto S2 = system_of(Q, {{iform({1, -2}), iform({0, 0, 1})}});
  EXPECT_TRUE(jacobi_trivial_check(S2, T, 30, 0).ok);
  PointAnalyzer A(S2, T);
  std::vector<PairAtPoint> data;
  for (const auto& p : enumerate_Mstar(T, 30)) {
    ASSERT_TRUE(A.analyze(p.s, p.t, data));
    i64 v = p.s.c[0] - 2 * p.t.c[0];
    while (v % 2 == 0) v /= 2;
    EXPECT_EQ(data[0].divisor_symbol_sum(), tau_int(v));
  }
}
