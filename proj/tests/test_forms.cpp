#include <gtest/gtest.h>

#include <random>

#include "binform/forms.hpp"

using namespace binform;

namespace {

BinaryForm iform(std::initializer_list<i64> c) { return BinaryForm::from_integers(std::vector<i64>(c)); }

FormPair pair(const char* name, BinaryForm F, BinaryForm G) { return {name, std::move(F), std::move(G)}; }

// Reverse to increasing powers of x for the Bareiss-based integer resultant.
std::vector<i64> affine(const BinaryForm& F) {
  std::vector<i64> out;
  for (auto it = F.coeffs.rbegin(); it != F.coeffs.rend(); ++it) out.push_back(it->c[0]);
  return out;
}

}  // namespace

TEST(Forms, EvalExample) {
  auto Q = NumberField::rationals();
  auto F = iform({1, 0, 1});
  EXPECT_EQ(form_eval(Q, F, FieldElement::from_int(1), FieldElement::from_int(2)), FieldElement::from_int(5));
}

TEST(Forms, EvalIsHomogeneous) {
  auto K = NumberField::create({1, 0, 1});
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<i64> u(-9, 9);
  auto rnd = [&] { return FieldElement::from_coords(std::vector<i64>{u(rng), u(rng)}); };
  for (int trial = 0; trial < 50; ++trial) {
    BinaryForm F;
    int d = 1 + trial % 4;
    for (int j = 0; j <= d; ++j) F.coeffs.push_back(rnd());
    auto s = rnd(), t = rnd(), c = rnd();
    auto lhs = form_eval(K, F, K.mul(c, s), K.mul(c, t));
    auto rhs = K.mul(K.pow(c, d), form_eval(K, F, s, t));
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Forms, ResultantExamples) {
  auto Q = NumberField::rationals();
  EXPECT_EQ(resultant(Q, iform({1, 0, 1}), iform({1, -1})), FieldElement::from_int(2));
  EXPECT_TRUE(resultant(Q, iform({1, 0, 1}), iform({1, 0, 1})).is_zero());
  // Common projective root at infinity.
  EXPECT_TRUE(resultant(Q, iform({0, 1}), iform({0, 3, 1})).is_zero());
}

TEST(Forms, ResultantMatchesBareissOracle) {
  auto Q = NumberField::rationals();
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<i64> u(-6, 6);
  for (int trial = 0; trial < 200; ++trial) {
    int dF = 1 + trial % 4, dG = trial % 5;
    BinaryForm F, G;
    for (int j = 0; j <= dF; ++j) F.coeffs.push_back(FieldElement::from_int(j == 0 ? 1 + u(rng) * u(rng) % 5 + 6 : u(rng)));
    for (int j = 0; j <= dG; ++j) G.coeffs.push_back(FieldElement::from_int(j == 0 ? 7 + (u(rng) + 6) : u(rng)));
    auto oracle = detail::resultant_int(affine(F), affine(G));
    EXPECT_EQ(big(resultant(Q, F, G).c[0]), oracle);
  }
}

TEST(Forms, ShiftExamples) {
  auto Q = NumberField::rationals();
  auto F = iform({1, 2, 3});
  EXPECT_EQ(shift_form(Q, F, FieldElement{}), F);
  EXPECT_EQ(shift_form(Q, iform({0, 1}), FieldElement::from_int(1)), iform({1, 1}));
  // F(s, 2s + t) evaluated pointwise.
  auto Fs = shift_form(Q, F, FieldElement::from_int(2));
  for (i64 s = -3; s <= 3; ++s)
    for (i64 t = -3; t <= 3; ++t)
      EXPECT_EQ(form_eval(Q, Fs, FieldElement::from_int(s), FieldElement::from_int(t)),
                form_eval(Q, F, FieldElement::from_int(s), FieldElement::from_int(2 * s + t)));
}

TEST(SquareClass, Examples) {
  auto Q = NumberField::rationals();
  auto v1 = square_class_test(Q, iform({1, 0, 1}), iform({0, 0, 0, 0, 1}));
  EXPECT_EQ(v1.kind, SquareClassVerdict::Kind::Square);
  EXPECT_TRUE(v1.irreducibility_certified);

  auto v2 = square_class_test(Q, iform({1, 0, 1}), iform({0, 0, 2}));
  ASSERT_EQ(v2.kind, SquareClassVerdict::Kind::NonSquare);
  ASSERT_TRUE(v2.witness_prime);
  EXPECT_EQ(v2.witness_prime->p, 5);
  EXPECT_EQ(v2.witness_root, 2);

  auto v3 = square_class_test(Q, iform({1, -1}), iform({0, 0, 1}));
  EXPECT_EQ(v3.kind, SquareClassVerdict::Kind::Square);
}

TEST(SquareClass, WitnessesRecheckUnderLegendre) {
  auto Q = NumberField::rationals();
  auto K = NumberField::create({1, 0, 1});
  struct Case {
    NumberField K;
    BinaryForm F, G;
  };
  std::vector<Case> cases = {
      {Q, iform({1, 0, 1}), iform({0, 0, 2})},
      {Q, iform({1, 0, 0, -2}), iform({0, 0, 3})},
      {Q, iform({1, 1, 0, 1}), iform({1, 0, 5})},
      {K, iform({1, 0, -3}), iform({0, 0, 5})},
  };
  for (const auto& c : cases) {
    auto v = square_class_test(c.K, c.F, c.G);
    ASSERT_EQ(v.kind, SquareClassVerdict::Kind::NonSquare);
    ASSERT_TRUE(v.witness_prime);
    auto lam = FieldElement::from_int(v.witness_root);
    EXPECT_TRUE(ideal_contains(c.K, v.witness_prime->ideal, form_eval(c.K, c.F, lam, c.K.one())));
    EXPECT_EQ(legendre(c.K, form_eval(c.K, c.G, lam, c.K.one()), *v.witness_prime), -1);
  }
}

TEST(SquareClass, SquaresInExtensionFound) {
  // -1 is a square in Q(i); 2 is a square in Q(sqrt 2).
  auto Q = NumberField::rationals();
  EXPECT_EQ(square_class_test(Q, iform({1, 0, 1}), iform({-1, 0, 0})).kind, SquareClassVerdict::Kind::Square);
  EXPECT_EQ(square_class_test(Q, iform({1, 0, -2}), iform({0, 0, 2})).kind, SquareClassVerdict::Kind::Square);
  // Degree one over Q(i): G(theta) = -1 = i^2.
  auto K = NumberField::create({1, 0, 1});
  EXPECT_EQ(square_class_test(K, iform({1, 0}), iform({-1, 0, 0})).kind, SquareClassVerdict::Kind::Square);
  EXPECT_EQ(square_class_test(K, iform({0, 1}), iform({3, 0, 0})).kind, SquareClassVerdict::Kind::NonSquare);
}

TEST(FormSystem, RankAndComplexityExamples) {
  auto Q = NumberField::rationals();
  auto s1 = FormSystem::create(Q, {pair("a", iform({1, 0, 1}), iform({0, 0, 0, 0, 1}))});
  EXPECT_EQ(s1.rank(), 1);
  EXPECT_EQ(s1.complexity(), 0);
  auto s2 = FormSystem::create(Q, {pair("a", iform({1, 0, 1}), iform({0, 0, 2}))});
  EXPECT_EQ(s2.rank(), 0);
  EXPECT_EQ(s2.complexity(), 2);
  auto s3 = FormSystem::create(Q, {pair("a", iform({1, -1}), iform({0, 0, 1})), pair("b", iform({1, 0, 1}), iform({0, 0, 2}))});
  EXPECT_EQ(s3.rank(), 1);
  EXPECT_EQ(s3.complexity(), 2);
  EXPECT_FALSE(s3.probabilistic());
}

TEST(FormSystem, Validation) {
  auto Q = NumberField::rationals();
  auto code = [&](std::vector<FormPair> p) {
    try {
      FormSystem::create(Q, std::move(p));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Unsupported;
  };
  EXPECT_EQ(code({pair("a", iform({1, 0, 1}), iform({1, 0}))}), ErrorCode::DegreeParity);
  EXPECT_EQ(code({pair("a", iform({1, 0, 1}), iform({1, 0, 1}))}), ErrorCode::ResultantZero);
  EXPECT_EQ(code({pair("a", iform({1, 0, 1}), iform({0, 0, 1})), pair("b", iform({2, 0, 2}), iform({0, 0, 1}))}),
            ErrorCode::ResultantZero);
}

TEST(FormSystem, InvariantsUnderShifts) {
  auto Q = NumberField::rationals();
  std::vector<FormSystem> systems = {
      FormSystem::create(Q, {pair("a", iform({1, 0, 1}), iform({0, 0, 0, 0, 1}))}),
      FormSystem::create(Q, {pair("a", iform({1, 0, 1}), iform({0, 0, 2}))}),
      FormSystem::create(Q, {pair("a", iform({1, -1}), iform({0, 0, 1})), pair("b", iform({1, 0, 1}), iform({0, 0, 2}))}),
  };
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<i64> u(-20, 20);
  for (const auto& S : systems) {
    int non_square = 0;
    for (int i = 0; i < S.size(); ++i) non_square += !S.verdict(i).counts_as_square();
    EXPECT_EQ(S.rank() + non_square, S.size());
    EXPECT_LE(S.complexity(), S.total_degree());
    EXPECT_EQ(S.complexity() == S.total_degree(), S.rank() == 0);
    for (int k = 0; k < 20; ++k) {
      auto T = unimodular_shift(S, FieldElement::from_int(u(rng)));
      EXPECT_EQ(T.rank(), S.rank());
      EXPECT_EQ(T.complexity(), S.complexity());
    }
  }
}
