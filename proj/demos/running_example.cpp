// D(X) for s^2 + t^2 against t^4 over Q, computed three ways.

#include <iostream>

#include "binform/hyperbola.hpp"

using namespace binform;

int main(int argc, char** argv) {
  const double X = argc > 1 ? std::atof(argv[1]) : 20;
  auto Q = NumberField::rationals();
  auto S = FormSystem::create(Q, {{"squares", BinaryForm::from_integers({1, 0, 1}), BinaryForm::from_integers({0, 0, 0, 0, 1})}});
  auto T = Triplet::create(Q, {{BallNorm::Max, 1, {}}}, FieldElement::from_int(1), FieldElement::from_int(0),
                           rational_ideal(Q, 2), unit_ideal(Q));
  auto f = MultiplicativeSpec::zero();

  std::cout << "rank " << S.rank() << ", complexity " << S.complexity() << "\n";
  std::cout << "points in M*: " << enumerate_Mstar(T, X).size() << "\n";

  auto ctx = make_context(S, f, T, X);
  Rational direct = 0, lattice = 0;
  for (const auto& psi : PsiVector::all(S.size())) {
    Rational d = S_psi_direct(ctx, psi), l = S_psi_lattice(ctx, psi);
    std::cout << "psi " << psi.str() << ": " << to_pq(d) << " (lattice " << to_pq(l) << ")\n";
    direct += d;
    lattice += l;
  }
  std::cout << "D(" << X << ") = " << to_pq(divisor_sum_bruteforce(S, f, T, X)) << ", psi sums " << to_pq(direct) << ", "
            << to_pq(lattice) << "\n";
}
