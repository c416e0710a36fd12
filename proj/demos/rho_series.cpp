// rho for s^2 + t^2 against 2 t^2: prime values, partial sums of rho(a) / N a
// and the truncated Euler product they approach.

#include <iostream>

#include "binform/dirichlet.hpp"

using namespace binform;

int main() {
  auto Q = NumberField::rationals();
  auto F = BinaryForm::from_integers({1, 0, 1}), G = BinaryForm::from_integers({0, 0, 2});
  auto w = factor_ideal(Q, rational_ideal(Q, 2));

  for (const auto& row : rho_table(Q, F, G, w, 60))
    if (!row.in_w) std::cout << "rho(" << row.p << ") = " << row.rho << "\n";

  auto series = CoefficientSeries::rho(Q, F, G, w);
  for (i64 X : {100, 1000, 10000}) std::cout << "sum to " << X << ": " << dirichlet_partial(series, 1.0, X) << "\n";
  std::cout << "Euler product to 10^4: " << euler_truncated(series, 1.0, 10000) << "\n";

  auto d = prime_root_density(Q, F, 100000);
  std::cout << "sum tau(p) log p / p - log X at 10^5: " << d.deviation() << "\n";
}
