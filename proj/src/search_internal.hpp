#pragma once

// Solver factories shared between the search translation units.

#include <memory>

#include "solver.hpp"

namespace pfde::solver::detail {

std::unique_ptr<TupleSolver> make_power_solver(const model::Equation& eq, bool prune);
std::unique_ptr<TupleSolver> make_univariate_solver(const model::Equation& eq, const SearchBounds& bounds);
std::unique_ptr<TupleSolver> make_form_solver(const model::Equation& eq, const SearchBounds& bounds,
                                              bool coprime_only);
std::unique_ptr<TupleSolver> make_product_form_solver(const model::Equation& eq,
                                                      const ProductFormShape& shape,
                                                      const SearchBounds& bounds);
std::unique_ptr<TupleSolver> make_bivariate_solver(const model::Equation& eq, const SearchBounds& bounds);

// Prune by a prime q in (n*/2, n*) exceeding every constant and `extra`.
std::optional<PruneCertificate> bertrand(const model::FactorialProductLHS& lhs,
                                         const model::Assignment& tuple, unsigned long d,
                                         const mpz_class& extra);

// Records sharing the tuple, sorted by (x, y).
SolutionRecord make_record(const std::string& equation, const model::Assignment& tuple,
                           const mpz_class& x, const std::optional<mpz_class>& y);
void sort_records(std::vector<SolutionRecord>& records);

model::Equation equation_with_rhs(const model::FactorialProductLHS& lhs, model::BivariatePoly rhs,
                                  bool coprime);

}  // namespace pfde::solver::detail
