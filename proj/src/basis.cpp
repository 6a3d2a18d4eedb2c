#include "gramsos/basis.hpp"

#include <algorithm>
#include <set>

#include "gramsos/error.hpp"

namespace gramsos {

namespace {

void enumerate(int nvars, int max_degree, bool homogeneous,
               std::vector<int>& current, int var, int used,
               std::vector<Monomial>& out) {
  if (var == nvars) {
    if (!homogeneous || used == max_degree) out.emplace_back(current);
    return;
  }
  for (int e = 0; e + used <= max_degree; ++e) {
    current[var] = e;
    enumerate(nvars, max_degree, homogeneous, current, var + 1, used + e, out);
  }
  current[var] = 0;
}

}  // namespace

MonomialBasis all_monomials(int nvars, int max_degree, bool homogeneous) {
  if (nvars < 0 || max_degree < 0) throw Error("invalid basis parameters");
  std::vector<Monomial> mons;
  std::vector<int> current(nvars, 0);
  enumerate(nvars, max_degree, homogeneous, current, 0, 0, mons);
  std::sort(mons.begin(), mons.end(), GradedLexLess{});
  return MonomialBasis{nvars, max_degree, std::move(mons)};
}

MonomialBasis build_basis(const Polynomial& f, BasisKind kind) {
  const int deg = f.degree();
  if (deg % 2 != 0)
    throw Error("polynomial has odd degree " + std::to_string(deg) +
                "; a sum of squares must have even degree");
  const int d = deg / 2;
  if (kind == BasisKind::Homogeneous) {
    if (!f.is_homogeneous())
      throw Error("homogeneous basis requested for a non-homogeneous input");
    return all_monomials(f.nvars(), d, true);
  }
  return all_monomials(f.nvars(), d, false);
}

MonomialBasis build_basis_custom(int nvars, std::vector<Monomial> monomials) {
  if (monomials.empty()) throw Error("custom basis is empty");
  for (const auto& m : monomials)
    if (m.nvars() != nvars) throw Error("custom basis monomial nvars mismatch");
  std::sort(monomials.begin(), monomials.end(), GradedLexLess{});
  for (std::size_t i = 1; i < monomials.size(); ++i)
    if (monomials[i] == monomials[i - 1])
      throw Error("custom basis contains duplicate monomial " +
                  to_string(monomials[i]));
  int d = 0;
  for (const auto& m : monomials) d = std::max(d, m.degree());
  return MonomialBasis{nvars, d, std::move(monomials)};
}

}  // namespace gramsos
