#include "gmdiag/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace gmdiag {

void validate_finite_set(const FiniteSet& fs) {
  if (fs.elements.empty()) {
    throw std::invalid_argument("finite set must be non-empty: " +
                                fs.var_name);
  }
  std::unordered_set<std::string> seen;
  for (const std::string& e : fs.elements) {
    if (!seen.insert(e).second) {
      throw std::invalid_argument("duplicate element label in set " +
                                  fs.var_name + ": " + e);
    }
  }
}

std::size_t product_size(const std::vector<FiniteSet>& sets) {
  std::size_t n = 1;
  for (const FiniteSet& s : sets) n *= s.size();
  return n;
}

std::size_t ravel_index(const std::vector<FiniteSet>& sets,
                        const std::vector<std::size_t>& index) {
  if (index.size() != sets.size()) {
    throw std::invalid_argument("index arity mismatch");
  }
  std::size_t linear = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (index[i] >= sets[i].size()) {
      throw std::invalid_argument("index out of range for set " +
                                  sets[i].var_name);
    }
    linear = linear * sets[i].size() + index[i];
  }
  return linear;
}

std::vector<std::size_t> unravel_index(const std::vector<FiniteSet>& sets,
                                       std::size_t linear) {
  std::vector<std::size_t> index(sets.size(), 0);
  for (std::size_t i = sets.size(); i-- > 0;) {
    index[i] = linear % sets[i].size();
    linear /= sets[i].size();
  }
  return index;
}

Tensor::Tensor(std::vector<FiniteSet> domain, std::vector<FiniteSet> codomain,
               std::vector<double> entries)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      entries_(std::move(entries)) {
  for (const FiniteSet& s : domain_) validate_finite_set(s);
  for (const FiniteSet& s : codomain_) validate_finite_set(s);
  domain_size_ = product_size(domain_);
  codomain_size_ = product_size(codomain_);
  if (entries_.size() != domain_size_ * codomain_size_) {
    throw std::invalid_argument("tensor entry count does not match shape");
  }
  for (double e : entries_) {
    if (!std::isfinite(e) || e < 0.0) {
      throw std::invalid_argument("tensor entries must be finite and >= 0");
    }
  }
}

Tensor Tensor::constant(std::vector<FiniteSet> domain,
                        std::vector<FiniteSet> codomain, double value) {
  const std::size_t n = product_size(domain) * product_size(codomain);
  return Tensor(std::move(domain), std::move(codomain),
                std::vector<double>(n, value));
}

Tensor Tensor::identity(std::vector<FiniteSet> sets) {
  const std::size_t n = product_size(sets);
  std::vector<double> entries(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) entries[i * n + i] = 1.0;
  std::vector<FiniteSet> codomain = sets;
  return Tensor(std::move(sets), std::move(codomain), std::move(entries));
}

double Tensor::at(const std::vector<std::size_t>& cod_index,
                  const std::vector<std::size_t>& dom_index) const {
  return (*this)(ravel_index(codomain_, cod_index),
                 ravel_index(domain_, dom_index));
}

bool Tensor::is_stochastic(double tol) const {
  for (std::size_t x = 0; x < domain_size_; ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < codomain_size_; ++y) sum += (*this)(y, x);
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

StochasticKernel::StochasticKernel(Tensor t, double tol)
    : Tensor(std::move(t)) {
  if (!is_stochastic(tol)) {
    throw std::invalid_argument("kernel columns must sum to 1");
  }
}

Distribution::Distribution(Tensor t, double tol)
    : StochasticKernel(std::move(t), tol) {
  if (!domain().empty()) {
    throw std::invalid_argument("a distribution must have empty domain");
  }
}

Tensor kernel_compose(const Tensor& f, const Tensor& g) {
  if (!(f.codomain() == g.domain())) {
    throw std::invalid_argument(
        "kernel_compose: codomain of the first tensor must equal domain of "
        "the second");
  }
  const std::size_t nx = f.domain_size();
  const std::size_t ny = f.codomain_size();
  const std::size_t nz = g.codomain_size();
  std::vector<double> entries(nz * nx, 0.0);
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double gzy = g(z, y);
      if (gzy == 0.0) continue;
      for (std::size_t x = 0; x < nx; ++x) {
        entries[z * nx + x] += gzy * f(y, x);
      }
    }
  }
  return Tensor(f.domain(), g.codomain(), std::move(entries));
}

Tensor kernel_tensor(const Tensor& f, const Tensor& h) {
  std::vector<FiniteSet> domain = f.domain();
  domain.insert(domain.end(), h.domain().begin(), h.domain().end());
  std::vector<FiniteSet> codomain = f.codomain();
  codomain.insert(codomain.end(), h.codomain().begin(), h.codomain().end());

  const std::size_t fx = f.domain_size();
  const std::size_t fy = f.codomain_size();
  const std::size_t hx = h.domain_size();
  const std::size_t hy = h.codomain_size();
  std::vector<double> entries(fx * fy * hx * hy, 0.0);
  // Codomain tuple (y, w), domain tuple (x, z); last index fastest means the
  // linear offsets factor as ((y * hy + w) * fx + x) * hx + z.
  for (std::size_t y = 0; y < fy; ++y) {
    for (std::size_t w = 0; w < hy; ++w) {
      for (std::size_t x = 0; x < fx; ++x) {
        for (std::size_t z = 0; z < hx; ++z) {
          entries[((y * hy + w) * fx + x) * hx + z] = f(y, x) * h(w, z);
        }
      }
    }
  }
  return Tensor(std::move(domain), std::move(codomain), std::move(entries));
}

Tensor structural_tensor(StructuralKind kind, const FiniteSet& x) {
  validate_finite_set(x);
  const std::size_t n = x.size();
  switch (kind) {
    case StructuralKind::Copy: {
      std::vector<double> entries(n * n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        entries[(i * n + i) * n + i] = 1.0;
      }
      return Tensor({x}, {x, x}, std::move(entries));
    }
    case StructuralKind::Delete:
      return Tensor({x}, {}, std::vector<double>(n, 1.0));
    case StructuralKind::Compare: {
      std::vector<double> entries(n * n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        entries[i * n * n + i * n + i] = 1.0;
      }
      return Tensor({x, x}, {x}, std::move(entries));
    }
    case StructuralKind::Omni:
      return Tensor({}, {x}, std::vector<double>(n, 1.0));
  }
  throw std::invalid_argument("unknown structural tensor kind");
}

NormalizeResult normalize_tensor(const Tensor& t) {
  if (!t.domain().empty()) {
    throw std::invalid_argument("normalize_tensor requires an empty domain");
  }
  double z = 0.0;
  for (double e : t.entries()) z += e;
  NormalizeResult result;
  result.Z = z;
  if (z > 0.0) {
    std::vector<double> entries = t.entries();
    for (double& e : entries) e /= z;
    result.dist =
        Distribution(Tensor({}, t.codomain(), std::move(entries)));
  }
  return result;
}

bool proportional_eq(const Tensor& t1, const Tensor& t2, double tol) {
  if (!t1.same_shape(t2)) {
    throw std::invalid_argument("proportional_eq: shape mismatch");
  }
  // A zero tensor is proportional only to another zero tensor: no positive
  // scale relates a zero and a nonzero tensor.
  const auto all_zero = [tol](const Tensor& t) {
    for (double e : t.entries()) {
      if (std::abs(e) > tol) return false;
    }
    return true;
  };
  const bool z1 = all_zero(t1);
  const bool z2 = all_zero(t2);
  if (z1 || z2) return z1 && z2;
  // Scale factor from the largest-magnitude entry of t1 (numerically the
  // most reliable pivot); it must be strictly positive.
  std::size_t pivot = 0;
  for (std::size_t i = 0; i < t1.entries().size(); ++i) {
    if (std::abs(t1.entries()[i]) > std::abs(t1.entries()[pivot])) pivot = i;
  }
  const double lambda = t2.entries()[pivot] / t1.entries()[pivot];
  if (!(lambda > 0.0)) return false;
  for (std::size_t i = 0; i < t1.entries().size(); ++i) {
    if (std::abs(lambda * t1.entries()[i] - t2.entries()[i]) > tol) {
      return false;
    }
  }
  return true;
}

Distribution marginalize(const Distribution& d,
                         const std::vector<std::string>& keep) {
  const std::vector<FiniteSet>& vars = d.codomain();
  std::vector<bool> keep_mask(vars.size(), false);
  for (const std::string& name : keep) {
    bool found = false;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].var_name == name) {
        keep_mask[i] = true;
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument("marginalize: unknown variable " + name);
    }
  }
  std::vector<FiniteSet> kept;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (keep_mask[i]) kept.push_back(vars[i]);
  }
  std::vector<double> entries(product_size(kept), 0.0);
  for (std::size_t lin = 0; lin < d.codomain_size(); ++lin) {
    const std::vector<std::size_t> full = unravel_index(vars, lin);
    std::vector<std::size_t> reduced;
    reduced.reserve(kept.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (keep_mask[i]) reduced.push_back(full[i]);
    }
    entries[ravel_index(kept, reduced)] += d.entries()[lin];
  }
  return Distribution(Tensor({}, std::move(kept), std::move(entries)));
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return worst;
}

}  // namespace gmdiag
