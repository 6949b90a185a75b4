#ifndef GMDIAG_SEMANTICS_HPP
#define GMDIAG_SEMANTICS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Nonnegative tensors as matrices between products of finite sets, their
// column-normalized (stochastic) refinement, equality up to a global positive
// scalar, and the four structural tensors: copy, delete, compare, omni.
//
// A Tensor with domain [X1..Xn] and codomain [Y1..Ym] stores the values
// t(y1..ym | x1..xn) in a dense row-major array over the index tuple
// (y1..ym, x1..xn), last index fastest.  Equivalently: entry (y | x) lives at
// linear offset y_lin * |X| + x_lin, with y_lin and x_lin the mixed-radix
// encodings of the codomain and domain tuples.

namespace gmdiag {

// A named finite set: the possible values of one variable.
struct FiniteSet {
  std::string var_name;
  std::vector<std::string> elements;  // non-empty, distinct labels

  std::size_t size() const { return elements.size(); }

  friend bool operator==(const FiniteSet& a, const FiniteSet& b) {
    return a.var_name == b.var_name && a.elements == b.elements;
  }
};

// Throws std::invalid_argument unless fs has distinct, non-empty labels.
void validate_finite_set(const FiniteSet& fs);

// Product of the set cardinalities (1 for the empty list).
std::size_t product_size(const std::vector<FiniteSet>& sets);

// Mixed-radix helpers over a list of finite sets, last index fastest.
std::size_t ravel_index(const std::vector<FiniteSet>& sets,
                        const std::vector<std::size_t>& index);
std::vector<std::size_t> unravel_index(const std::vector<FiniteSet>& sets,
                                       std::size_t linear);

// A morphism of the category of nonnegative matrices between products of
// finite sets.  Entries are validated to be finite and >= 0.  Immutable.
class Tensor {
 public:
  Tensor() = default;

  // entries.size() must equal |codomain| * |domain| (as products).
  Tensor(std::vector<FiniteSet> domain, std::vector<FiniteSet> codomain,
         std::vector<double> entries);

  // Tensor with every entry equal to `value` (default all-ones).
  static Tensor constant(std::vector<FiniteSet> domain,
                         std::vector<FiniteSet> codomain, double value = 1.0);

  // Identity matrix on the given product of sets.
  static Tensor identity(std::vector<FiniteSet> sets);

  const std::vector<FiniteSet>& domain() const { return domain_; }
  const std::vector<FiniteSet>& codomain() const { return codomain_; }
  const std::vector<double>& entries() const { return entries_; }

  std::size_t domain_size() const { return domain_size_; }
  std::size_t codomain_size() const { return codomain_size_; }

  // Matrix-style access by linear codomain / domain indices.
  double operator()(std::size_t cod_lin, std::size_t dom_lin) const {
    return entries_[cod_lin * domain_size_ + dom_lin];
  }

  // Access by full index tuples.
  double at(const std::vector<std::size_t>& cod_index,
            const std::vector<std::size_t>& dom_index) const;

  // True iff every column sums to 1 within tol.
  bool is_stochastic(double tol = 1e-9) const;

  bool same_shape(const Tensor& other) const {
    return domain_ == other.domain_ && codomain_ == other.codomain_;
  }

 private:
  std::vector<FiniteSet> domain_;
  std::vector<FiniteSet> codomain_;
  std::vector<double> entries_;
  std::size_t domain_size_ = 1;
  std::size_t codomain_size_ = 1;
};

// A Tensor whose columns each sum to 1 within 1e-9, i.e. a stochastic matrix.
// Construction re-validates, so holding a StochasticKernel is a proof of
// stochasticity at build time.
class StochasticKernel : public Tensor {
 public:
  StochasticKernel() = default;
  explicit StochasticKernel(Tensor t, double tol = 1e-9);
};

// A stochastic kernel with empty domain: a probability distribution over the
// product of its codomain sets.
class Distribution : public StochasticKernel {
 public:
  Distribution() = default;
  explicit Distribution(Tensor t, double tol = 1e-9);
};

// Chapman-Kolmogorov composite of f: X -> Y and g: Y -> Z, i.e. the tensor
// (z | x) = sum_y g(z | y) * f(y | x).  Requires f's codomain to equal g's
// domain; throws std::invalid_argument otherwise.  Composing stochastic
// kernels yields a stochastic kernel.
Tensor kernel_compose(const Tensor& f, const Tensor& g);

// Kronecker product: (y, w | x, z) = f(y | x) * h(w | z), with domain and
// codomain lists concatenated.
Tensor kernel_tensor(const Tensor& f, const Tensor& h);

enum class StructuralKind { Copy, Delete, Compare, Omni };

// The structural tensors on a single finite set x:
//   copy    : x -> x (x) x     (y, z | x) = [x = y = z]
//   delete  : x -> I           (  | x)    = 1
//   compare : x (x) x -> x     (z | x, y) = [x = y = z]
//   omni    : I -> x           (x |  )    = 1
Tensor structural_tensor(StructuralKind kind, const FiniteSet& x);

// Normalization of an empty-domain tensor: Z is the sum of all entries; the
// distribution is entries / Z, or absent when Z = 0 (degenerate).
struct NormalizeResult {
  double Z = 0.0;
  std::optional<Distribution> dist;

  bool degenerate() const { return !dist.has_value(); }
};
NormalizeResult normalize_tensor(const Tensor& t);

// True iff some lambda > 0 makes lambda * t1 equal to t2 entrywise within
// tol.  Lambda is derived from the largest-magnitude entry of t1; two
// all-zero tensors are proportional, and a zero tensor is never proportional
// to a nonzero one.  Shapes must match.
bool proportional_eq(const Tensor& t1, const Tensor& t2, double tol = 1e-9);

// Marginal of d onto the named variables `keep` (a subset of d's variables,
// any order); the result keeps the variables in d's own order.  Throws
// std::invalid_argument on unknown names.
Distribution marginalize(const Distribution& d,
                         const std::vector<std::string>& keep);

// Largest absolute entrywise difference; requires equal shapes.
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace gmdiag

#endif  // GMDIAG_SEMANTICS_HPP
