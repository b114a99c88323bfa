#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "monoiter/errors.hpp"
#include "monoiter/geometry.hpp"

namespace monoiter {

inline void require_same_domain(const DomainPtr& a, const DomainPtr& b, const std::string& what) {
  if (a.get() != b.get()) throw DomainMismatch(what + ": arguments live on different domains");
}

/// Per-vertex array bound to a domain. Length matches the vertex count and
/// every entry is finite; both are checked on construction.
template <class Tag>
class NodalArray {
 public:
  NodalArray(DomainPtr domain, Eigen::VectorXd values)
      : domain_(std::move(domain)), values_(std::move(values)) {
    if (!domain_) throw InputError("nodal array without a domain");
    if (values_.size() != domain_->vertex_count())
      throw InputError(std::string(Tag::name) + " has " + std::to_string(values_.size()) +
                       " entries, domain has " + std::to_string(domain_->vertex_count()) +
                       " vertices");
    for (Eigen::Index i = 0; i < values_.size(); ++i)
      if (!std::isfinite(values_[i]))
        throw InputError(std::string(Tag::name) + " entry " + std::to_string(i) +
                         " is not finite");
  }

  static NodalArray constant(DomainPtr domain, double value) {
    const int n = domain->vertex_count();
    return NodalArray(std::move(domain), Eigen::VectorXd::Constant(n, value));
  }

  [[nodiscard]] const DomainPtr& domain() const { return domain_; }
  [[nodiscard]] const Eigen::VectorXd& values() const { return values_; }
  [[nodiscard]] int size() const { return static_cast<int>(values_.size()); }
  [[nodiscard]] double operator[](int i) const { return values_[i]; }
  [[nodiscard]] double min() const { return values_.minCoeff(); }
  [[nodiscard]] double max() const { return values_.maxCoeff(); }

 private:
  DomainPtr domain_;
  Eigen::VectorXd values_;
};

struct FieldTag {
  static constexpr const char* name = "field";
};
struct DualTag {
  static constexpr const char* name = "dual vector";
};

/// A function sampled at the vertices (u, a, f, h, bracket endpoints).
using Field = NodalArray<FieldTag>;
/// A linear functional given by its action on the nodal hat functions.
using DualVector = NodalArray<DualTag>;

}  // namespace monoiter
