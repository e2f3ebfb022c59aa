#pragma once

#include <span>
#include <string>
#include <vector>

namespace cflow {

// A linear map R from demands (length n) to `rows()` values such that
//   ||R b||_inf <= opt(b) <= alpha ||R b||_inf
// for balanced b. Implementations provide R and its exact adjoint.
class CongestionApproximator {
 public:
  virtual ~CongestionApproximator() = default;

  virtual int vertices() const = 0;
  virtual int rows() const = 0;
  virtual double alpha_claimed() const = 0;
  virtual std::string name() const = 0;

  // out (length rows) = R b.
  virtual void apply_into(std::span<const double> b,
                          std::span<double> out) const = 0;
  // out (length vertices) = R^T p.
  virtual void apply_adjoint_into(std::span<const double> p,
                                  std::span<double> out) const = 0;

  std::vector<double> apply(std::span<const double> b) const {
    std::vector<double> out(rows());
    apply_into(b, out);
    return out;
  }
  std::vector<double> apply_adjoint(std::span<const double> p) const {
    std::vector<double> out(vertices());
    apply_adjoint_into(p, out);
    return out;
  }
};

}  // namespace cflow
