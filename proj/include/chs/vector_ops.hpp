#pragma once

#include <functional>
#include <span>
#include <vector>

namespace chs {

using Vector = std::vector<double>;

// y = Op(x). Implementations must not alias x and y.
using LinearOp = std::function<void(std::span<const double> x, std::span<double> y)>;

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
// y = a * x + b * y
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
void scale(double a, std::span<double> x);
double sum(std::span<const double> x);
bool all_finite(std::span<const double> x);

Vector apply(const LinearOp& op, std::span<const double> x);
LinearOp identity_op();

}  // namespace chs
