#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "poholab/fields.hpp"
#include "poholab/vec.hpp"

namespace poholab {

/// The potential h of the operator Delta + h. Radial kinds expose exact
/// radial derivatives (needed by the structural condition and the radial
/// solvers); table/callable kinds fall back to finite differences and report
/// it through gradient_is_fd().
class CoefficientH {
  public:
    static CoefficientH constant(double c);
    /// h(x) = sum_k coeffs[k] |x|^k.
    static CoefficientH radial_polynomial(std::vector<double> coeffs);
    static CoefficientH radial_table(ScalarFieldRadial table);
    static CoefficientH callable(std::function<double(const Vec3&)> value,
                                 std::function<Vec3(const Vec3&)> gradient = nullptr);

    bool is_radial() const;
    bool is_constant() const;
    bool gradient_is_fd() const;

    double value(const Vec3& x) const;
    double value_radial(double r) const;
    /// d h / d r for radial kinds (FD for tables).
    double radial_derivative(double r) const;
    Vec3 gradient(const Vec3& x) const;

  private:
    struct Constant { double c; };
    struct RadialPoly { std::vector<double> coeffs; };
    struct RadialTable { ScalarFieldRadial table; };
    struct Callable {
        std::function<double(const Vec3&)> value;
        std::function<Vec3(const Vec3&)> gradient;
    };
    std::variant<Constant, RadialPoly, RadialTable, Callable> kind_{Constant{0.0}};
};

}  // namespace poholab
