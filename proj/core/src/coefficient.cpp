#include "poholab/coefficient.hpp"

#include <cmath>

#include "poholab/errors.hpp"

namespace poholab {

CoefficientH CoefficientH::constant(double c) {
    CoefficientH h;
    h.kind_ = Constant{c};
    return h;
}

CoefficientH CoefficientH::radial_polynomial(std::vector<double> coeffs) {
    CoefficientH h;
    h.kind_ = RadialPoly{std::move(coeffs)};
    return h;
}

CoefficientH CoefficientH::radial_table(ScalarFieldRadial table) {
    CoefficientH h;
    h.kind_ = RadialTable{std::move(table)};
    return h;
}

CoefficientH CoefficientH::callable(std::function<double(const Vec3&)> value,
                                    std::function<Vec3(const Vec3&)> gradient) {
    CoefficientH h;
    h.kind_ = Callable{std::move(value), std::move(gradient)};
    return h;
}

bool CoefficientH::is_radial() const {
    return !std::holds_alternative<Callable>(kind_);
}

bool CoefficientH::is_constant() const { return std::holds_alternative<Constant>(kind_); }

bool CoefficientH::gradient_is_fd() const {
    if (std::holds_alternative<RadialTable>(kind_)) return true;
    if (const auto* c = std::get_if<Callable>(&kind_)) return !c->gradient;
    return false;
}

double CoefficientH::value_radial(double r) const {
    if (const auto* c = std::get_if<Constant>(&kind_)) return c->c;
    if (const auto* p = std::get_if<RadialPoly>(&kind_)) {
        double acc = 0.0;
        for (std::size_t k = p->coeffs.size(); k-- > 0;) acc = acc * r + p->coeffs[k];
        return acc;
    }
    if (const auto* t = std::get_if<RadialTable>(&kind_)) return t->table.eval(r);
    throw NumericError("CoefficientH: value_radial on a non-radial coefficient");
}

double CoefficientH::value(const Vec3& x) const {
    if (const auto* c = std::get_if<Callable>(&kind_)) return c->value(x);
    return value_radial(norm(x));
}

double CoefficientH::radial_derivative(double r) const {
    if (std::holds_alternative<Constant>(kind_)) return 0.0;
    if (const auto* p = std::get_if<RadialPoly>(&kind_)) {
        double acc = 0.0;
        for (std::size_t k = p->coeffs.size(); k-- > 1;) acc = acc * r + k * p->coeffs[k];
        return acc;
    }
    if (const auto* t = std::get_if<RadialTable>(&kind_)) return t->table.deriv(r);
    throw NumericError("CoefficientH: radial_derivative on a non-radial coefficient");
}

Vec3 CoefficientH::gradient(const Vec3& x) const {
    if (const auto* c = std::get_if<Callable>(&kind_)) {
        if (c->gradient) return c->gradient(x);
        const double s = 1e-6;
        return {(c->value({x.x + s, x.y, x.z}) - c->value({x.x - s, x.y, x.z})) / (2 * s),
                (c->value({x.x, x.y + s, x.z}) - c->value({x.x, x.y - s, x.z})) / (2 * s),
                (c->value({x.x, x.y, x.z + s}) - c->value({x.x, x.y, x.z - s})) / (2 * s)};
    }
    const double r = norm(x);
    if (r == 0.0) return {0, 0, 0};
    return x * (radial_derivative(r) / r);
}

}  // namespace poholab
