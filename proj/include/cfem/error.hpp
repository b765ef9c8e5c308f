#pragma once

#include <functional>

#include "fem.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace cfem {

// Reference solution y = r^mu * sin(mu * phi), harmonic on the sector, singular at the
// origin for mu < 0. A custom evaluator can replace it for test problems.
struct ExactSolutionSpec {
	double mu = -0.4999;
	std::function<double(Vec2)> fn;  // overrides the corner solution when set
	bool singular_at_origin = true;
};

inline ExactSolutionSpec corner_singular_solution(double mu = -0.4999) {
	return ExactSolutionSpec{mu, nullptr, mu < 0};
}

inline ExactSolutionSpec exact_from_function(std::function<double(Vec2)> fn) {
	return ExactSolutionSpec{0.0, std::move(fn), false};
}

inline double eval_exact(const ExactSolutionSpec& spec, Vec2 p) {
	if (spec.fn) return spec.fn(p);
	double r = norm(p);
	if (r <= 0) throw std::domain_error("exact solution evaluated at the singular corner");
	return std::pow(r, spec.mu) * std::sin(spec.mu * polar_angle(p));
}

namespace detail {

template <class Fn>
double rule_integral(const QuadTri& rule, Vec2 a, Vec2 b, Vec2 c, Fn&& g) {
	double area = std::abs(triangle_area(a, b, c));
	double s = 0;
	for (size_t i = 0; i < rule.bary.size(); ++i) {
		const auto& l = rule.bary[i];
		Vec2 p = l[0] * a + l[1] * b + l[2] * c;
		s += rule.w[i] * g(p);
	}
	return s * area;
}

// noise_density guards against chasing rounding noise of a cancelling integrand:
// below that level per unit area the two rules are considered equal
template <class Fn>
double adaptive_tri(Vec2 a, Vec2 b, Vec2 c, double abs_tol, double noise_density, int depth,
                    Fn&& g) {
	double i6 = rule_integral(tri_rule_deg6(), a, b, c, g);
	double i4 = rule_integral(tri_rule_deg4(), a, b, c, g);
	double floor = noise_density * std::abs(triangle_area(a, b, c));
	// the nonnegative integrand makes a per-call relative stop safe: subtree errors
	// of 1e-9 relative never add up beyond 1e-9 of the total
	double stop = std::max({abs_tol, floor, 1e-9 * std::abs(i6)});
	if (std::abs(i6 - i4) <= stop || depth >= 26) return i6;
	Vec2 ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
	double quarter = 0.25 * abs_tol;
	return adaptive_tri(a, ab, ca, quarter, noise_density, depth + 1, g) +
	       adaptive_tri(ab, b, bc, quarter, noise_density, depth + 1, g) +
	       adaptive_tri(ca, bc, c, quarter, noise_density, depth + 1, g) +
	       adaptive_tri(ab, bc, ca, quarter, noise_density, depth + 1, g);
}

// triangle with one vertex at the origin: geometric strips toward the corner keep the
// rules away from the singularity; the leftover tip is far below the target tolerance
template <class Fn>
double graded_origin_tri(Vec2 a, Vec2 b, double abs_tol, double noise_density, int grading_depth,
                         Fn&& g) {
	KahanSum total;
	Vec2 pa = a, pb = b;
	for (int k = 1; k <= grading_depth; ++k) {
		Vec2 na = 0.5 * pa, nb = 0.5 * pb;
		double share = abs_tol * std::pow(0.5, k);
		total.add(adaptive_tri(pa, pb, nb, 0.5 * share, noise_density, 0, g));
		total.add(adaptive_tri(pa, nb, na, 0.5 * share, noise_density, 0, g));
		pa = na;
		pb = nb;
	}
	total.add(rule_integral(tri_rule_deg6(), Vec2{0, 0}, pa, pb, g));
	return total.value();
}

}  // namespace detail

// || y - y_h ||_{L2(Omega)} with adaptive per-triangle quadrature; origin-touching
// triangles always use the graded path
inline double l2_domain_error(const NodalField& yh, const ExactSolutionSpec& exact,
                              double rel_tol = 1e-6, int grading_depth = 48) {
	const TriangleMesh& mesh = *yh.mesh;
	if ((int)yh.values.size() != mesh.n_vertices()) {
		throw std::invalid_argument("field size does not match the mesh");
	}
	int nt = mesh.n_triangles();
	std::vector<double> rough(nt);
	double total_rough = 0;

	auto integrand_for = [&](const Triangle& t) {
		Vec2 a = mesh.vertices[t.v[0]], b = mesh.vertices[t.v[1]], c = mesh.vertices[t.v[2]];
		double va = yh.values[t.v[0]], vb = yh.values[t.v[1]], vc = yh.values[t.v[2]];
		double det = cross(b - a, c - a);
		return [=, &exact](Vec2 p) {
			double lb = cross(p - a, c - a) / det;
			double lc = cross(b - a, p - a) / det;
			double lin = va * (1.0 - lb - lc) + vb * lb + vc * lc;
			double diff = eval_exact(exact, p) - lin;
			return diff * diff;
		};
	};

	for (int k = 0; k < nt; ++k) {
		const Triangle& t = mesh.triangles[k];
		rough[k] = detail::rule_integral(tri_rule_deg6(), mesh.vertices[t.v[0]],
		                                 mesh.vertices[t.v[1]], mesh.vertices[t.v[2]],
		                                 integrand_for(t));
		total_rough += std::max(rough[k], 0.0);
	}
	if (total_rough <= 0) total_rough = 1e-300;

	double avg = total_rough / nt;
	double denom = 0;
	for (int k = 0; k < nt; ++k) denom += std::max(rough[k], avg);
	double budget = 0.25 * rel_tol * total_rough;

	double field_scale = 1.0;
	for (double v : yh.values) field_scale = std::max(field_scale, std::abs(v));
	double noise_density = 1e-15 * field_scale * field_scale;

	KahanSum total;
	for (int k = 0; k < nt; ++k) {
		const Triangle& t = mesh.triangles[k];
		double tol_k = budget * std::max(rough[k], avg) / denom;
		auto g = integrand_for(t);
		int origin = -1;
		for (int j = 0; j < 3; ++j) {
			if (norm(mesh.vertices[t.v[j]]) <= detail::kOriginTol) origin = j;
		}
		if (origin >= 0) {
			Vec2 a = mesh.vertices[t.v[(origin + 1) % 3]];
			Vec2 b = mesh.vertices[t.v[(origin + 2) % 3]];
			total.add(detail::graded_origin_tri(a, b, tol_k, noise_density, grading_depth, g));
		} else {
			total.add(detail::adaptive_tri(mesh.vertices[t.v[0]], mesh.vertices[t.v[1]],
			                               mesh.vertices[t.v[2]], tol_k, noise_density, 0, g));
		}
	}
	return std::sqrt(std::max(0.0, total.value()));
}

struct ConvergenceRecord {
	double h = 0;
	long long unknowns = 0;
	double error = 0;
	double eoc = std::numeric_limits<double>::quiet_NaN();  // NaN on the first row
};

// eoc_k = log(e_{k-1}/e_k) / log(h_{k-1}/h_k); first entry is NaN
inline std::vector<double> compute_eoc(const std::vector<double>& errors,
                                       const std::vector<double>& hs) {
	if (errors.size() != hs.size() || errors.empty()) {
		throw std::invalid_argument("eoc: errors and mesh sizes must align");
	}
	std::vector<double> eoc(errors.size(), std::numeric_limits<double>::quiet_NaN());
	for (size_t k = 1; k < errors.size(); ++k) {
		if (!(hs[k] > 0) || !(hs[k] < hs[k - 1])) {
			throw std::invalid_argument("eoc: mesh sizes must decrease strictly");
		}
		if (!(errors[k] > 0) || !(errors[k - 1] > 0)) {
			throw std::invalid_argument("eoc: errors must be positive");
		}
		eoc[k] = std::log(errors[k - 1] / errors[k]) / std::log(hs[k - 1] / hs[k]);
	}
	return eoc;
}

}  // namespace cfem
