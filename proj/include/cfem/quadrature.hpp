#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cfem {

// Gauss-Legendre rule mapped to [0,1], weights sum to 1
struct Quad1D {
	std::vector<double> x;
	std::vector<double> w;
};

inline Quad1D make_gauss_legendre(int n) {
	if (n < 1) throw std::invalid_argument("quadrature order must be positive");
	Quad1D q;
	q.x.resize(n);
	q.w.resize(n);
	for (int i = 0; i < n; ++i) {
		// Newton iteration on P_n over [-1,1]
		double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
		double dp = 0;
		for (int iter = 0; iter < 100; ++iter) {
			double p0 = 1.0, p1 = t;
			for (int k = 2; k <= n; ++k) {
				double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
				p0 = p1;
				p1 = p2;
			}
			dp = n * (t * p1 - p0) / (t * t - 1.0);
			double dt = p1 / dp;
			t -= dt;
			if (std::abs(dt) < 1e-16) break;
		}
		q.x[i] = 0.5 * (1.0 - t);  // descending t -> ascending x
		q.w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
	}
	return q;
}

inline const Quad1D& gauss_legendre_8() {
	static const Quad1D q = make_gauss_legendre(8);
	return q;
}

// symmetric triangle rules (barycentric points, weights sum to 1)
struct QuadTri {
	std::vector<std::array<double, 3>> bary;
	std::vector<double> w;
};

namespace detail {

inline void push_perm3(QuadTri& q, double a, double w) {
	double c = 1.0 - 2.0 * a;
	q.bary.push_back({c, a, a});
	q.bary.push_back({a, c, a});
	q.bary.push_back({a, a, c});
	q.w.insert(q.w.end(), 3, w);
}

inline void push_perm6(QuadTri& q, double a, double b, double w) {
	double c = 1.0 - a - b;
	q.bary.push_back({c, a, b});
	q.bary.push_back({c, b, a});
	q.bary.push_back({a, c, b});
	q.bary.push_back({a, b, c});
	q.bary.push_back({b, c, a});
	q.bary.push_back({b, a, c});
	q.w.insert(q.w.end(), 6, w);
}

}  // namespace detail

// degree 4, 6 points
inline const QuadTri& tri_rule_deg4() {
	static const QuadTri q = [] {
		QuadTri r;
		detail::push_perm3(r, 0.445948490915965, 0.223381589678011);
		detail::push_perm3(r, 0.091576213509771, 0.109951743655322);
		return r;
	}();
	return q;
}

// degree 6, 12 points
inline const QuadTri& tri_rule_deg6() {
	static const QuadTri q = [] {
		QuadTri r;
		detail::push_perm3(r, 0.249286745170910, 0.116786275726379);
		detail::push_perm3(r, 0.063089014491502, 0.050844906370207);
		detail::push_perm6(r, 0.310352451033785, 0.053145049844816, 0.082851075618374);
		return r;
	}();
	return q;
}

// geometric subdivision of [0,1] graded toward 0: [0,q^D], [q^D,q^{D-1}], ..., [q,1]
inline std::vector<std::array<double, 2>> graded_intervals(double ratio, int count) {
	std::vector<std::array<double, 2>> parts;
	parts.reserve(count + 1);
	double hi = 1.0;
	for (int k = 0; k < count; ++k) {
		double lo = hi * ratio;
		parts.push_back({lo, hi});
		hi = lo;
	}
	parts.push_back({0.0, hi});
	return parts;
}

}  // namespace cfem
