#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cfem {

struct Vec2 {
	double x = 0.0;
	double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline Vec2 midpoint(Vec2 a, Vec2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

// polar angle mapped to [0, 2*pi)
inline double polar_angle(Vec2 p) {
	double phi = std::atan2(p.y, p.x);
	if (phi < 0) phi += 2.0 * M_PI;
	return phi;
}

inline double triangle_area(Vec2 a, Vec2 b, Vec2 c) {
	return 0.5 * cross(b - a, c - a);
}

inline double polygon_area(const std::vector<Vec2>& poly) {
	double s = 0;
	for (size_t i = 0; i < poly.size(); ++i) {
		size_t j = (i + 1) % poly.size();
		s += cross(poly[i], poly[j]);
	}
	return 0.5 * s;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
	Vec2 d = b - a;
	double len2 = dot(d, d);
	double t = len2 > 0 ? dot(p - a, d) / len2 : 0.0;
	t = std::max(0.0, std::min(1.0, t));
	return norm(p - (a + t * d));
}

// clip a convex ccw polygon against the half plane {p: sign(p) >= 0}
template <class SignFun>
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, SignFun sign, double tol) {
	std::vector<Vec2> out;
	size_t n = poly.size();
	for (size_t i = 0; i < n; ++i) {
		Vec2 p = poly[i];
		Vec2 q = poly[(i + 1) % n];
		double sp = sign(p);
		double sq = sign(q);
		if (sp >= -tol) out.push_back(p);
		bool crosses = (sp > tol && sq < -tol) || (sp < -tol && sq > tol);
		if (crosses) {
			double t = sp / (sp - sq);
			out.push_back(p + t * (q - p));
		}
	}
	return out;
}

// compensated (Neumaier) accumulator for long quadrature sums
struct KahanSum {
	double sum = 0.0;
	double comp = 0.0;

	void add(double v) {
		double t = sum + v;
		if (std::abs(sum) >= std::abs(v)) {
			comp += (sum - t) + v;
		} else {
			comp += (v - t) + sum;
		}
		sum = t;
	}
	double value() const { return sum + comp; }
};

}  // namespace cfem
