#include <catch2/catch_amalgamated.hpp>

#include <cfem/quadrature.hpp>

#include <cmath>

using namespace cfem;
using Catch::Approx;

namespace {

// exact monomial moments: int_T l1^a l2^b l3^c dA = 2|T| a! b! c! / (a+b+c+2)!
double bary_moment(int a, int b, int c) {
	auto fact = [](int k) {
		double f = 1;
		for (int i = 2; i <= k; ++i) f *= i;
		return f;
	};
	return 2.0 * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
}

double apply_tri(const QuadTri& q, int a, int b, int c) {
	double s = 0;
	for (size_t i = 0; i < q.w.size(); ++i) {
		const auto& l = q.bary[i];
		s += q.w[i] * std::pow(l[0], a) * std::pow(l[1], b) * std::pow(l[2], c);
	}
	return s;
}

}  // namespace

TEST_CASE("gauss legendre nodes and weights are well formed", "[quadrature]") {
	for (int n : {1, 2, 4, 8}) {
		Quad1D q = make_gauss_legendre(n);
		REQUIRE((int)q.x.size() == n);
		double wsum = 0;
		for (int i = 0; i < n; ++i) {
			CHECK(q.x[i] > 0.0);
			CHECK(q.x[i] < 1.0);
			CHECK(q.w[i] > 0.0);
			wsum += q.w[i];
			if (i > 0) CHECK(q.x[i] > q.x[i - 1]);
			CHECK(q.x[i] + q.x[n - 1 - i] == Approx(1.0).margin(1e-15));
		}
		CHECK(wsum == Approx(1.0).margin(1e-14));
	}
}

TEST_CASE("gauss legendre integrates monomials to machine precision", "[quadrature]") {
	for (int n : {2, 4, 8}) {
		Quad1D q = make_gauss_legendre(n);
		for (int k = 0; k <= 2 * n - 1; ++k) {
			double s = 0;
			for (size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * std::pow(q.x[i], k);
			CHECK(s == Approx(1.0 / (k + 1)).margin(1e-14));
		}
	}
	// degree 2n is not exact, so the order claim is sharp
	Quad1D q2 = make_gauss_legendre(2);
	double s = 0;
	for (size_t i = 0; i < q2.x.size(); ++i) s += q2.w[i] * std::pow(q2.x[i], 4);
	CHECK(std::abs(s - 0.2) > 1e-4);
}

TEST_CASE("triangle rules integrate barycentric monomials exactly", "[quadrature]") {
	for (int a = 0; a <= 4; ++a) {
		for (int b = 0; a + b <= 4; ++b) {
			int c = 0;
			while (a + b + c <= 4) {
				CHECK(apply_tri(tri_rule_deg4(), a, b, c) ==
				      Approx(bary_moment(a, b, c)).margin(1e-12));
				++c;
			}
		}
	}
	for (int a = 0; a <= 6; ++a) {
		for (int b = 0; a + b <= 6; ++b) {
			int c = 0;
			while (a + b + c <= 6) {
				CHECK(apply_tri(tri_rule_deg6(), a, b, c) ==
				      Approx(bary_moment(a, b, c)).margin(1e-12));
				++c;
			}
		}
	}
}

TEST_CASE("triangle rule weights are positive and sum to one", "[quadrature]") {
	for (const QuadTri* q : {&tri_rule_deg4(), &tri_rule_deg6()}) {
		double wsum = 0;
		for (size_t i = 0; i < q->w.size(); ++i) {
			CHECK(q->w[i] > 0.0);
			wsum += q->w[i];
			for (double l : q->bary[i]) {
				CHECK(l > 0.0);
				CHECK(l < 1.0);
			}
		}
		CHECK(wsum == Approx(1.0).margin(1e-13));
	}
}

TEST_CASE("graded intervals partition the unit interval", "[quadrature]") {
	double ratio = 0.15;
	int count = 30;
	auto parts = graded_intervals(ratio, count);
	REQUIRE((int)parts.size() == count + 1);
	CHECK(parts.front()[1] == 1.0);
	CHECK(parts.back()[0] == 0.0);
	CHECK(parts.back()[1] == Approx(std::pow(ratio, count)));
	double len = 0;
	for (size_t k = 0; k < parts.size(); ++k) {
		CHECK(parts[k][0] < parts[k][1]);
		if (k > 0) CHECK(parts[k][1] == Approx(parts[k - 1][0]));
		len += parts[k][1] - parts[k][0];
	}
	CHECK(len == Approx(1.0).margin(1e-15));
}
