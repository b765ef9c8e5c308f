#include <catch2/catch_amalgamated.hpp>

#include <cfem/sparse.hpp>

#include <random>

using namespace cfem;
using Catch::Approx;

namespace {

CsrMatrix laplacian_1d(int n) {
	TripletBuilder b(n);
	for (int i = 0; i < n; ++i) {
		b.add(i, i, 2.0);
		if (i > 0) b.add(i, i - 1, -1.0);
		if (i + 1 < n) b.add(i, i + 1, -1.0);
	}
	return b.to_csr();
}

}  // namespace

TEST_CASE("triplet builder merges duplicate entries", "[sparse]") {
	TripletBuilder b(3);
	b.add(0, 0, 1.0);
	b.add(0, 0, 2.0);
	b.add(2, 1, -1.0);
	b.add(0, 2, 4.0);
	CsrMatrix a = b.to_csr();
	CHECK(a.nnz() == 3);
	CHECK(a.at(0, 0) == 3.0);
	CHECK(a.at(0, 2) == 4.0);
	CHECK(a.at(2, 1) == -1.0);
	CHECK(a.at(1, 1) == 0.0);
	CHECK_THROWS_AS(b.add(3, 0, 1.0), std::out_of_range);
}

TEST_CASE("sparse times vector matches a dense product", "[sparse]") {
	std::mt19937 rng(7);
	std::uniform_real_distribution<double> dist(-1.0, 1.0);
	int n = 17;
	std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
	TripletBuilder b(n);
	for (int k = 0; k < 60; ++k) {
		int i = (int)(rng() % n), j = (int)(rng() % n);
		double v = dist(rng);
		dense[i][j] += v;
		b.add(i, j, v);
	}
	CsrMatrix a = b.to_csr();
	std::vector<double> x(n), y;
	for (double& xi : x) xi = dist(rng);
	spmv(a, x, y);
	for (int i = 0; i < n; ++i) {
		double yi = 0;
		for (int j = 0; j < n; ++j) yi += dense[i][j] * x[j];
		CHECK(y[i] == Approx(yi).margin(1e-14));
	}
}

TEST_CASE("conjugate gradients solves small systems exactly", "[sparse]") {
	SECTION("identity converges in one iteration") {
		TripletBuilder b(4);
		for (int i = 0; i < 4; ++i) b.add(i, i, 1.0);
		CsrMatrix a = b.to_csr();
		std::vector<double> rhs = {1.0, -2.0, 3.0, 0.5};
		std::vector<double> x;
		SolveReport rep = cg_solve(a, rhs, x);
		CHECK(rep.iterations <= 1);
		for (int i = 0; i < 4; ++i) CHECK(x[i] == Approx(rhs[i]).margin(1e-14));
	}
	SECTION("2x2 system with known solution") {
		TripletBuilder b(2);
		b.add(0, 0, 2.0);
		b.add(0, 1, 1.0);
		b.add(1, 0, 1.0);
		b.add(1, 1, 2.0);
		std::vector<double> x;
		cg_solve(b.to_csr(), {3.0, 3.0}, x);
		CHECK(x[0] == Approx(1.0).margin(1e-12));
		CHECK(x[1] == Approx(1.0).margin(1e-12));
	}
	SECTION("zero right-hand side short-circuits") {
		CsrMatrix a = laplacian_1d(5);
		std::vector<double> x;
		SolveReport rep = cg_solve(a, std::vector<double>(5, 0.0), x);
		CHECK(rep.iterations == 0);
		for (double xi : x) CHECK(xi == 0.0);
	}
}

TEST_CASE("conjugate gradients reaches the requested residual", "[sparse]") {
	int n = 200;
	CsrMatrix a = laplacian_1d(n);
	std::mt19937 rng(11);
	std::uniform_real_distribution<double> dist(-1.0, 1.0);
	std::vector<double> rhs(n);
	for (double& r : rhs) r = dist(rng);
	CgOptions opt;
	opt.tol = 1e-12;
	std::vector<double> x;
	SolveReport rep = cg_solve(a, rhs, x, opt);
	std::vector<double> ax;
	spmv(a, x, ax);
	double rn = 0, bn = 0;
	for (int i = 0; i < n; ++i) {
		rn += (ax[i] - rhs[i]) * (ax[i] - rhs[i]);
		bn += rhs[i] * rhs[i];
	}
	CHECK(std::sqrt(rn / bn) <= 1e-10);
	CHECK(rep.iterations <= 3 * n + 20);
}

TEST_CASE("conjugate gradients rejects non spd input", "[sparse]") {
	TripletBuilder b(2);
	b.add(0, 0, 1.0);
	b.add(0, 1, 3.0);
	b.add(1, 0, 3.0);
	b.add(1, 1, 1.0);  // eigenvalues 4 and -2
	std::vector<double> x;
	CHECK_THROWS_AS(cg_solve(b.to_csr(), {1.0, 0.0}, x), std::runtime_error);
}

TEST_CASE("warm start with the exact solution costs no iterations", "[sparse]") {
	int n = 400;
	CsrMatrix a = laplacian_1d(n);
	std::vector<double> rhs(n, 1.0);
	std::vector<double> x;
	cg_solve(a, rhs, x);
	CgOptions warm_opt;
	warm_opt.initial_guess = &x;
	std::vector<double> y;
	SolveReport warm = cg_solve(a, rhs, y, warm_opt);
	CHECK(warm.iterations <= 1);
	for (int i = 0; i < n; ++i) CHECK(y[i] == Approx(x[i]).margin(1e-10));
}

TEST_CASE("dense ldlt matches elimination by hand", "[sparse]") {
	// A = [[4,2,0],[2,5,2],[0,2,5]], b = (2,9,12) -> x = (0,1,2)
	std::vector<double> a = {4, 2, 0, 2, 5, 2, 0, 2, 5};
	DenseLdlt f(a, 3);
	std::vector<double> x = f.solve({2.0, 9.0, 12.0});
	CHECK(x[0] == Approx(0.0).margin(1e-13));
	CHECK(x[1] == Approx(1.0).margin(1e-13));
	CHECK(x[2] == Approx(2.0).margin(1e-13));
}

TEST_CASE("dense ldlt agrees with cg on a random spd matrix", "[sparse]") {
	std::mt19937 rng(23);
	std::uniform_real_distribution<double> dist(-1.0, 1.0);
	int n = 24;
	// A = B^T B + n I is symmetric positive definite
	std::vector<double> bmat(n * n);
	for (double& v : bmat) v = dist(rng);
	std::vector<double> a(n * n, 0.0);
	for (int i = 0; i < n; ++i) {
		for (int j = 0; j < n; ++j) {
			double s = 0;
			for (int k = 0; k < n; ++k) s += bmat[k * n + i] * bmat[k * n + j];
			a[i * n + j] = s + (i == j ? n : 0);
		}
	}
	TripletBuilder tb(n);
	for (int i = 0; i < n; ++i) {
		for (int j = 0; j < n; ++j) tb.add(i, j, a[i * n + j]);
	}
	std::vector<double> rhs(n);
	for (double& r : rhs) r = dist(rng);
	std::vector<double> xd = DenseLdlt(a, n).solve(rhs);
	std::vector<double> xc;
	cg_solve(tb.to_csr(), rhs, xc);
	for (int i = 0; i < n; ++i) CHECK(xd[i] == Approx(xc[i]).margin(1e-9));
}
