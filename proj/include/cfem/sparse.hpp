#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace cfem {

// symmetric sparse matrix in CSR form, column indices strictly increasing per row
struct CsrMatrix {
	int n = 0;
	std::vector<int> row_ptr;
	std::vector<int> cols;
	std::vector<double> vals;

	double at(int i, int j) const {
		for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
			if (cols[k] == j) return vals[k];
		}
		return 0.0;
	}
	int nnz() const { return (int)vals.size(); }
};

struct TripletBuilder {
	int n = 0;
	std::vector<std::tuple<int, int, double>> entries;

	explicit TripletBuilder(int n_) : n(n_) {}

	void add(int i, int j, double v) {
		if (i < 0 || i >= n || j < 0 || j >= n) throw std::out_of_range("triplet index");
		entries.emplace_back(i, j, v);
	}

	CsrMatrix to_csr() {
		std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
			return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
			                                        : std::get<1>(a) < std::get<1>(b);
		});
		CsrMatrix A;
		A.n = n;
		A.row_ptr.assign(n + 1, 0);
		for (size_t k = 0; k < entries.size();) {
			int i = std::get<0>(entries[k]);
			int j = std::get<1>(entries[k]);
			double v = 0;
			while (k < entries.size() && std::get<0>(entries[k]) == i && std::get<1>(entries[k]) == j) {
				v += std::get<2>(entries[k]);
				++k;
			}
			A.cols.push_back(j);
			A.vals.push_back(v);
			A.row_ptr[i + 1] = (int)A.cols.size();
		}
		for (int i = 0; i < n; ++i) A.row_ptr[i + 1] = std::max(A.row_ptr[i + 1], A.row_ptr[i]);
		return A;
	}
};

inline void spmv(const CsrMatrix& A, const std::vector<double>& x, std::vector<double>& y) {
	y.assign(A.n, 0.0);
	for (int i = 0; i < A.n; ++i) {
		double s = 0;
		for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) s += A.vals[k] * x[A.cols[k]];
		y[i] = s;
	}
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
	double s = 0;
	for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
	return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct SolveReport {
	int iterations = 0;
	double relative_residual = 0.0;
};

struct CgOptions {
	double tol = 1e-12;
	int max_iter = 0;  // 0: 3n + 20
	const std::vector<double>* initial_guess = nullptr;
};

// Jacobi-preconditioned conjugate gradients, throws on non-convergence
inline SolveReport cg_solve(const CsrMatrix& A, const std::vector<double>& b,
                            std::vector<double>& x, const CgOptions& opt = {}) {
	int n = A.n;
	if ((int)b.size() != n) throw std::invalid_argument("cg: rhs size mismatch");
	int max_iter = opt.max_iter > 0 ? opt.max_iter : 3 * n + 20;

	std::vector<double> minv(n);
	for (int i = 0; i < n; ++i) {
		double d = A.at(i, i);
		if (!(d > 0)) throw std::invalid_argument("cg: non-positive diagonal entry");
		minv[i] = 1.0 / d;
	}

	double bnorm = norm2(b);
	if (bnorm == 0.0) {
		x.assign(n, 0.0);
		return {0, 0.0};
	}

	std::vector<double> r(n), z(n), p(n), q(n);
	if (opt.initial_guess) {
		x = *opt.initial_guess;
		spmv(A, x, q);
		for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
		double rnorm0 = norm2(r);
		if (rnorm0 <= opt.tol * bnorm) return {0, rnorm0 / bnorm};
	} else {
		x.assign(n, 0.0);
		r = b;
	}
	for (int i = 0; i < n; ++i) z[i] = minv[i] * r[i];
	p = z;
	double rz = dot(r, z);

	for (int it = 1; it <= max_iter; ++it) {
		spmv(A, p, q);
		double pq = dot(p, q);
		if (!(pq > 0)) throw std::runtime_error("cg: matrix not positive definite");
		double alpha = rz / pq;
		for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
		if (it % 64 == 0) {
			spmv(A, x, q);
			for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
		} else {
			for (int i = 0; i < n; ++i) r[i] -= alpha * q[i];
		}
		double rnorm = norm2(r);
		if (rnorm <= opt.tol * bnorm) {
			spmv(A, x, q);
			for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
			rnorm = norm2(r);
			if (rnorm <= opt.tol * bnorm) return {it, rnorm / bnorm};
		}
		for (int i = 0; i < n; ++i) z[i] = minv[i] * r[i];
		double rz_next = dot(r, z);
		double beta = rz_next / rz;
		rz = rz_next;
		for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
	}
	throw std::runtime_error("cg: no convergence within iteration limit");
}

// dense LDL^T factorization for small SPD systems (oracles and fallback paths)
class DenseLdlt {
public:
	DenseLdlt() = default;

	// a: row-major n*n, symmetric positive definite
	DenseLdlt(std::vector<double> a, int n) : n_(n), f_(std::move(a)) {
		if ((int)f_.size() != n * n) throw std::invalid_argument("ldlt: bad matrix size");
		d_.resize(n);
		for (int j = 0; j < n; ++j) {
			double dj = f_[j * n + j];
			for (int k = 0; k < j; ++k) dj -= f_[j * n + k] * f_[j * n + k] * d_[k];
			if (!(dj > 0)) throw std::runtime_error("ldlt: matrix not positive definite");
			d_[j] = dj;
			for (int i = j + 1; i < n; ++i) {
				double v = f_[i * n + j];
				for (int k = 0; k < j; ++k) v -= f_[i * n + k] * f_[j * n + k] * d_[k];
				f_[i * n + j] = v / dj;
			}
		}
	}

	std::vector<double> solve(std::vector<double> b) const {
		if ((int)b.size() != n_) throw std::invalid_argument("ldlt: rhs size mismatch");
		for (int i = 0; i < n_; ++i) {
			for (int k = 0; k < i; ++k) b[i] -= f_[i * n_ + k] * b[k];
		}
		for (int i = 0; i < n_; ++i) b[i] /= d_[i];
		for (int i = n_ - 1; i >= 0; --i) {
			for (int k = i + 1; k < n_; ++k) b[i] -= f_[k * n_ + i] * b[k];
		}
		return b;
	}

	int size() const { return n_; }

private:
	int n_ = 0;
	std::vector<double> f_;
	std::vector<double> d_;
};

inline std::vector<double> csr_to_dense(const CsrMatrix& A) {
	std::vector<double> d((size_t)A.n * A.n, 0.0);
	for (int i = 0; i < A.n; ++i) {
		for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) d[(size_t)i * A.n + A.cols[k]] = A.vals[k];
	}
	return d;
}

inline std::vector<double> ldlt_solve(const CsrMatrix& A, const std::vector<double>& b) {
	return DenseLdlt(csr_to_dense(A), A.n).solve(b);
}

// SPD dispatch: direct factorization for small systems, preconditioned CG otherwise
inline SolveReport solve_spd(const CsrMatrix& A, const std::vector<double>& b,
                             std::vector<double>& x, const CgOptions& opt = {}) {
	if (A.n <= 64) {
		x = ldlt_solve(A, b);
		return {0, 0.0};
	}
	return cg_solve(A, b, x, opt);
}

}  // namespace cfem
