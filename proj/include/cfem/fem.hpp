#pragma once

#include "boundary.hpp"
#include "mesh.hpp"
#include "sparse.hpp"

namespace cfem {

// piecewise linear function on the mesh, one coefficient per vertex
struct NodalField {
	const TriangleMesh* mesh = nullptr;
	std::vector<double> values;
};

struct SourceSpec {
	std::function<double(Vec2)> f;  // empty means f == 0
};

inline SourceSpec zero_source() { return {}; }
inline SourceSpec source_from(std::function<double(Vec2)> f) { return {std::move(f)}; }

// P1 stiffness matrix, exact per-element integration
inline CsrMatrix assemble_stiffness(const TriangleMesh& mesh) {
	TripletBuilder build(mesh.n_vertices());
	for (const Triangle& t : mesh.triangles) {
		Vec2 p[3] = {mesh.vertices[t.v[0]], mesh.vertices[t.v[1]], mesh.vertices[t.v[2]]};
		double area = triangle_area(p[0], p[1], p[2]);
		// grad lambda_i = rot90(edge opposite i) / (2 area)
		Vec2 g[3];
		for (int i = 0; i < 3; ++i) {
			Vec2 e = p[(i + 2) % 3] - p[(i + 1) % 3];
			g[i] = {-e.y / (2.0 * area), e.x / (2.0 * area)};
		}
		for (int i = 0; i < 3; ++i) {
			for (int j = 0; j < 3; ++j) build.add(t.v[i], t.v[j], area * dot(g[i], g[j]));
		}
	}
	return build.to_csr();
}

// consistent P1 mass matrix over the domain
inline CsrMatrix assemble_domain_mass(const TriangleMesh& mesh) {
	TripletBuilder build(mesh.n_vertices());
	for (const Triangle& t : mesh.triangles) {
		double area = triangle_area(mesh.vertices[t.v[0]], mesh.vertices[t.v[1]], mesh.vertices[t.v[2]]);
		for (int i = 0; i < 3; ++i) {
			for (int j = 0; j < 3; ++j) build.add(t.v[i], t.v[j], area / 12.0 * (i == j ? 2.0 : 1.0));
		}
	}
	return build.to_csr();
}

// (boundary mass over the loop hats, domain mass over all vertices)
inline std::pair<CsrMatrix, CsrMatrix> assemble_mass(const TriangleMesh& mesh) {
	return {assemble_boundary_mass(mesh), assemble_domain_mass(mesh)};
}

// load vector by the three-point mid-edge rule (exact for quadratic f)
inline std::vector<double> assemble_load(const TriangleMesh& mesh, const SourceSpec& src) {
	std::vector<double> b(mesh.n_vertices(), 0.0);
	if (!src.f) return b;
	for (const Triangle& t : mesh.triangles) {
		Vec2 p[3] = {mesh.vertices[t.v[0]], mesh.vertices[t.v[1]], mesh.vertices[t.v[2]]};
		double area = triangle_area(p[0], p[1], p[2]);
		double fm[3];
		for (int k = 0; k < 3; ++k) fm[k] = src.f(midpoint(p[k], p[(k + 1) % 3]));
		for (int i = 0; i < 3; ++i) {
			// mid-edge values of lambda_i are 1/2 on the two edges meeting at vertex i
			b[t.v[i]] += area / 6.0 * (fm[i] + fm[(i + 2) % 3]);
		}
	}
	return b;
}

namespace detail {

struct InteriorSystem {
	std::vector<int> interior;      // local -> global vertex
	std::vector<int> local_index;   // global vertex -> local or -1
	CsrMatrix A_II;
};

inline InteriorSystem extract_interior(const TriangleMesh& mesh, const CsrMatrix& A) {
	InteriorSystem sys;
	sys.local_index.assign(mesh.n_vertices(), -1);
	for (int v = 0; v < mesh.n_vertices(); ++v) {
		if (!mesh.is_boundary_vertex(v)) {
			sys.local_index[v] = (int)sys.interior.size();
			sys.interior.push_back(v);
		}
	}
	int ni = (int)sys.interior.size();
	CsrMatrix& B = sys.A_II;
	B.n = ni;
	B.row_ptr.assign(ni + 1, 0);
	for (int li = 0; li < ni; ++li) {
		int gi = sys.interior[li];
		for (int k = A.row_ptr[gi]; k < A.row_ptr[gi + 1]; ++k) {
			if (sys.local_index[A.cols[k]] >= 0) {
				B.cols.push_back(sys.local_index[A.cols[k]]);
				B.vals.push_back(A.vals[k]);
			}
		}
		B.row_ptr[li + 1] = (int)B.cols.size();
	}
	return sys;
}

}  // namespace detail

inline BoundaryField trace(const NodalField& y) {
	const TriangleMesh& mesh = *y.mesh;
	BoundaryField out{&mesh, std::vector<double>(mesh.boundary_vertices.size())};
	for (size_t i = 0; i < mesh.boundary_vertices.size(); ++i) {
		out.values[i] = y.values[mesh.boundary_vertices[i]];
	}
	return out;
}

// discrete Dirichlet problem with boundary values uh imposed by elimination;
// boundary entries of the result match uh bitwise
inline NodalField solve_regularized(const TriangleMesh& mesh, const BoundaryField& uh,
                                    const SourceSpec& src = {}, const NodalField* guess = nullptr,
                                    double tol = 1e-12, SolveReport* report = nullptr) {
	if (uh.mesh != &mesh) throw std::invalid_argument("boundary data does not belong to this mesh");
	if (uh.values.size() != mesh.boundary_vertices.size()) {
		throw std::invalid_argument("boundary data has wrong size");
	}
	int n = mesh.n_vertices();
	CsrMatrix A = assemble_stiffness(mesh);
	std::vector<double> full(n, 0.0);
	for (size_t i = 0; i < mesh.boundary_vertices.size(); ++i) {
		full[mesh.boundary_vertices[i]] = uh.values[i];
	}
	std::vector<double> rhs = assemble_load(mesh, src);
	std::vector<double> lift(n);
	spmv(A, full, lift);
	for (int i = 0; i < n; ++i) rhs[i] -= lift[i];

	detail::InteriorSystem sys = detail::extract_interior(mesh, A);
	int ni = (int)sys.interior.size();
	std::vector<double> rhs_i(ni), x_i, guess_i;
	for (int li = 0; li < ni; ++li) rhs_i[li] = rhs[sys.interior[li]];

	CgOptions opt;
	opt.tol = tol;
	if (guess) {
		if (guess->mesh != &mesh || (int)guess->values.size() != n) {
			throw std::invalid_argument("initial guess does not belong to this mesh");
		}
		guess_i.resize(ni);
		for (int li = 0; li < ni; ++li) guess_i[li] = guess->values[sys.interior[li]];
		opt.initial_guess = &guess_i;
	}
	SolveReport rep = solve_spd(sys.A_II, rhs_i, x_i, opt);
	if (report) *report = rep;

	NodalField y{&mesh, std::move(full)};
	for (int li = 0; li < ni; ++li) y.values[sys.interior[li]] = x_i[li];
	return y;
}

// Discrete transposition system: for every basis function phi_i an interior
// auxiliary problem is solved, so the cost is one solve per vertex. Meant for
// coarse meshes as an equivalence check against the regularized solve.
inline NodalField solve_berggren(const TriangleMesh& mesh, const BoundaryFunctionSpec& u,
                                 const SourceSpec& src = {}, int vertex_budget = 2000,
                                 double tol = 1e-12) {
	int n = mesh.n_vertices();
	if (n > vertex_budget) {
		throw std::invalid_argument("transposition solve exceeds the vertex budget");
	}
	CsrMatrix A = assemble_stiffness(mesh);
	CsrMatrix Mo = assemble_domain_mass(mesh);
	CsrMatrix Mg = assemble_boundary_mass(mesh);
	std::vector<double> bu = boundary_load(mesh, u);
	std::vector<double> load = assemble_load(mesh, src);

	detail::InteriorSystem sys = detail::extract_interior(mesh, A);
	int ni = (int)sys.interior.size();
	int nb = (int)mesh.boundary_vertices.size();
	DenseLdlt a_fact(csr_to_dense(sys.A_II), ni);
	DenseLdlt m_fact(csr_to_dense(Mg), nb);

	bool has_f = (bool)src.f;
	std::vector<double> r(n, 0.0);
	std::vector<double> vfull(n), av(n), rhs_i(ni), rhs_g(nb);
	for (int i = 0; i < n; ++i) {
		// v_h in Y_0h: (grad v_h, grad psi) = (phi_i, psi)
		std::fill(rhs_i.begin(), rhs_i.end(), 0.0);
		for (int k = Mo.row_ptr[i]; k < Mo.row_ptr[i + 1]; ++k) {
			int li = sys.local_index[Mo.cols[k]];
			if (li >= 0) rhs_i[li] = Mo.vals[k];
		}
		std::vector<double> v = a_fact.solve(rhs_i);
		std::fill(vfull.begin(), vfull.end(), 0.0);
		for (int li = 0; li < ni; ++li) vfull[sys.interior[li]] = v[li];

		// zeta_h in Y_h^d: (zeta, chi)_Gamma = (grad v_h, grad chi) - (phi_i, chi)
		spmv(A, vfull, av);
		for (int x = 0; x < nb; ++x) rhs_g[x] = av[mesh.boundary_vertices[x]] - Mo.at(i, mesh.boundary_vertices[x]);
		std::vector<double> zeta = m_fact.solve(rhs_g);

		// (y_h, phi_i) = -(u, zeta)_Gamma + (f, v_h)
		double val = -dot(zeta, bu);
		if (has_f) val += dot(load, vfull);
		r[i] = val;
	}

	NodalField y{&mesh, {}};
	CgOptions opt;
	opt.tol = tol;
	solve_spd(Mo, r, y.values, opt);
	return y;
}

}  // namespace cfem
