#pragma once

#include <functional>

#include "mesh.hpp"
#include "quadrature.hpp"
#include "sparse.hpp"

namespace cfem {

struct BoundaryPoint {
	Vec2 xy;
	double s = 0.0;  // global arc length along the ccw loop
	int segment = -1;
};

// boundary datum: closed-form evaluation along Gamma; the singular flag switches
// origin-touching edges to graded quadrature
struct BoundaryFunctionSpec {
	std::function<double(const BoundaryPoint&)> eval;
	bool singular_at_origin = false;
};

inline BoundaryFunctionSpec boundary_datum_xy(std::function<double(Vec2)> f, bool singular = false) {
	return {[f = std::move(f)](const BoundaryPoint& p) { return f(p.xy); }, singular};
}

inline BoundaryFunctionSpec boundary_datum_arclength(std::function<double(double)> f) {
	return {[f = std::move(f)](const BoundaryPoint& p) { return f(p.s); }, false};
}

// coefficients of a piecewise linear function on the boundary, indexed by loop position
struct BoundaryField {
	const TriangleMesh* mesh = nullptr;
	std::vector<double> values;
};

namespace detail {

constexpr double kOriginTol = 1e-12 * 2.8284271247461903;
constexpr double kGradingRatio = 0.15;
constexpr int kGradingCount = 30;

inline bool at_origin(Vec2 p) { return norm(p) <= kOriginTol; }

// visit quadrature points of one boundary edge; fn(t, point, weight) with the weight
// carrying the edge length, t the local coordinate from node a to node b. Graded
// intervals are parameterized from the singular endpoint so that points arbitrarily
// close to it stay exactly representable and never collapse onto it.
template <class Fn>
void edge_quadrature(Vec2 a, Vec2 b, double s0, int segment, bool singular, Fn&& fn) {
	const Quad1D& gl = gauss_legendre_8();
	double len = norm(b - a);
	bool sing_a = singular && at_origin(a);
	bool sing_b = singular && at_origin(b);
	auto emit_interval = [&](double lo, double hi, bool from_b) {
		double span = hi - lo;
		for (size_t i = 0; i < gl.x.size(); ++i) {
			double s = lo + span * gl.x[i];
			Vec2 xy = from_b ? b + s * (a - b) : a + s * (b - a);
			double t = from_b ? 1.0 - s : s;
			BoundaryPoint p{xy, s0 + t * len, segment};
			fn(t, p, gl.w[i] * span * len);
		}
	};
	if (!sing_a && !sing_b) {
		emit_interval(0.0, 1.0, false);
		return;
	}
	for (const auto& part : graded_intervals(kGradingRatio, kGradingCount)) {
		emit_interval(part[0], part[1], sing_b);
	}
}

}  // namespace detail

// loads b_x = integral over Gamma of u * lambda_x, indexed by boundary loop position
inline std::vector<double> boundary_load(const TriangleMesh& mesh, const BoundaryFunctionSpec& u) {
	if (!u.eval) throw std::invalid_argument("boundary datum has no evaluator");
	int nb = (int)mesh.boundary.size();
	std::vector<KahanSum> acc(nb);
	std::vector<BoundaryNode> nodes = boundary_nodes(mesh);
	for (int e = 0; e < nb; ++e) {
		const BoundaryEdge& be = mesh.boundary[e];
		int ia = mesh.boundary_index[be.a];
		int ib = mesh.boundary_index[be.b];
		detail::edge_quadrature(mesh.vertices[be.a], mesh.vertices[be.b], nodes[e].s, be.segment,
		                        u.singular_at_origin,
		                        [&](double t, const BoundaryPoint& p, double w) {
			                        double uv = u.eval(p);
			                        acc[ia].add(w * uv * (1.0 - t));
			                        acc[ib].add(w * uv * t);
		                        });
	}
	std::vector<double> b(nb);
	for (int i = 0; i < nb; ++i) b[i] = acc[i].value();
	return b;
}

// boundary mass matrix of the hat functions on the closed loop, size n_b x n_b
inline CsrMatrix assemble_boundary_mass(const TriangleMesh& mesh) {
	int nb = (int)mesh.boundary.size();
	TripletBuilder build(nb);
	for (const BoundaryEdge& be : mesh.boundary) {
		int ia = mesh.boundary_index[be.a];
		int ib = mesh.boundary_index[be.b];
		double len = norm(mesh.vertices[be.b] - mesh.vertices[be.a]);
		build.add(ia, ia, len / 3.0);
		build.add(ib, ib, len / 3.0);
		build.add(ia, ib, len / 6.0);
		build.add(ib, ia, len / 6.0);
	}
	return build.to_csr();
}

// Carstensen interpolant: coefficient at node x is the lambda_x-weighted average of u
// over the (at most two) edges meeting at x; reproduces constants and preserves ranges
inline BoundaryField carstensen_interpolate(const TriangleMesh& mesh, const BoundaryFunctionSpec& u) {
	int nb = (int)mesh.boundary.size();
	std::vector<double> num = boundary_load(mesh, u);
	std::vector<double> den(nb, 0.0);
	for (const BoundaryEdge& be : mesh.boundary) {
		double half = 0.5 * norm(mesh.vertices[be.b] - mesh.vertices[be.a]);
		den[mesh.boundary_index[be.a]] += half;
		den[mesh.boundary_index[be.b]] += half;
	}
	BoundaryField out{&mesh, std::vector<double>(nb)};
	for (int i = 0; i < nb; ++i) out.values[i] = num[i] / den[i];
	return out;
}

// L2(Gamma) projection onto the boundary hat space
inline BoundaryField l2_project_boundary(const TriangleMesh& mesh, const BoundaryFunctionSpec& u,
                                         double tol = 1e-12) {
	CsrMatrix mass = assemble_boundary_mass(mesh);
	std::vector<double> rhs = boundary_load(mesh, u);
	BoundaryField out{&mesh, {}};
	CgOptions opt;
	opt.tol = tol;
	solve_spd(mass, rhs, out.values, opt);
	return out;
}

// nodal interpolation; only valid for data that can be evaluated at the nodes
inline BoundaryField interpolate_boundary(const TriangleMesh& mesh, const BoundaryFunctionSpec& u) {
	std::vector<BoundaryNode> nodes = boundary_nodes(mesh);
	int nb = (int)mesh.boundary.size();
	BoundaryField out{&mesh, std::vector<double>(nb)};
	for (int i = 0; i < nb; ++i) {
		out.values[i] = u.eval(BoundaryPoint{nodes[i].pos, nodes[i].s, nodes[i].segment});
	}
	return out;
}

// wraps a BoundaryField as an evaluable datum (piecewise linear along the loop)
inline BoundaryFunctionSpec boundary_field_function(const BoundaryField& f) {
	const TriangleMesh& mesh = *f.mesh;
	std::vector<double> breaks;
	double s = 0;
	for (const BoundaryEdge& e : mesh.boundary) {
		breaks.push_back(s);
		s += norm(mesh.vertices[e.b] - mesh.vertices[e.a]);
	}
	breaks.push_back(s);
	std::vector<double> vals = f.values;
	vals.push_back(f.values.front());
	return {[breaks = std::move(breaks), vals = std::move(vals)](const BoundaryPoint& p) {
		        auto it = std::upper_bound(breaks.begin(), breaks.end(), p.s);
		        size_t k = std::min(vals.size() - 2, (size_t)std::max<long>(0, (it - breaks.begin()) - 1));
		        double t = (p.s - breaks[k]) / (breaks[k + 1] - breaks[k]);
		        t = std::max(0.0, std::min(1.0, t));
		        return vals[k] + t * (vals[k + 1] - vals[k]);
	        },
	        false};
}

// || u - v ||_{L2(Gamma)} by the same graded edge quadrature
inline double boundary_l2_error(const TriangleMesh& mesh, const BoundaryFunctionSpec& u,
                                const BoundaryField& v) {
	if (v.mesh != &mesh) throw std::invalid_argument("boundary field does not belong to this mesh");
	KahanSum total;
	std::vector<BoundaryNode> nodes = boundary_nodes(mesh);
	int nb = (int)mesh.boundary.size();
	for (int e = 0; e < nb; ++e) {
		const BoundaryEdge& be = mesh.boundary[e];
		double va = v.values[mesh.boundary_index[be.a]];
		double vb = v.values[mesh.boundary_index[be.b]];
		detail::edge_quadrature(mesh.vertices[be.a], mesh.vertices[be.b], nodes[e].s, be.segment,
		                        u.singular_at_origin,
		                        [&](double t, const BoundaryPoint& p, double w) {
			                        double diff = u.eval(p) - (va + t * (vb - va));
			                        total.add(w * diff * diff);
		                        });
	}
	return std::sqrt(std::max(0.0, total.value()));
}

}  // namespace cfem
