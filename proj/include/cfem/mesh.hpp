#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "geometry.hpp"

namespace cfem {

// Sector domain Omega_omega = (-1,1)^2 intersected with {0 <= phi <= omega},
// reentrant (or convex) corner at the origin.
struct DomainSpec {
	double omega = 0.0;
	double lambda = 0.0;  // pi / omega, leading singular exponent
};

inline DomainSpec make_domain(double omega) {
	const double eps = 1e-8;
	if (!(omega > eps) || !(omega < 2.0 * M_PI - eps)) {
		throw std::invalid_argument("domain opening angle must lie strictly inside (0, 2*pi)");
	}
	return DomainSpec{omega, M_PI / omega};
}

// ccw triangle; refinement edge is (v[0], v[1]), newest vertex is v[2]
struct Triangle {
	std::array<int, 3> v;
};

// directed boundary edge a->b with the domain on the left
struct BoundaryEdge {
	int a = -1;
	int b = -1;
	int segment = -1;  // index into TriangleMesh::corners polygon sides
};

struct BoundaryNode {
	int vertex = -1;
	Vec2 pos;
	double s = 0.0;    // arc length from the loop start
	int segment = -1;  // segment id of the outgoing edge
};

struct TriangleMesh {
	DomainSpec domain;                                // omega == 0 for plain square test meshes
	std::vector<Vec2> vertices;
	std::vector<Triangle> triangles;
	std::vector<BoundaryEdge> boundary;               // single ccw loop, starts at corners[0]
	std::vector<Vec2> corners;                        // domain polygon, ccw
	std::vector<std::array<int, 2>> vertex_parents;   // refinement provenance, {i,i} for level-0 vertices
	int level = 0;

	// derived, filled by finalize_mesh
	std::vector<int> boundary_vertices;  // loop position -> vertex id
	std::vector<int> boundary_index;     // vertex id -> loop position, -1 for interior vertices

	int n_vertices() const { return (int)vertices.size(); }
	int n_triangles() const { return (int)triangles.size(); }
	int n_boundary() const { return (int)boundary.size(); }
	bool is_boundary_vertex(int v) const { return boundary_index[v] >= 0; }
	Vec2 point(int v) const { return vertices[v]; }
};

namespace detail {

inline uint64_t edge_key(int a, int b) {
	uint32_t lo = (uint32_t)std::min(a, b);
	uint32_t hi = (uint32_t)std::max(a, b);
	return ((uint64_t)hi << 32) | lo;
}

// vertex dedup over a coarse spatial hash; candidates within snap_tol collapse
struct VertexPool {
	std::vector<Vec2>& pts;
	double snap_tol;
	double bucket = 1e-6;
	std::unordered_map<uint64_t, std::vector<int>> grid;

	explicit VertexPool(std::vector<Vec2>& pts_, double snap_tol_) : pts(pts_), snap_tol(snap_tol_) {}

	uint64_t cell_key(long long ix, long long iy) const {
		return ((uint64_t)(uint32_t)(int32_t)ix << 32) | (uint32_t)(int32_t)iy;
	}

	int add(Vec2 p) {
		long long ix = (long long)std::floor(p.x / bucket);
		long long iy = (long long)std::floor(p.y / bucket);
		for (long long dx = -1; dx <= 1; ++dx) {
			for (long long dy = -1; dy <= 1; ++dy) {
				auto it = grid.find(cell_key(ix + dx, iy + dy));
				if (it == grid.end()) continue;
				for (int id : it->second) {
					if (norm(pts[id] - p) <= snap_tol) return id;
				}
			}
		}
		int id = (int)pts.size();
		pts.push_back(p);
		grid[cell_key(ix, iy)].push_back(id);
		return id;
	}
};

// rotate ccw triangle so that the refinement edge (v0,v1) is the longest edge;
// ties broken by the lexicographically smallest edge midpoint
inline Triangle orient_longest_edge(const std::vector<Vec2>& pts, std::array<int, 3> v) {
	int best = 0;
	double best_len = -1.0;
	Vec2 best_mid{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
	for (int k = 0; k < 3; ++k) {
		Vec2 a = pts[v[k]];
		Vec2 b = pts[v[(k + 1) % 3]];
		double len = norm(b - a);
		Vec2 mid = midpoint(a, b);
		bool better = len > best_len + 1e-14;
		if (!better && len > best_len - 1e-14) {
			better = mid.x < best_mid.x - 1e-14 ||
			         (mid.x < best_mid.x + 1e-14 && mid.y < best_mid.y);
		}
		if (better) {
			best = k;
			best_len = len;
			best_mid = mid;
		}
	}
	return Triangle{{v[best], v[(best + 1) % 3], v[(best + 2) % 3]}};
}

// chain edges incident to exactly one triangle into the ccw boundary loop
inline void extract_boundary(TriangleMesh& m, double snap_tol) {
	std::unordered_map<uint64_t, int> count;
	std::unordered_map<uint64_t, std::pair<int, int>> directed;
	for (const Triangle& t : m.triangles) {
		for (int k = 0; k < 3; ++k) {
			int a = t.v[k];
			int b = t.v[(k + 1) % 3];
			count[edge_key(a, b)] += 1;
			directed[edge_key(a, b)] = {a, b};
		}
	}
	std::unordered_map<int, int> next;
	int n_bnd = 0;
	for (auto& [key, c] : count) {
		if (c == 1) {
			auto [a, b] = directed[key];
			next[a] = b;
			++n_bnd;
		} else if (c != 2) {
			throw std::runtime_error("non-manifold edge in triangulation");
		}
	}

	int start = -1;
	for (int i = 0; i < m.n_vertices(); ++i) {
		if (norm(m.vertices[i] - m.corners[0]) <= snap_tol) {
			start = i;
			break;
		}
	}
	if (start < 0 || !next.count(start)) throw std::runtime_error("boundary loop start not found");

	m.boundary.clear();
	int cur = start;
	for (int step = 0; step < n_bnd; ++step) {
		int nxt = next.at(cur);
		m.boundary.push_back(BoundaryEdge{cur, nxt, -1});
		cur = nxt;
	}
	if (cur != start) throw std::runtime_error("boundary is not a single closed loop");

	int nc = (int)m.corners.size();
	for (BoundaryEdge& e : m.boundary) {
		Vec2 mid = midpoint(m.vertices[e.a], m.vertices[e.b]);
		double best = std::numeric_limits<double>::max();
		for (int j = 0; j < nc; ++j) {
			double d = point_segment_distance(mid, m.corners[j], m.corners[(j + 1) % nc]);
			if (d < best) {
				best = d;
				e.segment = j;
			}
		}
		if (best > 1e-9) throw std::runtime_error("boundary edge does not lie on the domain polygon");
	}
}

inline void finalize_mesh(TriangleMesh& m, double snap_tol) {
	for (const Triangle& t : m.triangles) {
		if (triangle_area(m.vertices[t.v[0]], m.vertices[t.v[1]], m.vertices[t.v[2]]) <= 0) {
			throw std::runtime_error("triangle with non-positive orientation");
		}
	}
	extract_boundary(m, snap_tol);
	m.boundary_vertices.clear();
	m.boundary_index.assign(m.n_vertices(), -1);
	for (const BoundaryEdge& e : m.boundary) {
		m.boundary_index[e.a] = (int)m.boundary_vertices.size();
		m.boundary_vertices.push_back(e.a);
	}
}

}  // namespace detail

// domain polygon corners, ccw from the origin
inline std::vector<Vec2> domain_corners(const DomainSpec& spec) {
	std::vector<Vec2> corners = {{0.0, 0.0}, {1.0, 0.0}};
	const Vec2 sq[4] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
	const double ang[4] = {0.25 * M_PI, 0.75 * M_PI, 1.25 * M_PI, 1.75 * M_PI};
	for (int k = 0; k < 4; ++k) {
		if (ang[k] < spec.omega - 1e-12) corners.push_back(sq[k]);
	}
	Vec2 d{std::cos(spec.omega), std::sin(spec.omega)};
	double tx = std::abs(d.x) > 1e-15 ? 1.0 / std::abs(d.x) : std::numeric_limits<double>::max();
	double ty = std::abs(d.y) > 1e-15 ? 1.0 / std::abs(d.y) : std::numeric_limits<double>::max();
	double t = std::min(tx, ty);
	Vec2 exit = t * d;
	for (const Vec2& c : sq) {
		if (norm(exit - c) <= 1e-9) exit = c;
	}
	if (norm(exit - corners.back()) > 1e-9) corners.push_back(exit);
	return corners;
}

// Coarse triangulation of Omega_omega at target mesh size 1/2: half-unit grid cells are
// split into four right-isosceles triangles through the cell center (hypotenuse = cell
// edge); cells crossed by the ray phi = omega are clipped and fanned locally.
inline TriangleMesh build_domain_mesh(const DomainSpec& spec) {
	if (!(spec.omega > 0) || !(spec.lambda > 0)) {
		throw std::invalid_argument("domain spec not initialized, use make_domain");
	}
	const double cell = 0.5;
	const double snap_tol = 1e-12 * 2.0 * std::sqrt(2.0);

	TriangleMesh m;
	m.domain = spec;
	m.corners = domain_corners(spec);

	detail::VertexPool pool(m.vertices, snap_tol);
	const Vec2 d{std::cos(spec.omega), std::sin(spec.omega)};
	auto ray_side = [&](Vec2 p) { return d.y * p.x - d.x * p.y; };  // >= 0 on the kept side

	std::vector<std::array<int, 3>> raw;
	for (int i = 0; i < 4; ++i) {
		for (int j = 0; j < 4; ++j) {
			double x0 = -1.0 + cell * i, x1 = x0 + cell;
			double y0 = -1.0 + cell * j, y1 = y0 + cell;
			std::vector<Vec2> poly = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
			Vec2 center{x0 + 0.5 * cell, y0 + 0.5 * cell};

			// does the open cell meet the relative interior of the ray?
			double t0 = 0.0, t1 = 3.0;
			auto clip_axis = [&](double p, double lo, double hi) {
				if (std::abs(p) < 1e-15) {
					if (lo > 0 || hi < 0) t1 = -1.0;
					return;
				}
				double ta = lo / p, tb = hi / p;
				if (ta > tb) std::swap(ta, tb);
				t0 = std::max(t0, ta);
				t1 = std::min(t1, tb);
			};
			clip_axis(d.x, x0, x1);
			clip_axis(d.y, y0, y1);
			bool cut = false;
			if (t1 - t0 > snap_tol) {
				Vec2 mid = (0.5 * (t0 + t1)) * d;
				cut = mid.x > x0 + snap_tol && mid.x < x1 - snap_tol &&
				      mid.y > y0 + snap_tol && mid.y < y1 - snap_tol;
			}

			if (!cut) {
				double phi = polar_angle(center);
				if (phi >= spec.omega) continue;
				int c = pool.add(center);
				for (int k = 0; k < 4; ++k) {
					int a = pool.add(poly[k]);
					int b = pool.add(poly[(k + 1) % 4]);
					raw.push_back({a, b, c});
				}
				continue;
			}

			std::vector<Vec2> kept = clip_halfplane(poly, ray_side, snap_tol);
			if (kept.size() < 3 || polygon_area(kept) < 1e-9 * cell * cell) continue;

			// fan point: the cell center when it lies in the clipped polygon, else the centroid
			Vec2 g = center;
			bool center_ok = true;
			for (size_t k = 0; k < kept.size(); ++k) {
				Vec2 a = kept[k], b = kept[(k + 1) % kept.size()];
				if (cross(b - a, g - a) < -snap_tol) center_ok = false;
			}
			if (!center_ok) {
				double area = polygon_area(kept);
				Vec2 cg{0, 0};
				for (size_t k = 0; k < kept.size(); ++k) {
					Vec2 a = kept[k], b = kept[(k + 1) % kept.size()];
					double w = cross(a, b);
					cg = cg + (w / (6.0 * area)) * (a + b);
				}
				g = cg;
			}
			int gc = pool.add(g);
			for (size_t k = 0; k < kept.size(); ++k) {
				int a = pool.add(kept[k]);
				int b = pool.add(kept[(k + 1) % kept.size()]);
				if (a == b || a == gc || b == gc) continue;
				if (triangle_area(m.vertices[a], m.vertices[b], m.vertices[gc]) <
				    1e-9 * cell * cell) {
					continue;
				}
				raw.push_back({a, b, gc});
			}
		}
	}
	if (raw.empty()) throw std::runtime_error("empty triangulation for the requested domain");

	m.triangles.reserve(raw.size());
	for (const auto& v : raw) m.triangles.push_back(detail::orient_longest_edge(m.vertices, v));
	m.vertex_parents.resize(m.vertices.size());
	for (int i = 0; i < m.n_vertices(); ++i) m.vertex_parents[i] = {i, i};
	detail::finalize_mesh(m, snap_tol);
	return m;
}

// criss-cross mesh of the full square (-1,1)^2, used by unit tests
inline TriangleMesh build_square_mesh(double cell = 1.0) {
	int n = (int)std::lround(2.0 / cell);
	if (n < 1 || std::abs(n * cell - 2.0) > 1e-12) {
		throw std::invalid_argument("cell size must divide the square edge");
	}
	TriangleMesh m;
	m.corners = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
	const double snap_tol = 1e-12 * 2.0 * std::sqrt(2.0);
	detail::VertexPool pool(m.vertices, snap_tol);
	for (int i = 0; i < n; ++i) {
		for (int j = 0; j < n; ++j) {
			double x0 = -1.0 + cell * i, y0 = -1.0 + cell * j;
			std::vector<Vec2> poly = {{x0, y0}, {x0 + cell, y0}, {x0 + cell, y0 + cell}, {x0, y0 + cell}};
			int c = pool.add({x0 + 0.5 * cell, y0 + 0.5 * cell});
			for (int k = 0; k < 4; ++k) {
				int a = pool.add(poly[k]);
				int b = pool.add(poly[(k + 1) % 4]);
				m.triangles.push_back(detail::orient_longest_edge(m.vertices, {a, b, c}));
			}
		}
	}
	m.vertex_parents.resize(m.vertices.size());
	for (int i = 0; i < m.n_vertices(); ++i) m.vertex_parents[i] = {i, i};
	detail::finalize_mesh(m, snap_tol);
	return m;
}

namespace detail {

// one sweep: every triangle is bisected at its refinement edge, recursive closure
// keeps the triangulation conforming
inline void bisect_all(TriangleMesh& m) {
	std::vector<Triangle>& tris = m.triangles;
	std::vector<char> alive(tris.size(), 1);
	std::unordered_map<uint64_t, std::array<int, 2>> incidence;
	incidence.reserve(tris.size() * 2);

	auto slot_of = [&](uint64_t key) -> std::array<int, 2>& {
		auto it = incidence.find(key);
		if (it == incidence.end()) it = incidence.emplace(key, std::array<int, 2>{-1, -1}).first;
		return it->second;
	};
	auto add_tri = [&](int t) {
		for (int k = 0; k < 3; ++k) {
			auto& slot = slot_of(edge_key(tris[t].v[k], tris[t].v[(k + 1) % 3]));
			if (slot[0] < 0) {
				slot[0] = t;
			} else if (slot[1] < 0) {
				slot[1] = t;
			} else {
				throw std::runtime_error("edge incident to more than two triangles");
			}
		}
	};
	auto remove_tri = [&](int t) {
		for (int k = 0; k < 3; ++k) {
			auto& slot = slot_of(edge_key(tris[t].v[k], tris[t].v[(k + 1) % 3]));
			if (slot[0] == t) {
				slot[0] = slot[1];
				slot[1] = -1;
			} else if (slot[1] == t) {
				slot[1] = -1;
			}
		}
	};
	auto neighbor = [&](int t) {
		auto& slot = slot_of(edge_key(tris[t].v[0], tris[t].v[1]));
		return slot[0] == t ? slot[1] : slot[0];
	};

	for (int t = 0; t < (int)tris.size(); ++t) add_tri(t);

	std::unordered_map<uint64_t, int> midpoint_of;
	auto midpoint_vertex = [&](int a, int b) {
		uint64_t key = edge_key(a, b);
		auto it = midpoint_of.find(key);
		if (it != midpoint_of.end()) return it->second;
		int id = (int)m.vertices.size();
		m.vertices.push_back(midpoint(m.vertices[a], m.vertices[b]));
		m.vertex_parents.push_back({std::min(a, b), std::max(a, b)});
		midpoint_of.emplace(key, id);
		return id;
	};

	// splits t across its refinement edge, returns nothing; children are appended
	auto split = [&](int t, int mid) {
		int a = tris[t].v[0], b = tris[t].v[1], c = tris[t].v[2];
		remove_tri(t);
		alive[t] = 0;
		int c1 = (int)tris.size();
		tris.push_back(Triangle{{c, a, mid}});
		alive.push_back(1);
		add_tri(c1);
		int c2 = (int)tris.size();
		tris.push_back(Triangle{{b, c, mid}});
		alive.push_back(1);
		add_tri(c2);
	};

	auto ref_edge_is = [&](int t, uint64_t key) {
		return edge_key(tris[t].v[0], tris[t].v[1]) == key;
	};

	// recursive bisection with compatibility closure, iterative stack form
	auto bisect = [&](int t0) {
		std::vector<int> path = {t0};
		while (!path.empty()) {
			int t = path.back();
			if (!alive[t]) {
				path.pop_back();
				continue;
			}
			uint64_t key = edge_key(tris[t].v[0], tris[t].v[1]);
			int n = neighbor(t);
			if (n >= 0 && !ref_edge_is(n, key)) {
				if (path.size() > alive.size()) {
					throw std::runtime_error("refinement closure does not terminate");
				}
				path.push_back(n);
				continue;
			}
			int mid = midpoint_vertex(tris[t].v[0], tris[t].v[1]);
			split(t, mid);
			if (n >= 0) split(n, mid);
			path.pop_back();
		}
	};

	int n0 = (int)tris.size();
	for (int t = 0; t < n0; ++t) {
		if (alive[t]) bisect(t);
	}

	// compact triangles
	std::vector<Triangle> out;
	out.reserve(tris.size());
	for (int t = 0; t < (int)tris.size(); ++t) {
		if (alive[t]) out.push_back(tris[t]);
	}
	m.triangles = std::move(out);

	// split boundary edges in place, order preserved
	std::vector<BoundaryEdge> bnd;
	bnd.reserve(m.boundary.size() * 2);
	for (const BoundaryEdge& e : m.boundary) {
		auto it = midpoint_of.find(edge_key(e.a, e.b));
		if (it == midpoint_of.end()) {
			bnd.push_back(e);
		} else {
			bnd.push_back(BoundaryEdge{e.a, it->second, e.segment});
			bnd.push_back(BoundaryEdge{it->second, e.b, e.segment});
		}
	}
	m.boundary = std::move(bnd);
}

}  // namespace detail

// one refinement level: two bisection sweeps, so the mesh size halves
inline TriangleMesh refine_uniform(const TriangleMesh& mesh) {
	TriangleMesh m = mesh;
	detail::bisect_all(m);
	detail::bisect_all(m);
	m.level = mesh.level + 1;
	m.boundary_vertices.clear();
	m.boundary_index.assign(m.n_vertices(), -1);
	for (const BoundaryEdge& e : m.boundary) {
		m.boundary_index[e.a] = (int)m.boundary_vertices.size();
		m.boundary_vertices.push_back(e.a);
	}
	return m;
}

inline double mesh_size(const TriangleMesh& m) {
	double h = 0;
	for (const Triangle& t : m.triangles) {
		for (int k = 0; k < 3; ++k) {
			h = std::max(h, norm(m.vertices[t.v[k]] - m.vertices[t.v[(k + 1) % 3]]));
		}
	}
	return h;
}

inline double min_edge(const TriangleMesh& m) {
	double h = std::numeric_limits<double>::max();
	for (const Triangle& t : m.triangles) {
		for (int k = 0; k < 3; ++k) {
			h = std::min(h, norm(m.vertices[t.v[k]] - m.vertices[t.v[(k + 1) % 3]]));
		}
	}
	return h;
}

inline double min_angle(const TriangleMesh& m) {
	double best = std::numeric_limits<double>::max();
	for (const Triangle& t : m.triangles) {
		for (int k = 0; k < 3; ++k) {
			Vec2 a = m.vertices[t.v[k]];
			Vec2 b = m.vertices[t.v[(k + 1) % 3]];
			Vec2 c = m.vertices[t.v[(k + 2) % 3]];
			Vec2 u = b - a, w = c - a;
			best = std::min(best, std::atan2(std::abs(cross(u, w)), dot(u, w)));
		}
	}
	return best;
}

// boundary loop as nodes with arc length; the closing entry repeats the start
// vertex at s = perimeter
inline std::vector<BoundaryNode> boundary_nodes(const TriangleMesh& m) {
	std::vector<BoundaryNode> nodes;
	nodes.reserve(m.boundary.size() + 1);
	double s = 0;
	for (const BoundaryEdge& e : m.boundary) {
		nodes.push_back(BoundaryNode{e.a, m.vertices[e.a], s, e.segment});
		s += norm(m.vertices[e.b] - m.vertices[e.a]);
	}
	BoundaryNode closing = nodes.front();
	closing.s = s;
	nodes.push_back(closing);
	return nodes;
}

inline double boundary_perimeter(const TriangleMesh& m) {
	double s = 0;
	for (const BoundaryEdge& e : m.boundary) s += norm(m.vertices[e.b] - m.vertices[e.a]);
	return s;
}

// cheap conformity check: every edge has at most two incident triangles and the
// single-incidence edges form exactly the stored closed boundary loop
inline bool is_conforming(const TriangleMesh& m) {
	std::unordered_map<uint64_t, int> count;
	for (const Triangle& t : m.triangles) {
		for (int k = 0; k < 3; ++k) {
			if (++count[detail::edge_key(t.v[k], t.v[(k + 1) % 3])] > 2) return false;
		}
	}
	size_t n_bnd = 0;
	for (auto& [key, c] : count) {
		if (c == 1) ++n_bnd;
	}
	if (n_bnd != m.boundary.size()) return false;
	for (const BoundaryEdge& e : m.boundary) {
		auto it = count.find(detail::edge_key(e.a, e.b));
		if (it == count.end() || it->second != 1) return false;
	}
	int euler = m.n_vertices() - (int)count.size() + m.n_triangles();
	return euler == 1;
}

}  // namespace cfem
